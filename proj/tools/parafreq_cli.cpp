#include "parafreq/caloric.hpp"
#include "parafreq/frequency.hpp"
#include "parafreq/lab.hpp"
#include "parafreq/nodal.hpp"
#include "parafreq/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

using namespace parafreq;

namespace {

ExperimentConfig load_config(const std::string& path, unsigned seed_override,
                             bool has_seed) {
  ExperimentConfig cfg;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    cfg = ExperimentConfig::from_json(nlohmann::json::parse(is));
  }
  if (has_seed) cfg.seed = seed_override;
  return cfg;
}

std::vector<double> parse_radii(const std::string& spec) {
  // "a:b:n" -> n radii linearly spaced in [a,b]; or comma list.
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double a, b;
    int n;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 2)
      throw std::runtime_error("bad radii spec: " + spec);
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
    return out;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

Eigen::VectorXd parse_point(const std::string& spec) {
  std::stringstream ss(spec);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parafreq: parabolic frequency and nodal-set laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // --config/--seed/--json may follow the subcommand

  std::string config_path;
  unsigned seed = 1;
  bool json_out = false;
  app.add_option("--config", config_path, "experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");
  app.add_flag("--json", json_out, "structured JSON report to stdout");

  auto* solve_cmd = app.add_subcommand("solve", "run the parabolic solver");
  std::string solve_out = "field";
  solve_cmd->add_option("--out", solve_out, "snapshot path prefix");

  auto* freq_cmd = app.add_subcommand("frequency", "frequency profile of a field");
  std::string freq_field, freq_center = "0,0", freq_radii = "0.05:0.3:10";
  std::string freq_out = "profile.csv";
  double freq_t0 = 0.0, freq_R0 = 1.0;
  freq_cmd->add_option("--field", freq_field, "field snapshot prefix")->required();
  freq_cmd->add_option("--center", freq_center, "center x (comma separated)");
  freq_cmd->add_option("--t0", freq_t0, "center time");
  freq_cmd->add_option("--radii", freq_radii, "a:b:n or comma list");
  freq_cmd->add_option("--R0", freq_R0, "localization radius");
  freq_cmd->add_option("--out", freq_out, "CSV output path");

  auto* nodal_cmd = app.add_subcommand("nodal", "extract a nodal slice");
  std::string nodal_field, nodal_out = "nodal";
  double nodal_t = 0.0;
  nodal_cmd->add_option("--field", nodal_field, "field snapshot prefix")->required();
  nodal_cmd->add_option("--t", nodal_t, "slice time");
  nodal_cmd->add_option("--out", nodal_out, "output prefix (csv + json)");

  auto* strat_cmd = app.add_subcommand("stratify", "quantitative strata of a slice");
  std::string strat_field, strat_scales = "0.05,0.1,0.2,0.4";
  double strat_t = 0.0, strat_eta = 0.1;
  int strat_k = 0;
  strat_cmd->add_option("--field", strat_field, "field snapshot prefix")->required();
  strat_cmd->add_option("--t", strat_t, "slice time");
  strat_cmd->add_option("--k", strat_k, "stratum index k");
  strat_cmd->add_option("--eta", strat_eta, "symmetry tolerance");
  strat_cmd->add_option("--scales", strat_scales, "comma list of scales");

  auto* repro_cmd = app.add_subcommand("reproduce", "paper example reproductions");
  std::string which;
  repro_cmd->add_option("target", which, "example1|example2|angenent|dimension")
      ->required();

  auto* lemmas_cmd = app.add_subcommand("lemmas", "statement-keyed check table");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path, seed, !seed_opt->empty());
    bool ok = true;
    nlohmann::json report;

    if (solve_cmd->parsed()) {
      if (cfg.bbox_lo.size() == 0)
        throw std::runtime_error("solve needs a bbox in the config");
      Box box{cfg.bbox_lo, cfg.bbox_hi};
      CoefficientField coeffs =
          cfg.coefficients == "perturbed_heat"
              ? CoefficientField::perturbed_heat(box.dim(), 0.05)
          : cfg.coefficients == "variable_1d" ? CoefficientField::variable_1d()
                                              : CoefficientField::heat(box.dim());
      SolveOptions opts;
      opts.h = cfg.h;
      opts.tau = cfg.tau;
      opts.t_start = cfg.times.empty() ? -1.0 : cfg.times.front();
      opts.t_end = cfg.times.empty() ? 0.0 : cfg.times.back();
      auto zero = [](const Eigen::VectorXd&, double) { return 0.0; };
      auto initial = [](const Eigen::VectorXd& x, double) {
        double v = 1.0;
        for (int i = 0; i < x.size(); ++i)
          v *= std::sin(std::numbers::pi * x[i]);
        return v;
      };
      SpaceTimeField f = solve(coeffs, initial, zero, box, opts);
      f.save(cfg.output_dir + "/" + solve_out);
      report["snapshot"] = cfg.output_dir + "/" + solve_out;
    } else if (freq_cmd->parsed()) {
      SpaceTimeField f = SpaceTimeField::load(freq_field);
      FrequencyProfile prof =
          frequency_profile(f, parse_point(freq_center), freq_t0,
                            parse_radii(freq_radii), freq_R0);
      prof.write_csv(freq_out);
      report["csv"] = freq_out;
      report["max_doubling_residual"] = prof.max_doubling_residual();
    } else if (nodal_cmd->parsed()) {
      SpaceTimeField f = SpaceTimeField::load(nodal_field);
      NodalSlice slice = extract_nodal(f, nodal_t);
      slice.write_csv(nodal_out + ".csv");
      nlohmann::json summary;
      summary["t"] = slice.t;
      summary["measure"] = slice.measure;
      summary["count"] = slice.dim == 1 ? slice.points.size()
                         : slice.dim == 2 ? slice.segments.size()
                                          : slice.triangles.size();
      summary["singular_count"] = slice.singular_points.size();
      summary["identically_zero"] = slice.identically_zero;
      if (!slice.identically_zero) {
        std::vector<double> scales;
        double span = (f.box().hi - f.box().lo).minCoeff();
        for (double e = span / 4; e > 2 * f.spacing() && scales.size() < 8; e /= 2)
          scales.push_back(e);
        if (scales.size() >= 4) {
          BoxDimension bd = box_dimension(slice, scales);
          summary["dimension"] = bd.dimension;
        }
      }
      std::ofstream os(nodal_out + ".json");
      os << summary.dump(2) << "\n";
      report = summary;
    } else if (strat_cmd->parsed()) {
      SpaceTimeField f = SpaceTimeField::load(strat_field);
      NodalSlice slice = extract_nodal(f, strat_t);
      auto nodes = slice.sample_points(4 * f.spacing());
      StratifyResult res = stratify(f, strat_t, strat_k, strat_eta,
                                    parse_radii(strat_scales), nodes);
      report["k"] = res.k;
      report["eta"] = res.eta;
      report["nodes_checked"] = res.nodes_checked;
      report["stratum_count"] = res.stratum.size();
    } else if (repro_cmd->parsed()) {
      if (which == "example1") {
        Example1Result r = run_example1(cfg);
        ok = r.strictly_increasing && std::abs(r.r0 - 1.0) < 1e-3;
        report["r0"] = r.r0;
        report["radii"] = r.radii;
        report["strictly_increasing"] = r.strictly_increasing;
        report["time_derivative"] = r.time_derivative;
      } else if (which == "example2") {
        Example2Result r = run_example2(cfg);
        ok = r.measure_increasing && r.boundary_positive;
        report["inner_radius"] = r.inner_radius;
        report["measure_increasing"] = r.measure_increasing;
        report["boundary_positive"] = r.boundary_positive;
        report["cross_check_diff"] = r.cross_check_diff;
      } else if (which == "angenent") {
        AngenentResult r = run_angenent(cfg);
        ok = r.pass;
        report["counts"] = r.series.counts;
        report["non_increasing"] = r.series.non_increasing;
      } else if (which == "dimension") {
        DimensionResult r = run_dimension_monotonicity(cfg);
        ok = r.consistent_with_nonincreasing;
        report["dimensions"] = r.dimensions;
        report["consistent_with_nonincreasing"] = r.consistent_with_nonincreasing;
        report["caveat"] = r.caveat;
      } else {
        throw std::runtime_error("unknown reproduction target: " + which);
      }
    } else if (lemmas_cmd->parsed()) {
      auto rows = run_lemma_suite();
      for (const auto& r : rows) ok = ok && r.pass;
      report = lemma_table_json(rows);
      if (!json_out) {
        for (const auto& r : rows)
          std::cout << (r.pass ? "pass" : "FAIL") << "  " << r.id << "  ("
                    << r.runtime_ms << " ms)\n";
      }
    }

    if (json_out) std::cout << report.dump(2) << "\n";
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
