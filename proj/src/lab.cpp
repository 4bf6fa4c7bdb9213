#include "parafreq/lab.hpp"

#include "parafreq/caloric.hpp"
#include "parafreq/frequency.hpp"
#include "parafreq/kernel.hpp"
#include "parafreq/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace parafreq {

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

double bisect(const std::function<double(double)>& f, double a, double b,
              int iters = 90) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw std::runtime_error("root bracket failure");
  for (int i = 0; i < iters; ++i) {
    double m = 0.5 * (a + b), fm = f(m);
    if (fm == 0) return m;
    if (fa * fm < 0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  c.scenario = j.value("scenario", c.scenario);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.h = g.value("h", c.h);
    c.tau = g.value("tau", c.tau);
    if (g.contains("bbox")) {
      auto lo = g.at("bbox").at(0).get<std::vector<double>>();
      auto hi = g.at("bbox").at(1).get<std::vector<double>>();
      c.bbox_lo = Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size());
      c.bbox_hi = Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size());
    }
  }
  c.coefficients = j.value("coefficients", c.coefficients);
  if (j.contains("times")) c.times = j.at("times").get<std::vector<double>>();
  c.tol = j.value("tol", c.tol);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json g;
  g["h"] = h;
  g["tau"] = tau;
  if (bbox_lo.size() > 0) {
    std::vector<double> lo(bbox_lo.data(), bbox_lo.data() + bbox_lo.size());
    std::vector<double> hi(bbox_hi.data(), bbox_hi.data() + bbox_hi.size());
    g["bbox"] = {lo, hi};
  }
  return {{"name", name},       {"scenario", scenario}, {"grid", g},
          {"coefficients", coefficients}, {"times", times},
          {"tol", tol},         {"output_dir", output_dir}, {"seed", seed}};
}

std::string ExperimentConfig::hash() const {
  std::string dump = to_json().dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> presets = {"heat", "perturbed_heat",
                                                   "variable_1d", "tabulated"};
  if (std::find(presets.begin(), presets.end(), coefficients) == presets.end())
    throw std::invalid_argument("unknown coefficient preset: " + coefficients);
  if (tol <= 0) throw std::invalid_argument("tolerances must be positive");
  if (h <= 0 || tau <= 0) throw std::invalid_argument("grid steps must be positive");
  for (size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw std::invalid_argument("time samples must be finite");
    if (i > 0 && times[i] <= times[i - 1])
      throw std::invalid_argument("time samples must increase");
  }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows,
               const std::string& config_hash) {
  std::ofstream os(path);
  os << header << ",config_hash\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << row[i] << ",";
    os << config_hash << "\n";
  }
}

Example1Result run_example1(const ExperimentConfig& cfg) {
  RadialProfile profile = RadialProfile::example1();
  Example1Result out;
  out.times = cfg.times.empty() ? std::vector<double>{0.005, 0.01, 0.02}
                                : cfg.times;

  out.r0 = bisect([&](double rho) { return profile.f(rho * rho); }, 0.2, 1.4);
  out.f_at_one = profile.f(1.0);
  const double ds = 1e-5;
  out.radial_derivative =
      (profile.f(1.0 + ds) - profile.f(1.0 - ds)) / (2 * ds);
  // Richardson in t for the one-sided time derivative at |x| = 1.
  double t1 = 2e-3, t2 = 1e-3;
  double d1 = (heat_convolve(profile, t1, 1.0) - profile.f(1.0)) / t1;
  double d2 = (heat_convolve(profile, t2, 1.0) - profile.f(1.0)) / t2;
  out.time_derivative = 2 * d2 - d1;

  for (double t : out.times) {
    double rt = bisect(
        [&](double rho) { return heat_convolve(profile, t, rho); }, 0.2, 2.4);
    out.radii.push_back(rt);
    out.measures.push_back(2 * std::numbers::pi * rt);
  }
  out.strictly_increasing = true;
  double prev = out.r0;
  for (double r : out.radii) {
    if (r <= prev) out.strictly_increasing = false;
    prev = r;
  }

  std::vector<std::vector<double>> rows;
  rows.push_back({0.0, out.r0, 2 * std::numbers::pi * out.r0});
  for (size_t i = 0; i < out.times.size(); ++i)
    rows.push_back({out.times[i], out.radii[i], out.measures[i]});
  write_csv(cfg.output_dir + "/example1_measure.csv", "t,r_t,measure", rows,
            cfg.hash());
  return out;
}

Example2Result run_example2(const ExperimentConfig& cfg) {
  // Dirichlet disk of radius sqrt(3): the outer profile piece vanishes at
  // s = |x|^2 = 3, exactly the rim.
  const double R = std::sqrt(3.0);
  RadialProfile profile = RadialProfile::example2();
  auto initial = [&](double rho) { return profile.f(rho * rho); };

  Example2Result out;
  out.times = cfg.times.empty()
                  ? std::vector<double>{0.005, 0.01, 0.02, 0.03, 0.04}
                  : cfg.times;
  double t_end = out.times.back() + 1e-9;

  RadialSolution fine = radial_solve(initial, R, 700, 1e-4, t_end);
  RadialSolution polar = polar_solve(initial, R, 180, 40, 5e-4, t_end);

  // Cross-validation of the two discretizations of the same disk problem.
  double diff = 0;
  for (double t : out.times)
    for (double rho = 0.1; rho < R; rho += 0.05)
      diff = std::max(diff, std::abs(fine.value(rho, t) - polar.value(rho, t)));
  out.cross_check_diff = diff;

  out.inner_radius_t0 = fine.first_root(0.0);
  for (double t : out.times) {
    double r = fine.first_root(t);
    out.inner_radius.push_back(r);
    out.measures.push_back(2 * std::numbers::pi * r);
  }
  out.measure_increasing = true;
  double prev = out.inner_radius_t0;
  for (double r : out.inner_radius) {
    if (!(r > prev)) out.measure_increasing = false;
    prev = r;
  }
  // Sign near the rim: annulus 2.5 < |x|^2 < 3.
  out.boundary_positive = true;
  for (double t : out.times)
    for (double rho = std::sqrt(2.5); rho < 0.995 * R; rho += 0.01)
      if (fine.value(rho, t) <= 0) out.boundary_positive = false;

  std::vector<std::vector<double>> rows;
  rows.push_back({0.0, out.inner_radius_t0,
                  2 * std::numbers::pi * out.inner_radius_t0});
  for (size_t i = 0; i < out.times.size(); ++i)
    rows.push_back({out.times[i], out.inner_radius[i], out.measures[i]});
  write_csv(cfg.output_dir + "/example2_measure.csv", "t,r_inner,measure",
            rows, cfg.hash());
  return out;
}

DimensionResult run_dimension_monotonicity(const ExperimentConfig& cfg) {
  DimensionResult out;
  out.caveat = "box-dimension consistency check, not a proof";
  out.times = cfg.times.empty()
                  ? std::vector<double>{0.01, 0.02, 0.03, 0.04, 0.05}
                  : cfg.times;
  Box box;
  box.lo = cfg.bbox_lo.size() == 2 ? cfg.bbox_lo : vec2(-1, -1);
  box.hi = cfg.bbox_hi.size() == 2 ? cfg.bbox_hi : vec2(1, 1);

  auto initial = [](const Eigen::VectorXd& x, double) {
    double pi = std::numbers::pi;
    return std::sin(pi * x[0]) * std::sin(pi * x[1]) +
           0.3 * std::sin(2 * pi * x[0]) * std::sin(pi * x[1]);
  };
  auto zero = [](const Eigen::VectorXd&, double) { return 0.0; };

  SolveOptions opts;
  opts.h = cfg.h;
  opts.tau = cfg.tau;
  opts.t_start = 0.0;
  opts.t_end = out.times.back();
  opts.scheme = TimeScheme::CrankNicolson;
  SpaceTimeField field =
      solve(CoefficientField::heat(2), initial, zero, box, opts);

  std::vector<double> scales;
  for (double e = 1.28; e > 0.035; e /= 2) scales.push_back(e);

  std::vector<std::vector<double>> rows;
  for (double t : out.times) {
    NodalSlice slice = extract_nodal(field, t);
    BoxDimension bd = box_dimension(slice, scales);
    out.dimensions.push_back(bd.dimension);
    out.half_widths.push_back(bd.half_width);
    rows.push_back({t, bd.dimension, bd.half_width, slice.measure});
  }
  out.consistent_with_nonincreasing = true;
  for (size_t i = 0; i < out.times.size(); ++i)
    for (size_t j = i + 1; j < out.times.size(); ++j) {
      // later time j, earlier i: require d(t_j) <= d(t_i) + band
      if (out.dimensions[j] > out.dimensions[i] + 0.15)
        out.consistent_with_nonincreasing = false;
    }
  write_csv(cfg.output_dir + "/dimension_monotonicity.csv",
            "t,box_dimension,half_width,measure", rows, cfg.hash());
  return out;
}

AngenentResult run_angenent(const ExperimentConfig& cfg) {
  Box box;
  box.lo = Eigen::VectorXd::Zero(1);
  box.hi = Eigen::VectorXd::Ones(1);
  std::mt19937 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> coefs(6);
  for (auto& c : coefs) c = gauss(rng);

  auto initial = [coefs](const Eigen::VectorXd& x, double) {
    double s = 0;
    for (size_t k = 0; k < coefs.size(); ++k)
      s += coefs[k] / (k + 1.0) * std::sin((k + 1) * std::numbers::pi * x[0]);
    return s;
  };
  auto zero = [](const Eigen::VectorXd&, double) { return 0.0; };

  SolveOptions opts;
  opts.h = std::min(cfg.h, 0.01);
  opts.tau = 1e-4;
  opts.t_start = 0.0;
  opts.t_end = 0.02;
  opts.scheme = TimeScheme::BackwardEuler;
  SpaceTimeField field =
      solve(CoefficientField::heat(1), initial, zero, box, opts);

  AngenentResult out;
  out.series = nodal_count_1d(field);
  out.pass = out.series.non_increasing;
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

LemmaRow timed(const std::string& id, const std::string& check, double tol,
               const std::function<bool()>& body) {
  LemmaRow row{id, check, tol, false, 0.0};
  auto start = Clock::now();
  try {
    row.pass = body();
  } catch (const std::exception&) {
    row.pass = false;
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return row;
}

CaloricPolynomial mixed_fixture() {
  // x1^2 + 2t + x1, 2D
  Polynomial p(2);
  p = p + Polynomial::monomial(2, {2, 0}, 0, Rational(1));
  p = p + Polynomial::monomial(2, {0, 0}, 1, Rational(2));
  p = p + Polynomial::monomial(2, {1, 0}, 0, Rational(1));
  return CaloricPolynomial(p);
}

SpaceTimeField field_from_polynomial(const CaloricPolynomial& P, double extent,
                                     double t_lo) {
  Box box;
  int n = P.dim();
  box.lo = Eigen::VectorXd::Constant(n, -extent);
  box.hi = Eigen::VectorXd::Constant(n, extent);
  auto fn = [P](const Eigen::VectorXd& x, double t) { return P.eval(x, t); };
  auto gr = [P](const Eigen::VectorXd& x, double t) { return P.gradient(x, t); };
  return SpaceTimeField::from_function(box, extent / 4, t_lo, -t_lo / 8, 9, fn,
                                       Provenance::ClosedForm, gr);
}

}  // namespace

std::vector<LemmaRow> run_lemma_suite() {
  std::vector<LemmaRow> rows;
  const double inf = std::numeric_limits<double>::infinity();

  CaloricPolynomial fixture = mixed_fixture();
  SpaceTimeField ffield = field_from_polynomial(fixture, 8.0, -4.5);
  Eigen::VectorXd origin2 = Eigen::VectorXd::Zero(2);

  rows.push_back(timed("poon_monotonicity", "N(r) non-decreasing on caloric data",
                       1e-6, [&] {
    std::vector<double> radii;
    for (double r = 0.2; r <= 1.0; r += 0.05) radii.push_back(r);
    FrequencyProfile prof = frequency_profile(ffield, origin2, 0.0, radii, inf);
    for (size_t i = 1; i < prof.samples.size(); ++i)
      if (prof.samples[i - 1].N > prof.samples[i].N + 1e-6) return false;
    return true;
  }));

  rows.push_back(timed("global_doubling", "log H(r2)/H(r1) = 2 int N/s ds",
                       1e-4, [&] {
    std::vector<double> radii;
    for (double r = 0.25; r <= 1.0; r += 0.004) radii.push_back(r);
    FrequencyProfile prof = frequency_profile(ffield, origin2, 0.0, radii, inf);
    return prof.max_doubling_residual() <= 1e-4;
  }));

  rows.push_back(timed("frequency_doubling_sandwich", "N(r) <= D(r) <= N(2r)",
                       1e-6, [&] {
    for (double r : {0.25, 0.4, 0.5}) {
      double Nr = slice_integrals(ffield, origin2, 0.0, r, inf).N();
      double N2r = slice_integrals(ffield, origin2, 0.0, 2 * r, inf).N();
      double H1 = slice_integrals(ffield, origin2, 0.0, r, inf).H;
      double H2 = slice_integrals(ffield, origin2, 0.0, 2 * r, inf).H;
      double D = std::log(H2 / H1) / std::log(4.0);
      if (!(Nr <= D + 1e-6 && D <= N2r + 1e-6)) return false;
    }
    return true;
  }));

  rows.push_back(timed("homogeneous_orthogonality",
                       "distinct-order slice products vanish", 1e-8, [&] {
    std::vector<CaloricPolynomial> polys;
    for (int d = 0; d <= 5; ++d) {
      Polynomial m = Polynomial::monomial(2, {d, 0}, 0, Rational(1));
      polys.push_back(caloric_extension(m));
    }
    for (size_t i = 0; i < polys.size(); ++i)
      for (size_t j = i + 1; j < polys.size(); ++j)
        for (double r : {0.25, 0.5, 1.0}) {
          double ip = gaussian_inner_product(polys[i], polys[j], r);
          double ni = std::sqrt(gaussian_slice_mass(polys[i], r));
          double nj = std::sqrt(gaussian_slice_mass(polys[j], r));
          if (std::abs(ip) > 1e-8 * ni * nj) return false;
        }
    return true;
  }));

  rows.push_back(timed("frequency_bound_by_order", "N^P(r) <= order(P)", 0.0,
                       [&] {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(0, 4);
    for (int trial = 0; trial < 50; ++trial) {
      Polynomial p(2);
      for (int j = 0; j < 4; ++j) {
        int d1 = deg(rng), d2 = deg(rng);
        Polynomial mono =
            Polynomial::monomial(2, {d1, d2}, 0, rational_from_double(coef(rng)));
        p = p + caloric_extension(mono).poly();
      }
      if (p.is_zero()) continue;
      CaloricPolynomial P(p);
      for (double r = 0.1; r <= 2.0; r += 0.1)
        if (polynomial_frequency(P, r) > P.degree() + 1e-9) return false;
    }
    return true;
  }));

  rows.push_back(timed("heat_kernel_remainder_rates",
                       "log-log remainder slope >= d + 0.9", 0.9, [&] {
    for (int n = 1; n <= 2; ++n)
      for (int d = 0; d <= 3; ++d) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        y[0] = 2.0;
        std::vector<double> radii;
        for (int k = 3; k <= 7; ++k) radii.push_back(std::pow(2.0, -k));
        auto rate = remainder_rate_check(y, -4.0, d, radii);
        if (rate.slope < d + 0.9) return false;
      }
    return true;
  }));

  rows.push_back(timed("maximum_principle",
                       "nonpositive data stays nonpositive (BE gauge)", 1e-12,
                       [&] {
    Box box;
    box.lo = Eigen::VectorXd::Zero(1);
    box.hi = Eigen::VectorXd::Ones(1);
    auto initial = [](const Eigen::VectorXd& x, double) {
      return -std::sin(std::numbers::pi * x[0]);
    };
    auto zero = [](const Eigen::VectorXd&, double) { return 0.0; };
    SolveOptions opts;
    opts.h = 0.02;
    opts.tau = 1e-3;
    opts.t_start = 0;
    opts.t_end = 0.1;
    opts.scheme = TimeScheme::BackwardEuler;
    SpaceTimeField f = solve(CoefficientField::heat(1), initial, zero, box, opts);
    return max_principle_check(f).max_later <= 1e-12;
  }));

  // Shared perturbed solve for the localized-frequency rows.
  Box abox;
  abox.lo = vec2(-1, -1);
  abox.hi = vec2(1, 1);
  CoefficientField perturbed = CoefficientField::perturbed_heat(2, 0.05);
  auto audit_initial = [](const Eigen::VectorXd& x, double) {
    return x[0] + 0.3 * (x[0] * x[0] - x[1] * x[1]);
  };
  auto audit_boundary = [](const Eigen::VectorXd& x, double) {
    return x[0] + 0.3 * (x[0] * x[0] - x[1] * x[1]);
  };
  SolveOptions aopts;
  aopts.h = 0.02;
  aopts.tau = 4e-4;
  aopts.t_start = -0.06;
  aopts.t_end = 0.0;
  aopts.scheme = TimeScheme::CrankNicolson;
  aopts.linear = LinearSolver::Iterative;
  SpaceTimeField afield =
      solve(perturbed, audit_initial, audit_boundary, abox, aopts);

  rows.push_back(timed("monotone_H", "H almost monotone on rescaled windows",
                       0.05, [&] {
    Eigen::MatrixXd A = matrix_sqrt(perturbed.a(origin2, 0.0));
    RescaledWindow w = make_rescaled_window(afield, origin2, 0.0, 0.2, A);
    const double R0 = 0.7;  // fixed localization ball in original units
    double prev = -1;
    for (double r : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      double z_radius = std::min(R0 / (w.ell * r), 12.0);
      double H = slice_integrals_z(afield, origin2, 0.0, w.ell * r, z_radius, A).H /
                 (w.norm * w.norm);
      if (H < prev - 0.05) return false;
      prev = H;
    }
    return true;
  }));

  rows.push_back(timed("equiv_normalizations",
                       "Q1 mean and Gaussian slice norms comparable", 50.0,
                       [&] {
    for (double x0 : {-0.1, 0.0, 0.1}) {
      Eigen::VectorXd c = vec2(x0, 0.0);
      Eigen::MatrixXd A = matrix_sqrt(perturbed.a(c, 0.0));
      RescaledWindow w = make_rescaled_window(afield, c, 0.0, 0.1, A);
      double slice_norm =
          slice_integrals_z(afield, c, 0.0, w.ell, 7.0, A).H / (w.norm * w.norm);
      // cylinder mean of the window is 1 by construction
      if (slice_norm < 1.0 / 50 || slice_norm > 50) return false;
    }
    return true;
  }));

  rows.push_back(timed("almost_monotonicity_audit",
                       "no eps-violations at perturbed coefficients", 0.05,
                       [&] {
    std::vector<Eigen::VectorXd> centers;
    for (double cx : {-0.08, 0.0, 0.08})
      for (double cy : {-0.08, 0.08}) centers.push_back(vec2(cx, cy));
    std::vector<double> radii = {0.05, 0.1, 0.15, 0.2};
    auto report =
        almost_monotonicity_audit(afield, perturbed, centers, radii, 0.05, 0.75);
    return report.violations.empty();
  }));

  rows.push_back(timed("finitely_many_pinches",
                       "frequency drops bounded along geometric scales", 8,
                       [&] {
    Polynomial p = Polynomial::constant(2, Rational(1)) +
                   Polynomial::coordinate(2, 0);
    SpaceTimeField f = field_from_polynomial(CaloricPolynomial(p), 8.0, -4.5);
    PinchScan scan = pinch_scan(f, origin2, 0.0, 1.0, 0.5, 0.2, inf, 12);
    return static_cast<int>(scan.drop_indices.size()) <= 8 &&
           !scan.plateaus.empty();
  }));

  rows.push_back(timed("tangent_uniqueness", "two-scale fits agree on Q1", 2.0,
                       [&] {
    RadialProfile profile = RadialProfile::example1();
    double t0 = 0.01;
    double rt = bisect(
        [&](double rho) { return heat_convolve(profile, t0, rho); }, 0.5, 2.0);
    Box box;
    box.lo = vec2(-3, -3);
    box.hi = vec2(3, 3);
    auto fn = [&](const Eigen::VectorXd& x, double t) {
      return heat_convolve(profile, t, x.norm());
    };
    SpaceTimeField f = SpaceTimeField::from_function(
        box, 0.5, 0.0, t0 / 8, 9, fn, Provenance::Convolution);
    Eigen::VectorXd center = vec2(rt, 0.0);
    auto fit1 = tangent_fit(f, center, t0, 0.02, 1, inf, 0.35);
    auto fit2 = tangent_fit(f, center, t0, 0.035, 1, inf, 0.35);
    double dist = tangent_distance(fit1.P, fit2.P);
    double single = std::max(fit1.sup_error_Q1, fit2.sup_error_Q1);
    return dist <= 2 * single + 1e-9;
  }));

  rows.push_back(timed("cone_splitting", "k-symmetry plus off-plane point",
                       0.1, [&] {
    Box box;
    box.lo = Eigen::VectorXd::Constant(3, -2.0);
    box.hi = Eigen::VectorXd::Constant(3, 2.0);
    auto fn = [](const Eigen::VectorXd& x, double) {
      return x[0] * x[0] + 0.01 * x[0] * x[0] * x[0];
    };
    SpaceTimeField f = SpaceTimeField::from_function(box, 0.25, -1.0, 0.25, 5,
                                                     fn, Provenance::ClosedForm);
    // 1-symmetric along e3 at the origin; the off-plane point upgrades to
    // invariance along span{e2, e3}.
    Eigen::MatrixXd V(3, 1);
    V << 0, 0, 1;
    Eigen::VectorXd y(3);
    y << 0, 0.3, 0;
    auto verdict = cone_splitting_check(f, 0.0, Eigen::VectorXd::Zero(3), V,
                                        0.1, 0.4, y, 0.05, 0.1, 3);
    return verdict.preconditions_met && verdict.splits;
  }));

  rows.push_back(timed("strata_containment", "Z_0 inside S^{n-1}_eta", 0.1,
                       [&] {
    RadialProfile profile = RadialProfile::example1();
    double t0 = 0.01;
    Box box;
    box.lo = vec2(-2, -2);
    box.hi = vec2(2, 2);
    auto fn = [&](const Eigen::VectorXd& x, double t) {
      return heat_convolve(profile, t, x.norm());
    };
    SpaceTimeField f = SpaceTimeField::from_function(
        box, 0.05, t0, t0 / 4, 2, fn, Provenance::Convolution);
    NodalSlice slice = extract_nodal(f, t0);
    auto pts = slice.sample_points(0.25);
    std::vector<Eigen::VectorXd> nodes;
    for (size_t i = 0; i < pts.size(); i += 4) nodes.push_back(pts[i]);
    if (nodes.empty()) return false;
    StratifyResult strat =
        stratify(f, t0, 1, 0.1, {0.05, 0.1, 0.2, 0.4}, nodes, 3);
    return strat.stratum.size() == nodes.size();
  }));

  return rows;
}

nlohmann::json lemma_table_json(const std::vector<LemmaRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"statement", r.id},
                   {"check", r.check},
                   {"tolerance", r.tolerance},
                   {"result", r.pass ? "pass" : "fail"},
                   {"runtime_ms", r.runtime_ms}});
  return arr;
}

}  // namespace parafreq
