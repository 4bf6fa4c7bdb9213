#pragma once

#include "parafreq/field.hpp"
#include "parafreq/nodal.hpp"
#include "parafreq/solver.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace parafreq {

struct ExperimentConfig {
  std::string name = "experiment";
  std::string scenario = "custom";  // example1 | example2 | angenent1d |
                                    // monotonicity_audit | stratification |
                                    // dimension | custom
  double h = 0.02;
  double tau = 2.5e-4;
  Eigen::VectorXd bbox_lo;
  Eigen::VectorXd bbox_hi;
  std::string coefficients = "heat";
  std::vector<double> times;
  double tol = 1e-3;
  std::string output_dir = ".";
  unsigned seed = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // FNV-1a of the canonical dump; stamped on every emitted CSV row.
  std::string hash() const;
  void validate() const;
};

struct Example1Result {
  std::vector<double> times;
  std::vector<double> radii;     // r_t
  std::vector<double> measures;  // 2 pi r_t
  double r0 = 0.0;
  double f_at_one = 0.0;          // slice value at s=1, t=0
  double radial_derivative = 0.0; // d/ds of the profile at s=1
  double time_derivative = 0.0;   // d/dt of u at |x|=1, t->0+
  bool strictly_increasing = false;
};

Example1Result run_example1(const ExperimentConfig& cfg);

struct Example2Result {
  std::vector<double> times;
  std::vector<double> inner_radius;
  std::vector<double> measures;
  bool measure_increasing = false;
  bool boundary_positive = false;   // u > 0 on the outer annulus
  double cross_check_diff = 0.0;    // radial vs polar solve
  double inner_radius_t0 = 0.0;     // nodal circle of the initial data
};

Example2Result run_example2(const ExperimentConfig& cfg);

struct DimensionResult {
  std::vector<double> times;
  std::vector<double> dimensions;  // -inf sentinel for empty slices
  std::vector<double> half_widths;
  bool consistent_with_nonincreasing = false;
  std::string caveat;  // consistency check, not a proof
};

DimensionResult run_dimension_monotonicity(const ExperimentConfig& cfg);

struct AngenentResult {
  NodalCountSeries series;
  bool pass = false;
};

AngenentResult run_angenent(const ExperimentConfig& cfg);

struct LemmaRow {
  std::string id;         // statement key
  std::string check;      // what was verified
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
};

// One row per mapped statement; every fixture is generated internally.
std::vector<LemmaRow> run_lemma_suite();

nlohmann::json lemma_table_json(const std::vector<LemmaRow>& rows);

// CSV with a trailing config_hash column on every row.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows,
               const std::string& config_hash);

}  // namespace parafreq
