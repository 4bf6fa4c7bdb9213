#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "parafreq/lab.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

using namespace parafreq;

TEST_CASE("config round trip, validation, stable hash") {
  ExperimentConfig cfg;
  cfg.name = "demo";
  cfg.scenario = "example1";
  cfg.times = {0.005, 0.01};
  cfg.seed = 42;
  auto j = cfg.to_json();
  ExperimentConfig back = ExperimentConfig::from_json(j);
  CHECK(back.name == "demo");
  CHECK(back.seed == 42);
  CHECK(back.hash() == cfg.hash());

  ExperimentConfig other = cfg;
  other.seed = 43;
  CHECK(other.hash() != cfg.hash());

  nlohmann::json bad = cfg.to_json();
  bad["coefficients"] = "nonsense";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = cfg.to_json();
  bad["tol"] = -1.0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
  bad = cfg.to_json();
  bad["times"] = {0.02, 0.01};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), std::invalid_argument);
}

TEST_CASE("example 1: radius grows from the unit circle") {
  ExperimentConfig cfg;
  cfg.scenario = "example1";
  cfg.times = {0.005, 0.01, 0.02};
  cfg.output_dir = ".";
  Example1Result r = run_example1(cfg);

  CHECK(std::abs(r.r0 - 1.0) <= 1e-3);
  CHECK(r.f_at_one == doctest::Approx(0.0));
  CHECK(r.radial_derivative == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.time_derivative == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(r.strictly_increasing);
  REQUIRE(r.radii.size() == 3);
  CHECK(r.radii[0] > 1.0);

  // CSV rows carry the config hash.
  std::ifstream is("example1_measure.csv");
  std::string header, row;
  std::getline(is, header);
  CHECK(header.find("config_hash") != std::string::npos);
  std::getline(is, row);
  CHECK(row.find(cfg.hash()) != std::string::npos);
}

TEST_CASE("example 2 profile: outer quadratic vanishes at s = 3 and s = 5") {
  // (s^2 - 8s + 15)/24 has roots 3 and 5; only s = 3 sits at the disk edge.
  auto outer = [](double s) { return (s * s - 8 * s + 15) / 24.0; };
  CHECK(outer(3.0) == doctest::Approx(0.0));
  CHECK(outer(5.0) == doctest::Approx(0.0));
  RadialProfile p = RadialProfile::example2();
  CHECK(p.f(3.0) == doctest::Approx(0.0));
  CHECK(p.f(2.9) > 0.0);
  CHECK(p.f(1.0) == doctest::Approx(0.0));
  // Blending keeps the profile C^1 at the splice points.
  for (double s0 : {1.45, 1.55, 1.95, 2.05}) {
    double ds = 1e-6;
    double left = (p.f(s0) - p.f(s0 - ds)) / ds;
    double right = (p.f(s0 + ds) - p.f(s0)) / ds;
    CHECK(left == doctest::Approx(right).epsilon(1e-2));
  }
}

TEST_CASE("example 2: inner nodal circle expands, rim stays positive") {
  ExperimentConfig cfg;
  cfg.scenario = "example2";
  cfg.times = {0.005, 0.01, 0.02};
  cfg.output_dir = ".";
  Example2Result r = run_example2(cfg);

  CHECK(std::abs(r.inner_radius_t0 - 1.0) <= 5e-3);
  CHECK(r.measure_increasing);
  CHECK(r.boundary_positive);
  CHECK(r.cross_check_diff < 5e-3);
}

TEST_CASE("dimension monotonicity run is consistent") {
  ExperimentConfig cfg;
  cfg.scenario = "dimension";
  cfg.h = 0.04;
  cfg.tau = 5e-4;
  cfg.times = {0.01, 0.03, 0.05};
  cfg.output_dir = ".";
  DimensionResult r = run_dimension_monotonicity(cfg);
  REQUIRE(r.dimensions.size() == 3);
  for (double d : r.dimensions) CHECK(std::abs(d - 1.0) <= 0.2);
  CHECK(r.consistent_with_nonincreasing);
  CHECK(r.caveat.find("not a proof") != std::string::npos);
}

TEST_CASE("angenent scenario: counts non-increasing") {
  ExperimentConfig cfg;
  cfg.scenario = "angenent1d";
  cfg.seed = 7;
  AngenentResult r = run_angenent(cfg);
  CHECK(r.pass);
  CHECK(r.series.counts.size() > 1);
}

TEST_CASE("determinism: same seed, same outputs") {
  ExperimentConfig cfg;
  cfg.seed = 11;
  AngenentResult a = run_angenent(cfg);
  AngenentResult b = run_angenent(cfg);
  CHECK(a.series.counts == b.series.counts);
}

TEST_CASE("lemma suite covers the mapped statements and passes") {
  auto rows = run_lemma_suite();
  std::set<std::string> ids;
  for (const auto& r : rows) ids.insert(r.id);
  const std::vector<std::string> expected = {
      "poon_monotonicity",        "global_doubling",
      "frequency_doubling_sandwich", "homogeneous_orthogonality",
      "frequency_bound_by_order", "heat_kernel_remainder_rates",
      "maximum_principle",        "monotone_H",
      "equiv_normalizations",     "almost_monotonicity_audit",
      "finitely_many_pinches",    "tangent_uniqueness",
      "cone_splitting",           "strata_containment"};
  for (const auto& id : expected) {
    CAPTURE(id);
    CHECK(ids.count(id) == 1);
  }
  for (const auto& r : rows) {
    CAPTURE(r.id);
    CHECK(r.pass);
  }
  nlohmann::json j = lemma_table_json(rows);
  CHECK(j.size() == rows.size());
  CHECK(j[0].contains("statement"));
  CHECK(j[0].contains("runtime_ms"));
}
