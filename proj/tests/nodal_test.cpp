#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "parafreq/nodal.hpp"
#include "parafreq/solver.hpp"

#include <cmath>
#include <numbers>

using namespace parafreq;

namespace {

Box boxn(int n, double lo, double hi) {
  Box b;
  b.lo = Eigen::VectorXd::Constant(n, lo);
  b.hi = Eigen::VectorXd::Constant(n, hi);
  return b;
}

SpaceTimeField static_field(int n, double lo, double hi, double h,
                            const std::function<double(const Eigen::VectorXd&)>& g) {
  auto fn = [g](const Eigen::VectorXd& x, double) { return g(x); };
  return SpaceTimeField::from_function(boxn(n, lo, hi), h, 0.0, 0.1, 2, fn);
}

}  // namespace

TEST_CASE("1D roots by sign-change interpolation") {
  auto f = static_field(1, 0, 1, 0.01, [](const Eigen::VectorXd& x) {
    return std::sin(2 * std::numbers::pi * x[0]);
  });
  NodalSlice s = extract_nodal(f, 0.0);
  // Interior crossing at x = 1/2 (endpoints are lattice zeros, tie-broken
  // positive so they produce no interior sign change on their own).
  bool found_half = false;
  for (double p : s.points)
    if (std::abs(p - 0.5) < 1e-9) found_half = true;
  CHECK(found_half);
}

TEST_CASE("2D line: length 2 within 2h") {
  double h = 0.1;
  auto f = static_field(2, -1, 1, h, [](const Eigen::VectorXd& x) {
    return x[0];
  });
  NodalSlice s = extract_nodal(f, 0.0);
  CHECK(std::abs(s.measure - 2.0) <= 2 * h);
  for (const auto& seg : s.segments) {
    CHECK(std::abs(seg[0][0]) <= 1e-12);
    CHECK(std::abs(seg[1][0]) <= 1e-12);
  }
}

TEST_CASE("2D circle: circumference converges first order") {
  auto circle = [](const Eigen::VectorXd& x) {
    return x.squaredNorm() - 0.25;
  };
  auto measure_at = [&](double h) {
    return extract_nodal(static_field(2, -1, 1, h, circle), 0.0).measure;
  };
  // Element endpoints sit on the curve up to the interpolation tolerance.
  {
    double h = 0.05;
    NodalSlice s = extract_nodal(static_field(2, -1, 1, h, circle), 0.0);
    for (const auto& seg : s.segments)
      for (const auto& p : seg)
        CHECK(std::abs(p.squaredNorm() - 0.25) <= 2 * h * h);
  }
  double m1 = measure_at(0.05);
  double m2 = measure_at(0.025);
  CHECK(std::abs(m1 - std::numbers::pi) <= 0.15);
  CHECK(std::abs(m2 - std::numbers::pi) <= 0.08);
  // Refinement consistency: measure change controlled by h.
  CHECK(std::abs(m1 - m2) <= 10 * 0.05);
}

TEST_CASE("3D sphere: area within tolerance") {
  auto sphere = [](const Eigen::VectorXd& x) {
    return x.squaredNorm() - 0.25;
  };
  NodalSlice s = extract_nodal(static_field(3, -1, 1, 0.05, sphere), 0.0);
  CHECK(std::abs(s.measure - std::numbers::pi) <= 0.1);
}

TEST_CASE("identically vanishing slice is flagged") {
  auto f = static_field(2, -1, 1, 0.25, [](const Eigen::VectorXd&) {
    return 0.0;
  });
  NodalSlice s = extract_nodal(f, 0.0);
  CHECK(s.identically_zero);
}

TEST_CASE("singular points found at a saddle") {
  auto f = static_field(2, -1, 1, 0.05, [](const Eigen::VectorXd& x) {
    return x[0] * x[0] - x[1] * x[1];
  });
  NodalSlice s = extract_nodal(f, 0.0);
  bool origin_found = false;
  for (const auto& p : s.singular_points)
    if (p.norm() <= 0.06) origin_found = true;
  CHECK(origin_found);
  CHECK(s.tol_u > 0);
  CHECK(s.tol_g > 0);
}

TEST_CASE("box dimension of line, circle, point") {
  std::vector<double> scales{0.64, 0.32, 0.16, 0.08, 0.04, 0.02};
  auto line = extract_nodal(static_field(2, -1, 1, 0.02,
                                         [](const Eigen::VectorXd& x) {
                                           return x[0];
                                         }),
                            0.0);
  BoxDimension bd_line = box_dimension(line, scales);
  CHECK(std::abs(bd_line.dimension - 1.0) <= 0.1);

  auto circle = extract_nodal(static_field(2, -1, 1, 0.02,
                                           [](const Eigen::VectorXd& x) {
                                             return x.squaredNorm() - 0.25;
                                           }),
                              0.0);
  BoxDimension bd_circ = box_dimension(circle, scales);
  CHECK(std::abs(bd_circ.dimension - 1.0) <= 0.1);
  // Count table recorded on the slice; N(eps) grows as eps shrinks.
  REQUIRE(circle.box_counts.size() == scales.size());
  for (size_t i = 1; i < circle.box_counts.size(); ++i) {
    CHECK(circle.box_counts[i].first < circle.box_counts[i - 1].first);
    CHECK(circle.box_counts[i].second >= circle.box_counts[i - 1].second);
  }

  NodalSlice point;
  point.dim = 2;
  point.segments.push_back({Eigen::Vector2d(0.3, 0.3), Eigen::Vector2d(0.3, 0.3)});
  BoxDimension bd_pt = box_dimension(point, scales);
  CHECK(std::abs(bd_pt.dimension - 0.0) <= 0.1);

  NodalSlice empty;
  empty.dim = 2;
  BoxDimension bd_empty = box_dimension(empty, scales);
  CHECK(bd_empty.empty);
  CHECK(std::isinf(bd_empty.dimension));
  CHECK(bd_empty.dimension < 0);

  CHECK_THROWS_AS(box_dimension(line, {0.1, 0.05, 0.025}), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(line, {0.1, 0.09, 0.08, 0.07}),
                  std::invalid_argument);
}

TEST_CASE("symmetry: linear slice is (n-1)-symmetric at the origin") {
  auto f = static_field(2, -2, 2, 0.1, [](const Eigen::VectorXd& x) {
    return x[0];
  });
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  SymmetryReport rep = symmetry_test(f, 0.0, origin, 0.5, 1, 0.05, 3);
  CHECK(rep.verdict);
  CHECK(rep.deviation <= 1e-6);
  CHECK(rep.order == 1);
  // The invariance plane is the x2-axis; the fit depends on x1 only.
  CHECK(shift_invariance_defect(rep.P, rep.V) <= 1e-9);
  CHECK(std::abs(rep.V(0, 0)) <= 1e-6);

  // Scale invariance of the verdict: u -> 3u.
  auto f3 = static_field(2, -2, 2, 0.1, [](const Eigen::VectorXd& x) {
    return 3 * x[0];
  });
  SymmetryReport rep3 = symmetry_test(f3, 0.0, origin, 0.5, 1, 0.05, 3);
  CHECK(rep3.deviation == doctest::Approx(rep.deviation).epsilon(1e-8));
}

TEST_CASE("symmetry: saddle is 0-symmetric but not 1-symmetric") {
  auto f = static_field(2, -2, 2, 0.1, [](const Eigen::VectorXd& x) {
    return x[0] * x[0] - x[1] * x[1];
  });
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  SymmetryReport k0 = symmetry_test(f, 0.0, origin, 0.5, 0, 0.05, 3);
  CHECK(k0.verdict);  // exactly homogeneous of order 2
  CHECK(k0.order == 2);

  SymmetryReport k1 = symmetry_test(f, 0.0, origin, 0.5, 1, 0.1, 3);
  CHECK_FALSE(k1.verdict);
  CHECK(k1.deviation > 0.1);

  // Full symmetry fails even harder at a nodal point: the normalized window
  // vanishes at the origin while the constant candidate is +-1.
  SymmetryReport kn = symmetry_test(f, 0.0, origin, 0.5, 2, 0.45, 3);
  CHECK_FALSE(kn.verdict);
  CHECK(kn.deviation >= 0.5);
}

TEST_CASE("stratification of the linear slice") {
  auto f = static_field(2, -2, 2, 0.1, [](const Eigen::VectorXd& x) {
    return x[0];
  });
  std::vector<Eigen::VectorXd> nodes;
  for (double x1 : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
    Eigen::VectorXd p(2);
    p << x1, 0.3;
    nodes.push_back(p);
  }
  StratifyResult res =
      stratify(f, 0.0, 1, 0.1, {0.02, 0.05, 0.1, 0.2, 0.4}, nodes, 2);
  // S^{n-1}: exactly the points on the hyperplane x1 = 0.
  REQUIRE(res.stratum.size() == 1);
  CHECK(std::abs(res.stratum[0][0]) <= 1e-12);
}

TEST_CASE("stratum of the saddle concentrates at the origin") {
  auto f = static_field(2, -2, 2, 0.1, [](const Eigen::VectorXd& x) {
    return x[0] * x[0] - x[1] * x[1];
  });
  std::vector<Eigen::VectorXd> nodes;
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  nodes.push_back(origin);
  Eigen::VectorXd on_line(2);
  on_line << 0.5, 0.5;  // smooth point of the nodal set
  nodes.push_back(on_line);
  Eigen::VectorXd off(2);
  off << 0.6, 0.1;  // u != 0 here
  nodes.push_back(off);

  StratifyResult s0 =
      stratify(f, 0.0, 0, 0.1, {0.02, 0.05, 0.1, 0.2, 0.4}, nodes, 2);
  REQUIRE(s0.stratum.size() == 1);
  CHECK(s0.stratum[0].norm() <= 1e-12);

  // Stratum monotonicity: S^0 within S^1 on the same nodes.
  StratifyResult s1 =
      stratify(f, 0.0, 1, 0.1, {0.02, 0.05, 0.1, 0.2, 0.4}, nodes, 2);
  for (const auto& p : s0.stratum) {
    bool found = false;
    for (const auto& q : s1.stratum)
      if ((p - q).norm() <= 1e-12) found = true;
    CHECK(found);
  }
}

TEST_CASE("cone splitting: exact and perturbed upgrades") {
  // u = x1^2 in 3D: 1-symmetric along e3 at the origin; the off-plane point
  // (0, 0.3, 0) is exactly 0-symmetric, upgrading to invariance along
  // span{e2, e3}.
  auto f = static_field(3, -2, 2, 0.25, [](const Eigen::VectorXd& x) {
    return x[0] * x[0];
  });
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd V(3, 1);
  V << 0, 0, 1;
  Eigen::VectorXd y(3);
  y << 0, 0.3, 0;
  auto verdict = cone_splitting_check(f, 0.0, origin, V, 0.1, 0.4, y, 0.05,
                                      0.1, 2);
  CHECK(verdict.preconditions_met);
  CHECK(verdict.splits);

  // Perturbed variant keeps the verdict at eta = 0.1.
  auto g = static_field(3, -2, 2, 0.25, [](const Eigen::VectorXd& x) {
    return x[0] * x[0] + 0.01 * x[0] * x[0] * x[0];
  });
  auto verdict2 = cone_splitting_check(g, 0.0, origin, V, 0.1, 0.4, y, 0.05,
                                       0.1, 3);
  CHECK(verdict2.preconditions_met);
  CHECK(verdict2.splits);

  // A secondary point on x + V is rejected: nothing new to span.
  Eigen::VectorXd on_axis(3);
  on_axis << 0, 0, 0.3;
  auto verdict3 = cone_splitting_check(f, 0.0, origin, V, 0.1, 0.4, on_axis,
                                       0.05, 0.1, 2);
  CHECK_FALSE(verdict3.preconditions_met);
}

TEST_CASE("1D nodal counts: eigenfunctions and Sturmian runs") {
  auto zero = [](const Eigen::VectorXd&, double) { return 0.0; };
  // Exact first eigenfunction: no interior sign change at any time.
  auto e1 = [](const Eigen::VectorXd& x, double t) {
    double pi = std::numbers::pi;
    return std::exp(-pi * pi * t) * std::sin(pi * x[0]);
  };
  SpaceTimeField f1 = SpaceTimeField::from_function(boxn(1, 0, 1), 0.02, 0.0,
                                                    0.01, 5, e1);
  NodalCountSeries s1 = nodal_count_1d(f1);
  for (int c : s1.counts) CHECK(c == 0);

  // Second eigenfunction: exactly one interior crossing, at all times.
  auto e2 = [](const Eigen::VectorXd& x, double t) {
    double pi = std::numbers::pi;
    return std::exp(-4 * pi * pi * t) * std::sin(2 * pi * x[0]);
  };
  SpaceTimeField f2 = SpaceTimeField::from_function(boxn(1, 0, 1), 0.02, 0.0,
                                                    0.01, 5, e2);
  NodalCountSeries s2 = nodal_count_1d(f2);
  for (int c : s2.counts) CHECK(c == 1);
  CHECK(s2.non_increasing);

  // Mixed modes under the solver: counts are non-increasing.
  auto initial = [](const Eigen::VectorXd& x, double) {
    double pi = std::numbers::pi;
    return std::sin(3 * pi * x[0]) + 0.3 * std::sin(pi * x[0]);
  };
  SolveOptions opts;
  opts.h = 0.005;
  opts.tau = 1e-4;
  opts.t_start = 0;
  opts.t_end = 0.05;
  opts.scheme = TimeScheme::BackwardEuler;
  SpaceTimeField f =
      solve(CoefficientField::heat(1), initial, zero, boxn(1, 0, 1), opts);
  NodalCountSeries s = nodal_count_1d(f);
  CHECK(s.non_increasing);
  CHECK(s.counts.front() == 2);
  CHECK(s.counts.back() <= 2);
}

TEST_CASE("symmetry error paths") {
  auto z = static_field(2, -1, 1, 0.25, [](const Eigen::VectorXd&) {
    return 0.0;
  });
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(symmetry_test(z, 0.0, origin, 0.5, 1, 0.1, 2),
                  std::domain_error);
  auto f = static_field(2, -1, 1, 0.25, [](const Eigen::VectorXd& x) {
    return x[0];
  });
  CHECK_THROWS_AS(symmetry_test(f, 0.0, origin, 1.5, 1, 0.1, 2),
                  std::domain_error);
  CHECK_THROWS_AS(symmetry_test(f, 0.0, origin, 0.5, 5, 0.1, 2),
                  std::invalid_argument);
}

TEST_CASE("nodal slice CSV export") {
  auto f = static_field(2, -1, 1, 0.1, [](const Eigen::VectorXd& x) {
    return x[0];
  });
  NodalSlice s = extract_nodal(f, 0.0);
  s.write_csv("nodal_test.csv");
  std::ifstream is("nodal_test.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "x0,y0,x1,y1");
}
