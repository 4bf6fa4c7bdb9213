// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include "parafreq/caloric.hpp"
#include "parafreq/frequency.hpp"
#include "parafreq/kernel.hpp"
#include "parafreq/lab.hpp"
#include "parafreq/nodal.hpp"
#include "parafreq/quadrature.hpp"
#include "parafreq/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

using namespace parafreq;

namespace {

const double kInf = std::numeric_limits<double>::infinity();
int failures = 0;

void criterion(int number, const char* label, double budget_s,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  bool in_budget = secs < budget_s;
  if (!ok || !in_budget) ++failures;
  std::printf("[%s] criterion %d: %s (%.1f s / budget %.0f s)%s%s\n",
              ok && in_budget ? "PASS" : "FAIL", number, label, secs, budget_s,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

std::vector<Polynomial> spatial_monomials(int n, int degree) {
  std::vector<Polynomial> out;
  std::vector<int> mu(n, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      mu[pos] = left;
      out.push_back(Polynomial::monomial(n, mu, 0, Rational(1)));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      mu[pos] = k;
      rec(pos + 1, left - k);
    }
  };
  rec(0, degree);
  return out;
}

SpaceTimeField polynomial_field(const CaloricPolynomial& P) {
  Box b;
  b.lo = Eigen::VectorXd::Constant(P.dim(), -8.0);
  b.hi = Eigen::VectorXd::Constant(P.dim(), 8.0);
  auto fn = [P](const Eigen::VectorXd& x, double t) { return P.eval(x, t); };
  auto gr = [P](const Eigen::VectorXd& x, double t) { return P.gradient(x, t); };
  return SpaceTimeField::from_function(b, 1.0, -4.5, 0.5, 10, fn,
                                       Provenance::ClosedForm, gr);
}

double nodal_radius(const RadialProfile& profile, double t) {
  double a = 0.5, b = 2.0;
  double fa = heat_convolve(profile, t, a);
  for (int it = 0; it < 70; ++it) {
    double m = 0.5 * (a + b);
    double fm = heat_convolve(profile, t, m);
    if (fa * fm <= 0)
      b = m;
    else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

SpaceTimeField example1_field(double t_lo, double dt, int nt, double extent,
                              double h) {
  RadialProfile profile = RadialProfile::example1();
  Box b;
  b.lo = Eigen::VectorXd::Constant(2, -extent);
  b.hi = Eigen::VectorXd::Constant(2, extent);
  auto fn = [profile](const Eigen::VectorXd& x, double t) {
    return heat_convolve(profile, t, x.norm());
  };
  return SpaceTimeField::from_function(b, h, t_lo, dt, nt, fn,
                                       Provenance::Convolution);
}

bool c1_caloric_oracles(std::string& detail) {
  // Exact heat residual, all dimensions and orders up to 6.
  for (int n = 1; n <= 3; ++n)
    for (int d = 0; d <= 6; ++d)
      for (const auto& m : spatial_monomials(n, d))
        if (!caloric_extension(m).poly().heat_residual().is_zero()) {
          detail = "nonzero heat residual";
          return false;
        }

  // Pairwise orthogonality of distinct orders.
  for (int n = 1; n <= 3; ++n) {
    std::vector<CaloricPolynomial> reps;
    for (int d = 0; d <= 6; ++d) {
      Polynomial p(n);
      for (const auto& m : spatial_monomials(n, d))
        p = p + m;  // one representative per order with all monomials
      reps.push_back(caloric_extension(p));
    }
    for (size_t i = 0; i < reps.size(); ++i)
      for (size_t j = i + 1; j < reps.size(); ++j)
        for (double r : {0.25, 0.5, 1.0}) {
          double ip = std::abs(gaussian_inner_product(reps[i], reps[j], r));
          double scale = std::sqrt(gaussian_slice_mass(reps[i], r) *
                                   gaussian_slice_mass(reps[j], r));
          if (ip > 1e-8 * scale) {
            detail = "orthogonality defect";
            return false;
          }
        }
  }

  // Homogeneous frequency pins to the order.
  for (int n = 1; n <= 3; ++n)
    for (int d = 0; d <= 6; ++d) {
      Polynomial p(n);
      for (const auto& m : spatial_monomials(n, d)) p = p + m;
      CaloricPolynomial P = caloric_extension(p);
      for (double r = 0.1; r <= 1.0 + 1e-12; r += 0.05)
        if (std::abs(polynomial_frequency(P, r) - d) > 1e-6) {
          detail = "homogeneous frequency off its order";
          return false;
        }
    }

  // 50 random caloric polynomials: N <= degree, monotone handled elsewhere.
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + trial % 3;
    Polynomial p(n);
    for (int j = 0; j < 3; ++j) {
      auto monos = spatial_monomials(n, deg(rng));
      std::uniform_int_distribution<size_t> pick(0, monos.size() - 1);
      p = p + caloric_extension(monos[pick(rng)]).poly().scaled(
                  rational_from_double(coef(rng)));
    }
    if (p.is_zero()) continue;
    CaloricPolynomial P(p);
    for (double r = 0.1; r <= 1.0 + 1e-12; r += 0.09)
      if (polynomial_frequency(P, r) > P.degree() + 1e-9) {
        detail = "frequency exceeds the order";
        return false;
      }
  }
  return true;
}

bool c2_frequency_identities(std::string& detail) {
  std::vector<CaloricPolynomial> fixtures;
  {
    Polynomial p = caloric_extension(Polynomial::monomial(2, {2, 0}, 0, Rational(1)))
                       .poly() +
                   Polynomial::coordinate(2, 0);
    fixtures.emplace_back(p);
    Polynomial q = Polynomial::constant(1, Rational(1)) +
                   caloric_extension(Polynomial::monomial(1, {3}, 0, Rational(1)))
                       .poly()
                       .scaled(Rational(1, 4));
    fixtures.emplace_back(q);
    Polynomial w = caloric_extension(Polynomial::monomial(3, {1, 1, 0}, 0, Rational(1)))
                       .poly() +
                   Polynomial::coordinate(3, 2).scaled(Rational(2));
    fixtures.emplace_back(w);
  }
  for (const auto& P : fixtures) {
    SpaceTimeField f = polynomial_field(P);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(P.dim());

    for (double r : {0.35, 0.55, 0.75}) {
      double dr = 1e-3;
      double Hp = slice_integrals(f, c, 0.0, r + dr, kInf).H;
      double Hm = slice_integrals(f, c, 0.0, r - dr, kInf).H;
      auto si = slice_integrals(f, c, 0.0, r, kInf);
      double lhs = (Hp - Hm) / (2 * dr);
      double rhs = 2 * si.E / r;
      if (std::abs(lhs - rhs) > 1e-4 * std::abs(rhs)) {
        detail = "H'(r) = 2E/r identity failed";
        return false;
      }
    }

    std::vector<double> radii;
    for (double r = 0.25; r <= 1.0 + 1e-12; r += 0.004) radii.push_back(r);
    FrequencyProfile prof = frequency_profile(f, c, 0.0, radii, kInf);
    if (prof.max_doubling_residual() > 1e-4) {
      detail = "global doubling residual too large";
      return false;
    }
    for (const auto& s : prof.samples) {
      if (!s.D) continue;
      double N2r = slice_integrals(f, c, 0.0, 2 * s.r, kInf).N();
      if (!(s.N <= *s.D + 1e-6 && *s.D <= N2r + 1e-6)) {
        detail = "frequency/doubling sandwich failed";
        return false;
      }
    }
  }
  return true;
}

bool c3_example1(std::string& detail) {
  ExperimentConfig cfg;
  cfg.scenario = "example1";
  cfg.times = {0.005, 0.01, 0.02};
  cfg.output_dir = ".";
  Example1Result r = run_example1(cfg);
  if (std::abs(r.r0 - 1.0) > 1e-3) {
    detail = "r0 off the unit circle";
    return false;
  }
  if (!r.strictly_increasing) {
    detail = "r_t not strictly increasing";
    return false;
  }
  if (std::abs(r.f_at_one) > 1e-9) {
    detail = "f(1,0) nonzero";
    return false;
  }
  if (std::abs(r.radial_derivative - 0.5) > 1e-6) {
    detail = "radial derivative off 1/2";
    return false;
  }
  if (std::abs(r.time_derivative + 2.0) > 1e-3) {
    detail = "initial time derivative off -2";
    return false;
  }
  return true;
}

bool c4_max_principle(std::string& detail) {
  std::mt19937 rng(404);
  std::normal_distribution<double> gauss(0, 1);
  auto zero = [](const Eigen::VectorXd&, double) { return 0.0; };

  for (int trial = 0; trial < 100; ++trial) {
    int n = trial < 50 ? 1 : 2;
    std::vector<double> c(4);
    for (auto& v : c) v = gauss(rng);
    auto initial = [&c, n](const Eigen::VectorXd& x, double) {
      double s = 0;
      for (size_t k = 0; k < c.size(); ++k) {
        double mode = 1;
        for (int i = 0; i < n; ++i)
          mode *= std::sin((k + 1) * std::numbers::pi * x[i]);
        s += c[k] * mode;
      }
      return -std::abs(s);
    };
    Box box;
    box.lo = Eigen::VectorXd::Zero(n);
    box.hi = Eigen::VectorXd::Ones(n);
    SolveOptions opts;
    opts.h = n == 1 ? 0.01 : 0.025;
    opts.tau = 1e-3;
    opts.t_start = 0;
    opts.t_end = n == 1 ? 0.05 : 0.02;
    opts.scheme = TimeScheme::BackwardEuler;
    opts.gauge = true;
    SpaceTimeField f =
        solve(CoefficientField::heat(n), initial, zero, box, opts);
    auto rep = max_principle_check(f);
    if (rep.max_later > 1e-12) {
      detail = "positive value after a nonpositive start";
      return false;
    }
  }
  return true;
}

bool c5_angenent(std::string& detail) {
  for (unsigned seed = 1; seed <= 100; ++seed) {
    ExperimentConfig cfg;
    cfg.scenario = "angenent1d";
    cfg.seed = seed;
    AngenentResult r = run_angenent(cfg);
    if (!r.pass) {
      detail = "nodal count increased at seed " + std::to_string(seed);
      return false;
    }
  }
  return true;
}

bool c6_audit(std::string& detail) {
  Box box;
  box.lo = Eigen::VectorXd::Constant(2, -1.0);
  box.hi = Eigen::VectorXd::Constant(2, 1.0);
  CoefficientField coeffs = CoefficientField::perturbed_heat(2, 0.05);
  auto initial = [](const Eigen::VectorXd& x, double) {
    return x[0] + 0.3 * (x[0] * x[0] - x[1] * x[1]);
  };
  SolveOptions opts;
  opts.h = 0.01;
  opts.tau = 4e-4;
  opts.t_start = -0.06;
  opts.t_end = 0.0;
  opts.scheme = TimeScheme::CrankNicolson;
  opts.linear = LinearSolver::Iterative;
  SpaceTimeField f = solve(coeffs, initial, initial, box, opts);

  std::vector<Eigen::VectorXd> centers;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      Eigen::VectorXd c(2);
      c << -0.1 + 0.05 * i, -0.1 + 0.05 * j;
      centers.push_back(c);
    }
  std::vector<double> radii = {0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.2};
  AuditReport rep = almost_monotonicity_audit(f, coeffs, centers, radii, 0.05,
                                              0.75);
  if (!rep.violations.empty()) {
    const auto& v = rep.violations.front();
    detail = "violation N(" + std::to_string(v.r1) + ")=" +
             std::to_string(v.N1) + " > N(" + std::to_string(v.r2) + ")=" +
             std::to_string(v.N2) + " + eps (" +
             std::to_string(rep.violations.size()) + " total)";
    return false;
  }
  return true;
}

bool c7_remainder_rates(std::string& detail) {
  std::vector<double> radii;
  for (int k = 3; k <= 7; ++k) radii.push_back(std::pow(2.0, -k));
  for (int n = 1; n <= 2; ++n)
    for (int d = 0; d <= 3; ++d) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      y[0] = 2.0;
      auto rate = remainder_rate_check(y, -4.0, d, radii);
      if (rate.slope < d + 0.9) {
        detail = "slope " + std::to_string(rate.slope) + " at n=" +
                 std::to_string(n) + ", d=" + std::to_string(d);
        return false;
      }
    }
  return true;
}

bool c8_stratification(std::string& detail) {
  double t0 = 0.01;
  SpaceTimeField f = example1_field(t0, t0 / 4, 2, 2.0, 0.05);
  NodalSlice slice = extract_nodal(f, t0);
  if (slice.segments.empty()) {
    detail = "no nodal set extracted";
    return false;
  }
  auto pts = slice.sample_points(0.1);
  std::vector<Eigen::VectorXd> nodes;
  for (size_t i = 0; i < pts.size(); i += 2) nodes.push_back(pts[i]);
  std::vector<double> scales = {0.05, 0.1, 0.2, 0.4};
  StratifyResult strat = stratify(f, t0, 1, 0.1, scales, nodes, 3);
  if (strat.stratum.size() != nodes.size()) {
    detail = std::to_string(nodes.size() - strat.stratum.size()) +
             " nodal points escaped S^{n-1}";
    return false;
  }

  // Conversely: (n, 0.1)-symmetric probe points stay off the nodal set.
  RadialProfile profile = RadialProfile::example1();
  double rt = nodal_radius(profile, t0);
  for (double x1 = -1.4; x1 <= 1.4 + 1e-9; x1 += 0.2)
    for (double x2 = -1.4; x2 <= 1.4 + 1e-9; x2 += 0.2) {
      Eigen::VectorXd p(2);
      p << x1, x2;
      bool symmetric = false;
      try {
        symmetric = symmetry_test(f, t0, p, 0.2, 2, 0.1, 2).verdict;
      } catch (const std::domain_error&) {
        continue;
      }
      if (symmetric && std::abs(p.norm() - rt) < 0.05) {
        detail = "symmetric point on the nodal circle";
        return false;
      }
    }
  return true;
}

bool c9_tangent_stability(std::string& detail) {
  double t0 = 0.01;
  RadialProfile profile = RadialProfile::example1();
  double rt = nodal_radius(profile, t0);
  SpaceTimeField f = example1_field(0.0, t0 / 8, 9, 3.0, 0.5);
  for (int k = 0; k < 10; ++k) {
    double theta = 2 * std::numbers::pi * k / 10;
    Eigen::VectorXd x(2);
    x << rt * std::cos(theta), rt * std::sin(theta);
    TangentFit f1 = tangent_fit(f, x, t0, 0.02, 1, kInf, 0.35);
    TangentFit f2 = tangent_fit(f, x, t0, 0.035, 1, kInf, 0.35);
    double dist = tangent_distance(f1.P, f2.P);
    double single = std::max(f1.sup_error_Q1, f2.sup_error_Q1);
    if (dist > 2 * single) {
      detail = "fits diverge at angle index " + std::to_string(k) +
               " (dist " + std::to_string(dist) + ", single " +
               std::to_string(single) + ")";
      return false;
    }
  }
  return true;
}

bool c10_dimension(std::string& detail) {
  ExperimentConfig cfg;
  cfg.scenario = "dimension";
  cfg.h = 0.02;
  cfg.tau = 2.5e-4;
  cfg.times = {0.01, 0.02, 0.03, 0.04, 0.05};
  cfg.output_dir = ".";
  DimensionResult r = run_dimension_monotonicity(cfg);
  if (!r.consistent_with_nonincreasing) {
    detail = "dimension estimates increase beyond the band";
    return false;
  }
  if (r.caveat.find("not a proof") == std::string::npos) {
    detail = "missing consistency-check caveat";
    return false;
  }
  detail = "consistency check, not a proof";
  return true;
}

}  // namespace

int main() {
  std::printf("parafreq acceptance suite\n");
  criterion(1, "caloric oracle suite", 30, c1_caloric_oracles);
  criterion(2, "frequency identities on caloric fixtures", 60,
            c2_frequency_identities);
  criterion(3, "Example 1 reproduction", 60, c3_example1);
  criterion(4, "discrete maximum principle (100 runs)", 120, c4_max_principle);
  criterion(5, "Angenent monotonicity (100 runs)", 120, c5_angenent);
  criterion(6, "almost-monotonicity audit", 180, c6_audit);
  criterion(7, "Green expansion remainder rates", 30, c7_remainder_rates);
  criterion(8, "stratification containment", 120, c8_stratification);
  criterion(9, "tangent-map stability", 60, c9_tangent_stability);
  criterion(10, "dimension-monotonicity desk check", 180, c10_dimension);
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
