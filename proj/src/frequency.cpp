#include "parafreq/frequency.hpp"

#include "parafreq/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace parafreq {

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0) throw std::domain_error("coefficient matrix not positive");
    ev[i] = std::sqrt(ev[i]);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double RescaledWindow::eval(const Eigen::VectorXd& y, double s) const {
  return field->value(x + ell * (A * y), t + ell * ell * s) / norm;
}

Eigen::VectorXd RescaledWindow::grad(const Eigen::VectorXd& y, double s) const {
  Eigen::VectorXd g = field->gradient(x + ell * (A * y), t + ell * ell * s);
  return ell * (A.transpose() * g) / norm;
}

RescaledWindow make_rescaled_window(const SpaceTimeField& field,
                                    const Eigen::VectorXd& x, double t,
                                    double ell, const Eigen::MatrixXd& A_opt) {
  RescaledWindow w;
  w.field = &field;
  w.x = x;
  w.t = t;
  w.ell = ell;
  w.A = A_opt.size() == 0
            ? Eigen::MatrixXd::Identity(field.dim(), field.dim()).eval()
            : A_opt;
  w.norm = 1.0;
  double m = cylinder_mean(
      field.dim(), Eigen::VectorXd::Zero(field.dim()), 0.0, 1.0,
      [&](const Eigen::VectorXd& y, double s) {
        double v = w.eval(y, s);
        return v * v;
      });
  if (m <= 0) throw std::domain_error("window normalizer vanishes");
  w.norm = std::sqrt(m);
  return w;
}

CoefficientField rescaled_coefficients(const CoefficientField& base,
                                       const Eigen::VectorXd& x, double t,
                                       double ell) {
  Eigen::MatrixXd A = matrix_sqrt(base.a(x, t));
  Eigen::MatrixXd Ainv = A.inverse();
  CoefficientField out = base;
  out.name = base.name + "_rescaled";
  out.a = [base, x, t, ell, A, Ainv](const Eigen::VectorXd& y, double s) {
    return (Ainv * base.a(x + ell * (A * y), t + ell * ell * s) * Ainv).eval();
  };
  out.b = [base, x, t, ell, A, Ainv](const Eigen::VectorXd& y, double s) {
    return (ell * (Ainv * base.b(x + ell * (A * y), t + ell * ell * s))).eval();
  };
  out.c = [base, x, t, ell](const Eigen::VectorXd& y, double s) {
    Eigen::MatrixXd A2 = matrix_sqrt(base.a(x, t));
    return ell * ell * base.c(x + ell * (A2 * y), t + ell * ell * s);
  };
  return out;
}

namespace {

constexpr double kTailRadius = 12.0;

// Shared kernel of the slice integrals: integrate u^2 and 2 r^2 |A^T grad u|^2
// against the standard slice Gaussian over |z| < z_radius, where the chart is
// x = x0 + r A z and the slice is t = t0 - r^2.
SliceIntegrals integrate_slice(const SpaceTimeField& field,
                               const Eigen::VectorXd& x0, double t0, double r,
                               double z_radius, const Eigen::MatrixXd& A_in) {
  int n = field.dim();
  Eigen::MatrixXd A =
      A_in.size() == 0 ? Eigen::MatrixXd::Identity(n, n).eval() : A_in;
  double t_slice = t0 - r * r;

  SliceIntegrals out;
  bool whole_space = field.has_exact() && z_radius >= kTailRadius;
  if (whole_space) {
    // y = 2z turns the slice Gaussian into exp(-|z|^2); tensor Gauss-Hermite.
    const double pref = std::pow(std::numbers::pi, -n / 2.0);
    const QuadratureRule& gh = gauss_hermite(28);
    size_t m = gh.nodes.size();
    size_t total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    Eigen::VectorXd z(n);
    for (size_t flat = 0; flat < total; ++flat) {
      size_t rem = flat;
      double w = pref;
      for (int i = 0; i < n; ++i) {
        size_t k = rem % m;
        rem /= m;
        z[i] = gh.nodes[k];
        w *= gh.weights[k];
      }
      Eigen::VectorXd x = x0 + 2.0 * r * (A * z);
      double u = field.value(x, t_slice);
      Eigen::VectorXd g = A.transpose() * field.gradient(x, t_slice);
      out.H += w * u * u;
      out.E += w * 2 * r * r * g.squaredNorm();
    }
    return out;
  }

  // Truncated ball |y| < z_radius with the slice weight in the integrand.
  double gpref = std::pow(4 * std::numbers::pi, -n / 2.0);
  auto fH = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = x0 + r * (A * y);
    double u = field.value(x, t_slice);
    return gpref * std::exp(-y.squaredNorm() / 4) * u * u;
  };
  auto fE = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = x0 + r * (A * y);
    Eigen::VectorXd g = A.transpose() * field.gradient(x, t_slice);
    return gpref * std::exp(-y.squaredNorm() / 4) * g.squaredNorm();
  };
  int pts = field.has_exact() ? 48 : 40;
  out.H = ball_integrate(n, z_radius, fH, pts);
  out.E = 2 * r * r * ball_integrate(n, z_radius, fE, pts);
  return out;
}

}  // namespace

SliceIntegrals slice_integrals_z(const SpaceTimeField& field,
                                 const Eigen::VectorXd& x0, double t0,
                                 double scale, double z_radius,
                                 const Eigen::MatrixXd& A) {
  return integrate_slice(field, x0, t0, scale, z_radius, A);
}

SliceIntegrals slice_integrals(const SpaceTimeField& field,
                               const Eigen::VectorXd& x0, double t0, double r,
                               double R0, const Eigen::MatrixXd& A) {
  if (r <= 0) throw std::domain_error("slice radius must be positive");
  if (!field.has_exact()) {
    if (t0 - r * r < field.t_start() - 0.51 * field.dt())
      throw std::domain_error("slice time outside the stored range");
  }
  double z_radius = std::min(R0 / r, kTailRadius);
  // Spatial reach must stay inside the domain for sampled fields.
  if (!field.has_exact()) {
    Eigen::MatrixXd Am =
        A.size() == 0 ? Eigen::MatrixXd::Identity(field.dim(), field.dim()).eval() : A;
    double reach = r * z_radius * Am.operatorNorm();
    for (int i = 0; i < field.dim(); ++i) {
      double margin = std::min(x0[i] - field.box().lo[i],
                               field.box().hi[i] - x0[i]);
      if (reach > margin + 1e-12)
        throw std::domain_error("localization ball leaves the spatial domain");
    }
  }
  SliceIntegrals out = integrate_slice(field, x0, t0, r, z_radius, A);
  if (out.H < 1e-280)
    throw std::runtime_error("slice mass underflow (vanishing window)");
  return out;
}

double FrequencyProfile::max_doubling_residual() const {
  double m = 0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.doubling_residual));
  return m;
}

void FrequencyProfile::write_csv(const std::string& path) const {
  std::ofstream os(path);
  os << "r,H,E,N,D,global_doubling_residual\n";
  for (const auto& s : samples) {
    os << s.r << "," << s.H << "," << s.E << "," << s.N << ",";
    if (s.D) os << *s.D;
    os << "," << s.doubling_residual << "\n";
  }
}

FrequencyProfile frequency_profile(const SpaceTimeField& field,
                                   const Eigen::VectorXd& x0, double t0,
                                   const std::vector<double>& radii, double R0,
                                   const Eigen::MatrixXd& A) {
  if (radii.size() < 2)
    throw std::invalid_argument("need at least two radii for a profile");
  FrequencyProfile prof;
  prof.center = x0;
  prof.t0 = t0;
  prof.R0 = R0;
  std::vector<double> rs = radii;
  std::sort(rs.begin(), rs.end());
  for (double r : rs) {
    SliceIntegrals si = slice_integrals(field, x0, t0, r, R0, A);
    FrequencySample s;
    s.r = r;
    s.H = si.H;
    s.E = si.E;
    s.N = si.N();
    bool have_2r = true;
    if (!field.has_exact() && t0 - 4 * r * r < field.t_start() - 0.51 * field.dt())
      have_2r = false;
    if (have_2r) {
      try {
        SliceIntegrals s2 = slice_integrals(field, x0, t0, 2 * r, R0, A);
        s.D = std::log(s2.H / si.H) / std::log(4.0);
      } catch (const std::domain_error&) {
        // 2r cylinder leaves the domain; doubling index omitted
      }
    }
    prof.samples.push_back(s);
  }
  // Cumulative trapezoid residual of log H(r)/H(r_min) = 2 int N/s ds.
  for (size_t i = 1; i < prof.samples.size(); ++i) {
    double acc = 0;
    for (size_t j = 1; j <= i; ++j) {
      const auto& a = prof.samples[j - 1];
      const auto& b = prof.samples[j];
      acc += (b.r - a.r) * 0.5 * (a.N / a.r + b.N / b.r);
    }
    prof.samples[i].doubling_residual =
        std::log(prof.samples[i].H / prof.samples[0].H) - 2 * acc;
  }
  return prof;
}

AuditReport almost_monotonicity_audit(const SpaceTimeField& field,
                                      const CoefficientField& coeffs,
                                      const std::vector<Eigen::VectorXd>& centers,
                                      const std::vector<double>& radii,
                                      double eps, double R0) {
  AuditReport report;
  std::vector<double> rs = radii;
  std::sort(rs.begin(), rs.end());
  for (const auto& x : centers) {
    Eigen::MatrixXd A = matrix_sqrt(coeffs.a(x, 0.0));
    std::vector<double> N(rs.size());
    for (size_t i = 0; i < rs.size(); ++i)
      N[i] = slice_integrals(field, x, 0.0, rs[i], R0, A).N();
    ++report.centers_checked;
    for (size_t i = 0; i < rs.size(); ++i)
      for (size_t j = i + 1; j < rs.size(); ++j) {
        ++report.pairs_checked;
        if (N[i] > N[j] + eps)
          report.violations.push_back({x, rs[i], rs[j], N[i], N[j]});
      }
    // Small-frequency windows: flatness of u over Q_r.
    for (size_t i = 0; i < rs.size(); ++i) {
      if (N[i] > eps) continue;
      double r = rs[i];
      double a0 = cylinder_mean(field.dim(), x, 0.0, r,
                                [&](const Eigen::VectorXd& y, double t) {
                                  return field.value(y, t);
                                });
      if (a0 == 0) continue;
      double dev = 0;
      const int steps = 8;
      Eigen::VectorXd y(field.dim());
      std::function<void(int)> sweep = [&](int d) {
        if (d == field.dim()) {
          if ((y - x).norm() >= r) return;
          for (int k = 0; k <= steps; ++k) {
            double t = -r * r * k / steps;
            dev = std::max(dev, std::abs(field.value(y, t) - a0));
          }
          return;
        }
        for (int k = 0; k <= steps; ++k) {
          y[d] = x[d] - r + 2.0 * r * k / steps;
          sweep(d + 1);
        }
      };
      sweep(0);
      report.flatness.push_back(
          {x, r, N[i], a0, dev, dev / (std::sqrt(eps) * std::abs(a0))});
      break;  // one observation per center is enough
    }
  }
  return report;
}

PinchScan pinch_scan(const SpaceTimeField& field, const Eigen::VectorXd& x0,
                     double t0, double r, double ratio, double delta, double R0,
                     int max_scales, const Eigen::MatrixXd& A) {
  if (ratio <= 0 || ratio >= 1)
    throw std::invalid_argument("scale ratio must lie in (0,1)");
  PinchScan scan;
  double cur = r;
  for (int i = 0; i < max_scales; ++i, cur *= ratio) {
    try {
      SliceIntegrals si = slice_integrals(field, x0, t0, cur, R0, A);
      scan.scales.push_back(cur);
      scan.N.push_back(si.N());
    } catch (const std::exception&) {
      break;  // slice left the domain or mass underflowed
    }
  }
  for (size_t i = 0; i + 1 < scan.N.size(); ++i)
    if (std::abs(scan.N[i] - scan.N[i + 1]) >= delta)
      scan.drop_indices.push_back(static_cast<int>(i));
  // Plateaus: maximal runs without a drop.
  size_t start = 0;
  auto close_plateau = [&](size_t end) {
    if (end < start) return;
    PinchScan::Plateau p;
    p.first = static_cast<int>(start);
    p.last = static_cast<int>(end);
    double sum = 0;
    for (size_t k = start; k <= end; ++k) sum += scan.N[k];
    p.mean_N = sum / (end - start + 1);
    p.nearest_integer = static_cast<int>(std::lround(p.mean_N));
    p.integer_distance = std::abs(p.mean_N - p.nearest_integer);
    scan.plateaus.push_back(p);
  };
  for (int idx : scan.drop_indices) {
    close_plateau(idx);
    start = idx + 1;
  }
  if (!scan.N.empty()) close_plateau(scan.N.size() - 1);
  return scan;
}

namespace {

// Sample points of Q_1 = B_1 x (-1, 0] for fits and sup norms.
std::vector<std::pair<Eigen::VectorXd, double>> q1_samples(int n, int steps) {
  std::vector<std::pair<Eigen::VectorXd, double>> pts;
  Eigen::VectorXd y(n);
  std::function<void(int)> rec = [&](int d) {
    if (d == n) {
      if (y.norm() >= 1.0) return;
      for (int k = 0; k <= steps; ++k) pts.emplace_back(y, -1.0 + double(k) / steps);
      return;
    }
    for (int k = 0; k <= steps; ++k) {
      y[d] = -1.0 + 2.0 * k / steps;
      rec(d + 1);
    }
  };
  rec(0);
  return pts;
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

}  // namespace

TangentFit tangent_fit(const SpaceTimeField& field, const Eigen::VectorXd& x0,
                       double t0, double r, int d, double R0,
                       double plateau_delta, const Eigen::MatrixXd& A) {
  double N = slice_integrals(field, x0, t0, r, R0, A).N();
  if (std::abs(N - d) > plateau_delta)
    throw std::domain_error("no frequency plateau at the requested order");

  RescaledWindow w = make_rescaled_window(field, x0, t0, r, A);
  int n = field.dim();
  std::vector<CaloricPolynomial> basis;
  for (const auto& m : spatial_monomials(n, d)) basis.push_back(caloric_extension(m));
  int nb = static_cast<int>(basis.size());

  auto pts = q1_samples(n, 10);
  int np = static_cast<int>(pts.size());
  Eigen::MatrixXd M(np, nb);
  Eigen::VectorXd rhs(np);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < nb; ++j) M(i, j) = basis[j].eval(pts[i].first, pts[i].second);
    rhs[i] = w.eval(pts[i].first, pts[i].second);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < nb)
    throw std::runtime_error("degenerate window: rank-deficient normal equations");
  Eigen::VectorXd coef = qr.solve(rhs);

  Polynomial fitted(n);
  for (int j = 0; j < nb; ++j)
    fitted = fitted + basis[j].poly().scaled(rational_from_double(coef[j]));
  CaloricPolynomial P(fitted);
  if (P.is_zero())
    throw std::runtime_error("degenerate window: zero fit");
  CaloricPolynomial Pn = normalize_cylinder(P);

  TangentFit out{Pn, 0.0, 0.0, N};
  for (const auto& [y, s] : pts) {
    double diff = std::abs(w.eval(y, s) - Pn.eval(y, s));
    out.sup_error_Q1 = std::max(out.sup_error_Q1, diff);
    if (s == 0.0) out.sup_error_slice = std::max(out.sup_error_slice, diff);
  }
  return out;
}

double tangent_distance(const CaloricPolynomial& P1,
                        const CaloricPolynomial& P2) {
  auto pts = q1_samples(P1.dim(), 10);
  double sup = 0;
  for (const auto& [y, s] : pts)
    sup = std::max(sup, std::abs(P1.eval(y, s) - P2.eval(y, s)));
  return sup;
}

}  // namespace parafreq
