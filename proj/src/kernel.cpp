#include "parafreq/kernel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace parafreq {

double parabolic_norm(const Eigen::VectorXd& x, double t) {
  return std::sqrt(x.squaredNorm() + std::abs(t));
}

double parabolic_norm_eta(const Eigen::VectorXd& x, double t, double eta) {
  return std::max(x.norm() / eta, std::sqrt(std::abs(t)));
}

double heat_kernel(const Eigen::VectorXd& x, double t,
                   const Eigen::VectorXd& y, double s) {
  if (s > t) return 0.0;
  int n = static_cast<int>(x.size());
  double dt = t - s;
  double d2 = (x - y).squaredNorm();
  if (dt == 0.0)
    return d2 == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::pow(4 * std::numbers::pi * dt, -n / 2.0) * std::exp(-d2 / (4 * dt));
}

std::vector<double> kernel_derivatives_1d(double x, double tau, int max_order) {
  if (tau <= 0) throw std::domain_error("kernel derivatives need tau > 0");
  double u = x / (2 * std::sqrt(tau));
  double g = std::pow(4 * std::numbers::pi * tau, -0.5) * std::exp(-u * u);
  // Physicists' Hermite recurrence: H_{m+1} = 2u H_m - 2m H_{m-1}.
  std::vector<double> H(max_order + 1);
  H[0] = 1.0;
  if (max_order >= 1) H[1] = 2 * u;
  for (int m = 1; m < max_order; ++m)
    H[m + 1] = 2 * u * H[m] - 2 * m * H[m - 1];
  std::vector<double> out(max_order + 1);
  double scale = 1.0;
  double inv = -1.0 / (2 * std::sqrt(tau));  // (-1)^m (4 tau)^{-m/2}
  for (int m = 0; m <= max_order; ++m) {
    out[m] = scale * H[m] * g;
    scale *= inv;
  }
  return out;
}

double kernel_spatial_derivative(const Eigen::VectorXd& z, double tau,
                                 const std::vector<int>& mu) {
  double v = 1.0;
  for (int i = 0; i < static_cast<int>(z.size()); ++i) {
    auto d = kernel_derivatives_1d(z[i], tau, mu[i]);
    v *= d[mu[i]];
  }
  return v;
}

double GreenExpansion::eval(const Eigen::VectorXd& x, double t) const {
  double sum = 0;
  for (const auto& P : components) sum += P.eval(x, t);
  return sum;
}

double GreenExpansion::remainder(const Eigen::VectorXd& x, double t) const {
  return heat_kernel(x, t, source_y, source_s) - eval(x, t);
}

nlohmann::json GreenExpansion::to_json() const {
  nlohmann::json j;
  std::vector<double> y(source_y.data(), source_y.data() + source_y.size());
  j["source"] = {{"y", y}, {"s", source_s}};
  j["order"] = order;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& P : components) comps.push_back(P.to_json());
  j["components"] = comps;
  return j;
}

namespace {

void enumerate_multiindices(int n, int degree, std::vector<int>& mu, int pos,
                            const std::function<void(const std::vector<int>&)>& emit) {
  if (pos == n - 1) {
    mu[pos] = degree;
    emit(mu);
    return;
  }
  for (int k = 0; k <= degree; ++k) {
    mu[pos] = k;
    enumerate_multiindices(n, degree - k, mu, pos + 1, emit);
  }
}

}  // namespace

GreenExpansion expand_kernel(const Eigen::VectorXd& y, double s, int d) {
  if (s >= 0) throw std::domain_error("expansion source must have s < 0");
  if (y.norm() == 0 && s == 0)
    throw std::domain_error("expansion source must differ from the origin");
  int n = static_cast<int>(y.size());
  double tau = -s;
  Eigen::VectorXd z = -y;

  GreenExpansion exp;
  exp.source_y = y;
  exp.source_s = s;
  exp.order = d;
  // Per-coordinate derivative tables up to the top order.
  std::vector<std::vector<double>> tables(n);
  for (int i = 0; i < n; ++i) tables[i] = kernel_derivatives_1d(z[i], tau, d);

  for (int k = 0; k <= d; ++k) {
    Polynomial pk(n);
    std::vector<int> mu(n, 0);
    enumerate_multiindices(n, k, mu, 0, [&](const std::vector<int>& m) {
      double deriv = 1.0;
      BigInt mu_fact(1);
      for (int i = 0; i < n; ++i) {
        deriv *= tables[i][m[i]];
        mu_fact *= factorial(m[i]);
      }
      if (deriv == 0.0) return;
      Rational coef = rational_from_double(deriv) / Rational(mu_fact);
      pk = pk + Polynomial::monomial(n, m, 0, coef);
    });
    // The caloric extension of the degree-k slice reproduces the parabolic
    // Taylor component exactly: the time coefficients satisfy the same
    // recursion D_t = Laplace that the kernel itself does.
    exp.components.push_back(caloric_extension(pk));
  }
  return exp;
}

RemainderRateReport remainder_rate_check(const Eigen::VectorXd& y, double s,
                                         int d, const std::vector<double>& radii,
                                         double eta) {
  if (radii.size() < 2)
    throw std::invalid_argument("need at least two radii for a rate fit");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] >= radii[i - 1])
      throw std::invalid_argument("radii must be strictly decreasing");
  double source_norm = parabolic_norm_eta(y, s, eta);
  for (double r : radii) {
    double cyl_norm = std::max(r / eta, r);  // sup of the eta-norm over Q_r
    if (source_norm < 2 * cyl_norm)
      throw std::invalid_argument(
          "2:1 separation violated between source and cylinder");
  }

  GreenExpansion exp = expand_kernel(y, s, d);
  int n = static_cast<int>(y.size());
  const int steps = 8;

  RemainderRateReport report;
  report.radii = radii;
  for (double r : radii) {
    double sup = 0;
    Eigen::VectorXd x(n);
    std::vector<int> idx(n, 0);
    auto visit = [&](auto&& self, int dim) -> void {
      if (dim == n) {
        if (x.norm() >= r) return;
        for (int k = 0; k <= steps; ++k) {
          double t = -r * r * k / steps;
          sup = std::max(sup, std::abs(exp.remainder(x, t)));
        }
        return;
      }
      for (int k = 0; k <= steps; ++k) {
        x[dim] = -r + 2.0 * r * k / steps;
        self(self, dim + 1);
      }
    };
    visit(visit, 0);
    report.sups.push_back(sup);
  }

  // Least-squares slope of log sup against log r.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = static_cast<int>(radii.size());
  for (int i = 0; i < m; ++i) {
    double lx = std::log(radii[i]);
    double ly = std::log(std::max(report.sups[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  report.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return report;
}

SourceDecayReport remainder_source_decay(const Eigen::VectorXd& y, double s,
                                         int d, double r,
                                         const std::vector<double>& scales) {
  if (scales.size() < 2)
    throw std::invalid_argument("need at least two scales");
  int n = static_cast<int>(y.size());
  std::vector<double> vals, grads;
  const double fd = 1e-4;
  for (double L : scales) {
    Eigen::VectorXd yL = L * y;
    double sL = L * L * s;
    GreenExpansion exp = expand_kernel(yL, sL, d);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, r / (2 * std::sqrt(n)));
    double t = -r * r / 2;
    vals.push_back(std::abs(exp.remainder(x, t)));
    // grad_y via central differences: both the kernel and the expansion
    // coefficients depend on the source.
    double g2 = 0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd yp = yL, ym = yL;
      yp[i] += fd;
      ym[i] -= fd;
      double rp = expand_kernel(yp, sL, d).remainder(x, t);
      double rm = expand_kernel(ym, sL, d).remainder(x, t);
      double gi = (rp - rm) / (2 * fd);
      g2 += gi * gi;
    }
    grads.push_back(std::sqrt(g2));
  }
  auto fit = [&](const std::vector<double>& v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = static_cast<int>(scales.size());
    for (int i = 0; i < m; ++i) {
      double lx = std::log(scales[i]);
      double ly = std::log(std::max(v[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };
  return {fit(vals), fit(grads)};
}

}  // namespace parafreq
