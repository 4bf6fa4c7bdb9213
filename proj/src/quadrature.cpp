#include "parafreq/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace parafreq {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag,
                            const Eigen::VectorXd& offdiag, double mu0) {
  int m = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) J(i, i) = diag[i];
  for (int i = 0; i + 1 < m; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

std::map<int, QuadratureRule>& cache(int which) {
  static std::map<int, QuadratureRule> hermite, legendre;
  return which == 0 ? hermite : legendre;
}

std::mutex cache_mutex;

}  // namespace

const QuadratureRule& gauss_hermite(int m) {
  if (m < 1) throw std::invalid_argument("quadrature order must be positive");
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& c = cache(0);
  auto it = c.find(m);
  if (it != c.end()) return it->second;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd off(m - 1 > 0 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) off[k - 1] = std::sqrt(k / 2.0);
  auto rule = golub_welsch(diag, off, std::sqrt(std::numbers::pi));
  return c.emplace(m, std::move(rule)).first->second;
}

const QuadratureRule& gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("quadrature order must be positive");
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& c = cache(1);
  auto it = c.find(m);
  if (it != c.end()) return it->second;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd off(m - 1 > 0 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  auto rule = golub_welsch(diag, off, 2.0);
  return c.emplace(m, std::move(rule)).first->second;
}

QuadratureRule scale_to(const QuadratureRule& base, double a, double b) {
  QuadratureRule r;
  r.nodes.resize(base.nodes.size());
  r.weights.resize(base.weights.size());
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t i = 0; i < base.nodes.size(); ++i) {
    r.nodes[i] = mid + half * base.nodes[i];
    r.weights[i] = half * base.weights[i];
  }
  return r;
}

double ball_volume(int n, double R) {
  switch (n) {
    case 1: return 2 * R;
    case 2: return std::numbers::pi * R * R;
    case 3: return 4.0 / 3.0 * std::numbers::pi * R * R * R;
    default: throw std::invalid_argument("ball_volume: dimension out of range");
  }
}

double ball_integrate(int n, double R,
                      const std::function<double(const Eigen::VectorXd&)>& f,
                      int points_per_dim) {
  if (n < 1 || n > 3) throw std::invalid_argument("ball_integrate: n must be 1..3");
  const QuadratureRule& gl = gauss_legendre(points_per_dim);
  Eigen::VectorXd x(n);
  double sum = 0;
  if (n == 1) {
    auto r1 = scale_to(gl, -R, R);
    for (size_t i = 0; i < r1.nodes.size(); ++i) {
      x[0] = r1.nodes[i];
      sum += r1.weights[i] * f(x);
    }
    return sum;
  }
  if (n == 2) {
    auto ry = scale_to(gl, -R, R);
    for (size_t j = 0; j < ry.nodes.size(); ++j) {
      double y = ry.nodes[j];
      double w = std::sqrt(std::max(0.0, R * R - y * y));
      if (w <= 0) continue;
      auto rx = scale_to(gl, -w, w);
      double inner = 0;
      for (size_t i = 0; i < rx.nodes.size(); ++i) {
        x[0] = rx.nodes[i];
        x[1] = y;
        inner += rx.weights[i] * f(x);
      }
      sum += ry.weights[j] * inner;
    }
    return sum;
  }
  auto rz = scale_to(gl, -R, R);
  for (size_t k = 0; k < rz.nodes.size(); ++k) {
    double z = rz.nodes[k];
    double rho = std::sqrt(std::max(0.0, R * R - z * z));
    if (rho <= 0) continue;
    auto ry = scale_to(gl, -rho, rho);
    double mid = 0;
    for (size_t j = 0; j < ry.nodes.size(); ++j) {
      double y = ry.nodes[j];
      double w = std::sqrt(std::max(0.0, rho * rho - y * y));
      if (w <= 0) continue;
      auto rx = scale_to(gl, -w, w);
      double inner = 0;
      for (size_t i = 0; i < rx.nodes.size(); ++i) {
        x[0] = rx.nodes[i];
        x[1] = y;
        x[2] = z;
        inner += rx.weights[i] * f(x);
      }
      mid += ry.weights[j] * inner;
    }
    sum += rz.weights[k] * mid;
  }
  return sum;
}

double cylinder_mean(int n, const Eigen::VectorXd& center, double t0, double r,
                     const std::function<double(const Eigen::VectorXd&, double)>& f,
                     int space_points, int time_points) {
  auto rt = scale_to(gauss_legendre(time_points), t0 - r * r, t0);
  double total = 0;
  for (size_t k = 0; k < rt.nodes.size(); ++k) {
    double t = rt.nodes[k];
    auto slice = [&](const Eigen::VectorXd& y) {
      return f(center + y, t);
    };
    total += rt.weights[k] * ball_integrate(n, r, slice, space_points);
  }
  return total / (ball_volume(n, r) * r * r);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  struct Impl {
    const std::function<double(double)>& f;
    double recurse(double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
      double m = 0.5 * (a + b);
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6 * (fa + 4 * flm + fm);
      double right = (b - m) / 6 * (fm + 4 * frm + fb);
      double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15 * tol)
        return left + right + delta / 15;
      return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) +
             recurse(m, b, fm, frm, fb, right, tol / 2, depth - 1);
    }
  } impl{f};
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return impl.recurse(a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace parafreq
