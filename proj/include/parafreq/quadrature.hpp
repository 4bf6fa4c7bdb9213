#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace parafreq {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Weight exp(-x^2) on the real line (Golub-Welsch).
const QuadratureRule& gauss_hermite(int m);

// Legendre rule on [-1,1]; scale_to maps it onto [a,b].
const QuadratureRule& gauss_legendre(int m);
QuadratureRule scale_to(const QuadratureRule& base, double a, double b);

// Integral of f over the ball |x| < R in dimension n (n <= 3), nested
// Gauss-Legendre with exact section limits.
double ball_integrate(int n, double R,
                      const std::function<double(const Eigen::VectorXd&)>& f,
                      int points_per_dim = 48);

double ball_volume(int n, double R);

// Mean value of f over the backward unit cylinder Q_r(center) =
// B_r(x) x (t0 - r^2, t0].
double cylinder_mean(int n, const Eigen::VectorXd& center, double t0, double r,
                     const std::function<double(const Eigen::VectorXd&, double)>& f,
                     int space_points = 32, int time_points = 16);

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

}  // namespace parafreq
