#pragma once

#include "parafreq/field.hpp"

#include <functional>
#include <vector>

namespace parafreq {

enum class TimeScheme { BackwardEuler, CrankNicolson };
enum class LinearSolver { Direct, Iterative };

struct SolveOptions {
  double h = 0.05;
  double tau = 1e-3;
  double t_start = -1.0;
  double t_end = 0.0;
  TimeScheme scheme = TimeScheme::BackwardEuler;
  LinearSolver linear = LinearSolver::Direct;
  // Gauge v = e^{-lambda_hat t} u with lambda_hat = sup c, making the
  // zeroth-order term nonpositive before the M-matrix argument.
  bool gauge = true;
  bool validate = true;
};

// Implicit flux-form finite differences for
//   d_t u = div(a grad u) + b . grad u + c u
// with Dirichlet data on the box faces. Boundary rows are pinned, never
// touched by the step operator.
SpaceTimeField solve(const CoefficientField& coeffs, const ScalarFn& initial,
                     const ScalarFn& boundary, const Box& box,
                     const SolveOptions& opts);

// Max-norm of the discrete residual of the scheme, evaluated a posteriori on
// interior nodes; manufactured-solution oracle hook.
double discrete_residual(const SpaceTimeField& field,
                         const CoefficientField& coeffs, TimeScheme scheme);

struct MaxPrincipleReport {
  double max_later = 0.0;       // max over all slices after the first
  double initial_max = 0.0;     // max of the initial slice
  int interior_zero_count = 0;  // interior nodes within tol of zero
  bool strictly_negative_interior = false;
};

// Requires zero Dirichlet data and a nonpositive initial slice.
MaxPrincipleReport max_principle_check(const SpaceTimeField& field,
                                       double zero_tol = 1e-12);

// Space-time doubling ratios log_4( mean_{Q_2r} u^2 / mean_{Q_r} u^2 ) at a
// top-slice center; the sup is recorded on the field as Lambda.
std::vector<double> doubling_profile(SpaceTimeField& field,
                                     const Eigen::VectorXd& center,
                                     const std::vector<double>& radii);

// Radial initial profile f(s), s = |y|^2, piecewise polynomial.
struct RadialProfile {
  std::function<double(double)> f;
  std::vector<double> kinks;  // breakpoints in s
  bool bounded = true;
  double growth_degree = 0;   // max polynomial degree, for tail control

  // f(s) = 3/2 s - 1/2 s^2 - 1 on [0, 3/2], 1/8 beyond.
  static RadialProfile example1();
  // Example 1 extended by 1/24 (s^2 - 8 s + 15) on [2,3], with C^1 cubic
  // blending of width 2*delta at s = 3/2 and s = 2.
  static RadialProfile example2(double blend_halfwidth = 0.05);
};

// Exact heat evolution of a radial profile in the plane:
// u(x,t) = int_{R^2} f(|y|^2) rho_t(x,y) dy, reduced to a 1D integral
// against a Bessel-weighted Gaussian. Absolute quadrature error <= 1e-9.
// t <= 0 evaluates the initial data.
double heat_convolve(const RadialProfile& profile, double t, double radius);
double heat_convolve(const RadialProfile& profile, double t,
                     const Eigen::VectorXd& x);

// 1D radial heat flow in the plane (flux form in rho, cell-centered grid),
// Dirichlet zero at rho = R. Returns slices v[k][i] at rho_i = (i+1/2) h.
struct RadialSolution {
  double R = 0.0;
  double h = 0.0;
  double tau = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> slices;

  double value(double rho, double t) const;
  // Smallest positive root of v(., t), bracketed search; nan when none.
  double first_root(double t, double rho_min = 1e-6) const;
};

RadialSolution radial_solve(const std::function<double(double)>& initial_rho,
                            double R, int n_cells, double tau, double t_end);

// Full polar-grid (rho, theta) solve of the same problem; cross-validates
// the radial reduction. Returns the field sampled back on rho cells at
// theta = 0.
RadialSolution polar_solve(const std::function<double(double)>& initial_rho,
                           double R, int n_rho, int n_theta, double tau,
                           double t_end);

}  // namespace parafreq
