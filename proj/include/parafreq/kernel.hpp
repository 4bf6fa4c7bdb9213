#pragma once

#include "parafreq/caloric.hpp"

#include <nlohmann/json_fwd.hpp>

#include <vector>

namespace parafreq {

// Parabolic norms. |(x,t)| = (|x|^2 + |t|)^{1/2}; the eta variant is
// max(|x|/eta, sqrt(|t|)) and drives the 2:1 separation condition below.
double parabolic_norm(const Eigen::VectorXd& x, double t);
double parabolic_norm_eta(const Eigen::VectorXd& x, double t, double eta);

// G(x,t;y,s) = (4 pi (t-s))^{-n/2} exp(-|x-y|^2 / (4(t-s))); zero for s > t,
// +infinity signalled at the diagonal singularity s = t, x = y.
double heat_kernel(const Eigen::VectorXd& x, double t,
                   const Eigen::VectorXd& y, double s);

// D^m G / dx^m for the 1D kernel at (x, tau), tau > 0, all m <= max_order.
// Hermite recurrence; no nested finite differences.
std::vector<double> kernel_derivatives_1d(double x, double tau, int max_order);

// Mixed spatial derivative D^mu_x G at (z, tau) in n dimensions.
double kernel_spatial_derivative(const Eigen::VectorXd& z, double tau,
                                 const std::vector<int>& mu);

// Parabolic Taylor data of G(.,.;y,s) at (0,0): components[k] is the
// homogeneous caloric polynomial of order k.
struct GreenExpansion {
  Eigen::VectorXd source_y;
  double source_s = 0.0;
  int order = 0;
  std::vector<CaloricPolynomial> components;

  double eval(const Eigen::VectorXd& x, double t) const;
  double remainder(const Eigen::VectorXd& x, double t) const;
  // Components in the caloric polynomial JSON schema.
  nlohmann::json to_json() const;
};

GreenExpansion expand_kernel(const Eigen::VectorXd& y, double s, int d);

struct RemainderRateReport {
  std::vector<double> radii;
  std::vector<double> sups;  // sup_{Q_r} |G - sum P^k|
  double slope = 0.0;        // log-log fit
};

// Fits the decay rate of the expansion remainder over shrinking backward
// cylinders Q_r. Radii must decrease strictly and keep the 2:1 eta-norm
// separation from the source.
RemainderRateReport remainder_rate_check(const Eigen::VectorXd& y, double s,
                                         int d, const std::vector<double>& radii,
                                         double eta = 1.0);

struct SourceDecayReport {
  double value_exponent = 0.0;     // fitted decay of sup |R| in the source scale
  double gradient_exponent = 0.0;  // same for |grad_y R|
};

// Scales the source parabolically, (y,s) -> (L y, L^2 s), and fits the decay
// of the remainder and of its y-gradient (central differences) in L.
SourceDecayReport remainder_source_decay(const Eigen::VectorXd& y, double s,
                                         int d, double r,
                                         const std::vector<double>& scales);

}  // namespace parafreq
