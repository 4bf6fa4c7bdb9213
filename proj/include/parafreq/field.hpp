#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace parafreq {

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::VectorXd& x, double margin = 0.0) const;
};

enum class Provenance { Solver, ClosedForm, Convolution };

using ScalarFn = std::function<double(const Eigen::VectorXd&, double)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

// A scalar field sampled on a uniform space-time grid over a box. Closed-form
// fields keep their defining callable alongside the samples, so integrals
// against them are not limited by grid resolution.
class SpaceTimeField {
 public:
  SpaceTimeField(Box box, double h, double t_start, double dt, int n_times,
                 Provenance provenance);

  static SpaceTimeField from_function(Box box, double h, double t_start,
                                      double dt, int n_times, ScalarFn fn,
                                      Provenance provenance = Provenance::ClosedForm,
                                      GradientFn grad = nullptr);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  double spacing() const { return h_; }
  double dt() const { return dt_; }
  int num_times() const { return static_cast<int>(times_.size()); }
  double time(int k) const { return times_.at(k); }
  double t_start() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  Provenance provenance() const { return provenance_; }
  bool has_exact() const { return static_cast<bool>(exact_); }

  const std::vector<int>& shape() const { return dims_; }
  int nodes_per_slice() const { return slice_size_; }

  double& at(int k, int flat) { return data_.at(k).at(flat); }
  double at(int k, int flat) const { return data_.at(k).at(flat); }
  const std::vector<double>& slice(int k) const { return data_.at(k); }
  std::vector<double>& slice(int k) { return data_.at(k); }

  Eigen::VectorXd node_coords(int flat) const;
  int flat_index(const std::vector<int>& idx) const;
  bool is_boundary_node(int flat) const;

  // Nearest stored slice; throws when t falls outside the time range.
  int slice_index(double t) const;

  // Field value: exact callable when available, otherwise multilinear in
  // space and linear in time.
  double value(const Eigen::VectorXd& x, double t) const;
  // Spatial gradient: exact when available, else central differences of the
  // interpolant (one-sided at the box faces).
  Eigen::VectorXd gradient(const Eigen::VectorXd& x, double t) const;

  // Measured doubling bound, attached by doubling_profile.
  std::optional<double> lambda_doubling;
  // Declared Dirichlet boundary (solver provenance).
  bool dirichlet_boundary = false;

  // Raw little-endian float64 dump plus JSON sidecar.
  void save(const std::string& path_prefix) const;
  static SpaceTimeField load(const std::string& path_prefix);

 private:
  double interp_slice(int k, const Eigen::VectorXd& x) const;

  Box box_;
  double h_;
  double dt_;
  std::vector<double> times_;
  std::vector<int> dims_;
  int slice_size_;
  std::vector<std::vector<double>> data_;
  Provenance provenance_;
  ScalarFn exact_;
  GradientFn exact_grad_;
};

// Coefficients of d_t u = div(a grad u) + b . grad u + c u with their
// ellipticity / regularity metadata.
struct CoefficientField {
  int n = 1;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> a;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> b;
  std::function<double(const Eigen::VectorXd&, double)> c;
  double lambda = 0.0;  // ellipticity / bound constant
  double alpha = 1.0;   // Hoelder exponent in (0,1]
  bool lipschitz_in_time = true;
  std::string name = "custom";

  static CoefficientField heat(int n);
  // a = (1 + lambda s(x,t)) I with s smooth, |s| <= 1/2 and parabolic
  // Lipschitz constant below 1.
  static CoefficientField perturbed_heat(int n, double lambda);
  // 1D, a = 1 + 0.1 sin(x) cos(t).
  static CoefficientField variable_1d();
  // Isotropic a = phi(x,t) I with phi sampled on a grid.
  static CoefficientField tabulated(const SpaceTimeField& phi, double lambda,
                                    double alpha);
};

struct CoefficientViolation {
  std::string what;
  Eigen::VectorXd x;
  double t;
};

// Samples the declared bounds over the grid; empty result means the field
// passes. ellipticity: (1+lambda)^{-1} I <= a <= (1+lambda) I, |b|,|c| <=
// lambda, and the parabolic modulus of continuity of a.
std::vector<CoefficientViolation> validate_coefficients(
    const CoefficientField& coeffs, const Box& box, double h,
    const std::vector<double>& times, unsigned seed = 7);

}  // namespace parafreq
