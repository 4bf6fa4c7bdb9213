#pragma once

#include "parafreq/polynomial.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace parafreq {

// A polynomial solution of dP/dt = Laplace(P), validated at construction
// (the heat residual must cancel exactly).
class CaloricPolynomial {
 public:
  explicit CaloricPolynomial(Polynomial p);

  const Polynomial& poly() const { return poly_; }
  int dim() const { return poly_.dim(); }
  int degree() const { return degree_; }  // parabolic degree; -1 for zero
  bool homogeneous() const { return homogeneous_; }
  bool is_zero() const { return poly_.is_zero(); }

  double eval(const Eigen::VectorXd& x, double t) const {
    return poly_.eval(x, t);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x, double t) const;

  CaloricPolynomial scaled(const Rational& c) const;
  CaloricPolynomial operator+(const CaloricPolynomial& o) const;
  CaloricPolynomial operator-(const CaloricPolynomial& o) const;

  nlohmann::json to_json() const;
  static CaloricPolynomial from_json(const nlohmann::json& j);

 private:
  Polynomial poly_;
  int degree_;
  bool homogeneous_;
};

// Backward heat kernel weight G_{x0,t0}(x,t) for t < t0; each time slice
// integrates to 1.
struct GaussianWeight {
  Eigen::VectorXd center;
  double t0 = 0.0;

  double eval(const Eigen::VectorXd& x, double t) const;
  static GaussianWeight origin(int n) {
    return GaussianWeight{Eigen::VectorXd::Zero(n), 0.0};
  }
};

// P(x,t) = sum_j t^j Laplace^j(p) / j! for a spatially homogeneous p of
// degree k; parabolically homogeneous of order k and restricts to p at t=0.
CaloricPolynomial caloric_extension(const Polynomial& p);

// Moment of x^mu against the t = -r^2 slice of G_{0,0}: product of 1D
// Gaussian moments with variance 2 r^2 per coordinate. Exact in r^2.
Rational gaussian_slice_moment(const Term& term, const Rational& r_squared);

// Slice inner product int_{t=-r^2} P Q G_{0,0} dx. Exact closed form.
Rational gaussian_inner_product_exact(const Polynomial& P, const Polynomial& Q,
                                      const Rational& r_squared);

// Same integral through Gauss-Hermite quadrature; cross-check path.
double gaussian_inner_product_quadrature(const Polynomial& P,
                                         const Polynomial& Q, double r,
                                         int points_per_dim = 24);

// Closed-form moments evaluated in double; r > 0 required.
double gaussian_inner_product(const CaloricPolynomial& P,
                              const CaloricPolynomial& Q, double r);

// Splits P into its parabolically homogeneous components, ascending order.
std::vector<std::pair<int, CaloricPolynomial>> homogeneous_decompose(
    const CaloricPolynomial& P);

// Closed-form Poon frequency N^P(r) from the orthogonal decomposition:
// N(r) = sum_i i w_i / sum_i w_i with w_i = h_i r^{2i}, h_i the slice norm
// of the order-i component at r = 1. Bounded by the parabolic degree and
// non-decreasing in r.
double polynomial_frequency(const CaloricPolynomial& P, double r);

// Gaussian slice energy int_{t=-r^2} |grad P|^2 G_{0,0}; pairs with the
// eigenvalue identity 2 r^2 * energy_i = i * mass_i per component.
double gaussian_slice_energy(const CaloricPolynomial& P, double r);
double gaussian_slice_mass(const CaloricPolynomial& P, double r);

struct FlatnessReport {
  double a0 = 0.0;         // order-0 coefficient
  double deviation = 0.0;  // sup_{Q_R} |P - a0|
  double ratio = 0.0;      // deviation / (|a0| sqrt(eps))
};

// Low-frequency polynomials are nearly constant: requires N^P(1) <= eps < 1
// and a nonzero constant part, reports the sup deviation over Q_R.
FlatnessReport small_frequency_flatness(const CaloricPolynomial& P, double eps,
                                        double R);

// Normalizers. "Gaussian unit" scales to int_{t=-1} P^2 G = 1; "cylinder
// unit" scales to mean_{Q_1} P^2 = 1. Both appear in different statements,
// so they are provided under distinct names.
CaloricPolynomial normalize_gaussian_slice(const CaloricPolynomial& P);
CaloricPolynomial normalize_cylinder(const CaloricPolynomial& P);
double cylinder_mean_square(const CaloricPolynomial& P, int space_points = 32,
                            int time_points = 16);

}  // namespace parafreq
