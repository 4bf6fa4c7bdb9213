#pragma once

#include "parafreq/rational.hpp"

#include <Eigen/Dense>

#include <array>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace parafreq {

inline constexpr int kMaxDim = 4;

// Monomial x^mu t^l in n spatial variables plus time.
struct Term {
  std::array<int, kMaxDim> mu{};
  int l = 0;

  int spatial_order() const {
    int s = 0;
    for (int m : mu) s += m;
    return s;
  }
  // Parabolic grading: x counts 1, t counts 2.
  int parabolic_order() const { return spatial_order() + 2 * l; }

  auto operator<=>(const Term&) const = default;
};

// Sparse multivariate polynomial in (x_1..x_n, t) with exact rational
// coefficients. Immutable-style API: all operations return new values.
class Polynomial {
 public:
  explicit Polynomial(int n);

  static Polynomial constant(int n, const Rational& c);
  // mu lists the spatial exponents (size n), l the time exponent.
  static Polynomial monomial(int n, const std::vector<int>& mu, int l,
                             const Rational& c);
  // Convenience: the coordinate polynomial x_i.
  static Polynomial coordinate(int n, int i);

  int dim() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Term, Rational>& terms() const { return terms_; }

  Rational coefficient(const Term& t) const;
  void add_term(const Term& t, const Rational& c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(const Rational& c) const;
  bool operator==(const Polynomial& o) const;

  Polynomial partial_x(int i) const;
  Polynomial partial_t() const;
  Polynomial laplacian() const;
  // dP/dt - Laplace(P); exactly zero iff P is caloric.
  Polynomial heat_residual() const;
  bool is_caloric() const { return heat_residual().is_zero(); }

  // -1 for the zero polynomial.
  int parabolic_degree() const;
  int spatial_degree() const;
  bool spatial_only() const;  // no t dependence
  bool is_parabolically_homogeneous() const;
  bool is_spatially_homogeneous() const;

  // Terms of parabolic order exactly k.
  Polynomial homogeneous_part(int k) const;
  std::vector<int> parabolic_orders() const;

  // Substitute t := tau, leaving a spatial polynomial.
  Polynomial substitute_t(const Rational& tau) const;

  double eval(const Eigen::VectorXd& x, double t) const;
  Rational eval_exact(const std::vector<Rational>& x, const Rational& t) const;

  std::string to_string() const;

 private:
  int n_;
  std::map<Term, Rational> terms_;  // zero coefficients never stored
};

}  // namespace parafreq
