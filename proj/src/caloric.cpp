#include "parafreq/caloric.hpp"

#include "parafreq/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace parafreq {

CaloricPolynomial::CaloricPolynomial(Polynomial p) : poly_(std::move(p)) {
  Polynomial residual = poly_.heat_residual();
  if (!residual.is_zero()) {
    std::ostringstream os;
    os << "polynomial is not caloric; heat residual " << residual.to_string();
    throw std::invalid_argument(os.str());
  }
  degree_ = poly_.parabolic_degree();
  homogeneous_ = poly_.is_parabolically_homogeneous();
}

Eigen::VectorXd CaloricPolynomial::gradient(const Eigen::VectorXd& x,
                                            double t) const {
  Eigen::VectorXd g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = poly_.partial_x(i).eval(x, t);
  return g;
}

CaloricPolynomial CaloricPolynomial::scaled(const Rational& c) const {
  return CaloricPolynomial(poly_.scaled(c));
}

CaloricPolynomial CaloricPolynomial::operator+(
    const CaloricPolynomial& o) const {
  return CaloricPolynomial(poly_ + o.poly_);
}

CaloricPolynomial CaloricPolynomial::operator-(
    const CaloricPolynomial& o) const {
  return CaloricPolynomial(poly_ - o.poly_);
}

nlohmann::json CaloricPolynomial::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [t, c] : poly_.terms()) {
    nlohmann::json mu = nlohmann::json::array();
    for (int i = 0; i < dim(); ++i) mu.push_back(t.mu[i]);
    terms.push_back({{"mu", mu}, {"l", t.l}, {"coef", rational_to_string(c)}});
  }
  return {{"n", dim()}, {"terms", terms}};
}

CaloricPolynomial CaloricPolynomial::from_json(const nlohmann::json& j) {
  int n = j.at("n").get<int>();
  Polynomial p(n);
  for (const auto& term : j.at("terms")) {
    std::vector<int> mu = term.at("mu").get<std::vector<int>>();
    int l = term.at("l").get<int>();
    Rational c = rational_from_string(term.at("coef").get<std::string>());
    p = p + Polynomial::monomial(n, mu, l, c);
  }
  return CaloricPolynomial(p);
}

double GaussianWeight::eval(const Eigen::VectorXd& x, double t) const {
  double dt = t0 - t;
  if (dt <= 0) throw std::domain_error("Gaussian weight requires t < t0");
  double q = (x - center).squaredNorm() / (4 * dt);
  int n = static_cast<int>(center.size());
  return std::pow(4 * std::numbers::pi * dt, -n / 2.0) * std::exp(-q);
}

CaloricPolynomial caloric_extension(const Polynomial& p) {
  if (!p.spatial_only())
    throw std::invalid_argument("caloric_extension expects a spatial polynomial");
  if (!p.is_spatially_homogeneous()) {
    std::ostringstream os;
    os << "caloric_extension expects a homogeneous input; degrees present:";
    for (int d : p.parabolic_orders()) os << " " << d;
    throw std::invalid_argument(os.str());
  }
  Polynomial result = p;
  Polynomial iterate = p;
  BigInt fact(1);
  for (int j = 1; !iterate.is_zero(); ++j) {
    iterate = iterate.laplacian();
    if (iterate.is_zero()) break;
    fact *= j;
    Polynomial with_t(p.dim());
    for (const auto& [term, c] : iterate.terms()) {
      Term t = term;
      t.l += j;
      with_t.add_term(t, c / Rational(fact));
    }
    result = result + with_t;
  }
  return CaloricPolynomial(result);
}

Rational gaussian_slice_moment(const Term& term, const Rational& r_squared) {
  if (r_squared <= 0) throw std::domain_error("slice radius must be positive");
  if (term.l != 0)
    throw std::invalid_argument("moment of a term with time dependence");
  Rational variance = 2 * r_squared;
  Rational m(1);
  for (int i = 0; i < kMaxDim; ++i) {
    int k = term.mu[i];
    if (k == 0) continue;
    if (k % 2 == 1) return Rational(0);
    m *= rational_pow(variance, k / 2) * Rational(double_factorial(k - 1));
  }
  return m;
}

Rational gaussian_inner_product_exact(const Polynomial& P, const Polynomial& Q,
                                      const Rational& r_squared) {
  if (r_squared <= 0) throw std::domain_error("slice radius must be positive");
  Polynomial on_slice = (P * Q).substitute_t(-r_squared);
  Rational sum(0);
  for (const auto& [term, c] : on_slice.terms())
    sum += c * gaussian_slice_moment(term, r_squared);
  return sum;
}

double gaussian_inner_product_quadrature(const Polynomial& P,
                                         const Polynomial& Q, double r,
                                         int points_per_dim) {
  if (r <= 0) throw std::domain_error("slice radius must be positive");
  int n = P.dim();
  const QuadratureRule& gh = gauss_hermite(points_per_dim);
  double t = -r * r;
  // Substitution x = 2 r z turns the slice weight into exp(-|z|^2).
  double scale = std::pow(std::numbers::pi, -n / 2.0);
  Eigen::VectorXd x(n);
  std::vector<size_t> idx(n, 0);
  double sum = 0;
  size_t total = 1;
  for (int i = 0; i < n; ++i) total *= gh.nodes.size();
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    double w = 1;
    for (int i = 0; i < n; ++i) {
      size_t k = rem % gh.nodes.size();
      rem /= gh.nodes.size();
      x[i] = 2 * r * gh.nodes[k];
      w *= gh.weights[k];
    }
    sum += w * P.eval(x, t) * Q.eval(x, t);
  }
  return scale * sum;
}

double gaussian_inner_product(const CaloricPolynomial& P,
                              const CaloricPolynomial& Q, double r) {
  if (r <= 0) throw std::domain_error("slice radius must be positive");
  return to_double(
      gaussian_inner_product_exact(P.poly(), Q.poly(), Rational(r) * Rational(r)));
}

std::vector<std::pair<int, CaloricPolynomial>> homogeneous_decompose(
    const CaloricPolynomial& P) {
  std::vector<std::pair<int, CaloricPolynomial>> parts;
  for (int k : P.poly().parabolic_orders())
    parts.emplace_back(k, CaloricPolynomial(P.poly().homogeneous_part(k)));
  return parts;
}

namespace {

// Slice norms h_i = int_{t=-1} P_i^2 G of the homogeneous components.
std::vector<std::pair<int, double>> component_masses(
    const CaloricPolynomial& P) {
  std::vector<std::pair<int, double>> out;
  for (const auto& [order, part] : homogeneous_decompose(P)) {
    Rational h = gaussian_inner_product_exact(part.poly(), part.poly(), 1);
    out.emplace_back(order, to_double(h));
  }
  return out;
}

}  // namespace

double polynomial_frequency(const CaloricPolynomial& P, double r) {
  if (P.is_zero())
    throw std::domain_error("frequency of the zero polynomial is undefined");
  if (r <= 0) throw std::domain_error("frequency radius must be positive");
  double num = 0, den = 0;
  for (const auto& [order, h] : component_masses(P)) {
    double w = h * std::pow(r, 2 * order);
    num += order * w;
    den += w;
  }
  return num / den;
}

double gaussian_slice_mass(const CaloricPolynomial& P, double r) {
  double sum = 0;
  for (const auto& [order, h] : component_masses(P))
    sum += h * std::pow(r, 2 * order);
  return sum;
}

double gaussian_slice_energy(const CaloricPolynomial& P, double r) {
  // Eigenvalue identity per component: 2 r^2 energy_i = i * mass_i.
  double sum = 0;
  for (const auto& [order, h] : component_masses(P))
    sum += order * h * std::pow(r, 2 * order) / (2 * r * r);
  return sum;
}

FlatnessReport small_frequency_flatness(const CaloricPolynomial& P, double eps,
                                        double R) {
  if (eps <= 0 || eps >= 1)
    throw std::domain_error("flatness requires 0 < eps < 1");
  if (polynomial_frequency(P, 1.0) > eps)
    throw std::domain_error("frequency at r=1 exceeds eps");
  Rational a0_exact = P.poly().coefficient(Term{});
  if (a0_exact == 0)
    throw std::domain_error(
        "vanishing constant part contradicts the small-frequency bound");
  double a0 = to_double(a0_exact);
  int n = P.dim();
  const int steps = 24;
  double dev = 0;
  // Dense sweep of Q_R = {|x| < R} x (-R^2, 0].
  Eigen::VectorXd x(n);
  std::vector<int> idx(n, 0);
  auto visit = [&](auto&& self, int d) -> void {
    if (d == n) {
      if (x.norm() >= R) return;
      for (int k = 0; k <= steps; ++k) {
        double t = -R * R * k / steps;
        dev = std::max(dev, std::abs(P.eval(x, t) - a0));
      }
      return;
    }
    for (int k = 0; k <= steps; ++k) {
      x[d] = -R + 2.0 * R * k / steps;
      self(self, d + 1);
    }
  };
  visit(visit, 0);
  return {a0, dev, dev / (std::abs(a0) * std::sqrt(eps))};
}

double cylinder_mean_square(const CaloricPolynomial& P, int space_points,
                            int time_points) {
  Eigen::VectorXd center = Eigen::VectorXd::Zero(P.dim());
  return cylinder_mean(
      P.dim(), center, 0.0, 1.0,
      [&](const Eigen::VectorXd& x, double t) {
        double v = P.eval(x, t);
        return v * v;
      },
      space_points, time_points);
}

CaloricPolynomial normalize_gaussian_slice(const CaloricPolynomial& P) {
  double h = gaussian_slice_mass(P, 1.0);
  if (h <= 0) throw std::domain_error("cannot normalize the zero polynomial");
  return P.scaled(rational_from_double(1.0 / std::sqrt(h)));
}

CaloricPolynomial normalize_cylinder(const CaloricPolynomial& P) {
  double m = cylinder_mean_square(P);
  if (m <= 0) throw std::domain_error("cannot normalize the zero polynomial");
  return P.scaled(rational_from_double(1.0 / std::sqrt(m)));
}

}  // namespace parafreq
