#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "parafreq/caloric.hpp"
#include "parafreq/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <random>

using namespace parafreq;

namespace {

Polynomial x_power(int n, int i, int k) {
  std::vector<int> mu(n, 0);
  mu[i] = k;
  return Polynomial::monomial(n, mu, 0, Rational(1));
}

CaloricPolynomial random_caloric(std::mt19937& rng, int n, int max_deg,
                                 int n_terms) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(0, max_deg);
  Polynomial p(n);
  while (p.is_zero()) {
    for (int j = 0; j < n_terms; ++j) {
      std::vector<int> mu(n, 0);
      int left = deg(rng);
      for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, left);
        mu[i] = pick(rng);
        left -= mu[i];
      }
      Polynomial mono = Polynomial::monomial(n, mu, 0,
                                             rational_from_double(coef(rng)));
      p = p + caloric_extension(mono).poly();
    }
  }
  return CaloricPolynomial(p);
}

}  // namespace

TEST_CASE("caloric extension of low powers") {
  // x1 is already caloric.
  auto p1 = caloric_extension(x_power(2, 0, 1));
  CHECK(p1.poly() == x_power(2, 0, 1));

  // x1^2 -> x1^2 + 2t.
  auto p2 = caloric_extension(x_power(2, 0, 2));
  Polynomial expected = x_power(2, 0, 2) +
                        Polynomial::monomial(2, {0, 0}, 1, Rational(2));
  CHECK(p2.poly() == expected);

  // x1^4 -> x1^4 + 12 t x1^2 + 12 t^2.
  auto p4 = caloric_extension(x_power(2, 0, 4));
  Polynomial expected4 = x_power(2, 0, 4) +
                         Polynomial::monomial(2, {2, 0}, 1, Rational(12)) +
                         Polynomial::monomial(2, {0, 0}, 2, Rational(12));
  CHECK(p4.poly() == expected4);
  CHECK(p4.homogeneous());
  CHECK(p4.degree() == 4);
}

TEST_CASE("caloric extension rejects non-homogeneous input") {
  Polynomial p = x_power(2, 0, 1) + x_power(2, 0, 2);
  CHECK_THROWS_AS(caloric_extension(p), std::invalid_argument);
  Polynomial with_t = Polynomial::monomial(2, {1, 0}, 1, Rational(1));
  CHECK_THROWS_AS(caloric_extension(with_t), std::invalid_argument);
}

TEST_CASE("heat residual is exactly zero for generated polynomials") {
  std::mt19937 rng(3);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      CaloricPolynomial P = random_caloric(rng, n, 6, 3);
      CHECK(P.poly().heat_residual().is_zero());
    }
}

TEST_CASE("gaussian inner products: frozen values") {
  // <1, 1> = 1 at any radius (slice normalization).
  CaloricPolynomial one(Polynomial::constant(2, Rational(1)));
  CHECK(gaussian_inner_product(one, one, 0.33) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_inner_product(one, one, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  // <x1, x1> = 2 at r = 1 (second moment, variance 2 per coordinate),
  // independent of the ambient dimension.
  for (int n = 1; n <= 3; ++n) {
    CaloricPolynomial x1(x_power(n, 0, 1));
    CHECK(gaussian_inner_product(x1, x1, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  }

  // <x1, x1^2 + 2t> = 0: distinct homogeneous orders.
  CaloricPolynomial x1(x_power(2, 0, 1));
  auto q = caloric_extension(x_power(2, 0, 2));
  CHECK(gaussian_inner_product(x1, q, 1.0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(gaussian_inner_product(x1, x1, 0.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_inner_product(x1, x1, -1.0), std::domain_error);
}

TEST_CASE("closed-form moments agree with Gauss-Hermite quadrature") {
  std::mt19937 rng(5);
  for (int n = 1; n <= 2; ++n)
    for (int trial = 0; trial < 5; ++trial) {
      CaloricPolynomial P = random_caloric(rng, n, 4, 2);
      CaloricPolynomial Q = random_caloric(rng, n, 4, 2);
      for (double r : {0.5, 1.0}) {
        double exact = gaussian_inner_product(P, Q, r);
        double quad = gaussian_inner_product_quadrature(P.poly(), Q.poly(), r);
        CHECK(exact == doctest::Approx(quad).epsilon(1e-10));
      }
    }
}

TEST_CASE("orthogonality of distinct homogeneous orders") {
  std::mt19937 rng(7);
  for (int n = 1; n <= 3; ++n) {
    std::vector<CaloricPolynomial> homog;
    for (int d = 0; d <= 6; ++d) {
      std::vector<int> mu(n, 0);
      mu[n - 1] = d;
      homog.push_back(caloric_extension(Polynomial::monomial(n, mu, 0, Rational(1))));
    }
    for (size_t i = 0; i < homog.size(); ++i)
      for (size_t j = i + 1; j < homog.size(); ++j)
        for (double r : {0.25, 0.5, 1.0}) {
          double ip = std::abs(gaussian_inner_product(homog[i], homog[j], r));
          double scale = std::sqrt(gaussian_slice_mass(homog[i], r) *
                                   gaussian_slice_mass(homog[j], r));
          CHECK(ip <= 1e-8 * scale);
          // Gradient pairing vanishes for distinct orders as well.
          double gp = 0;
          for (int q = 0; q < n; ++q)
            gp += to_double(gaussian_inner_product_exact(
                homog[i].poly().partial_x(q), homog[j].poly().partial_x(q),
                Rational(r) * Rational(r)));
          CHECK(std::abs(gp) <= 1e-8 * scale);
        }
  }
}

TEST_CASE("polynomial frequency: homogeneous pins to the order") {
  for (int d = 0; d <= 6; ++d) {
    auto P = caloric_extension(x_power(2, 0, d));
    for (double r : {0.1, 0.5, 1.0})
      CHECK(polynomial_frequency(P, r) == doctest::Approx(double(d)).epsilon(1e-12));
  }
}

TEST_CASE("polynomial frequency: frozen mixed example") {
  // 1 + x1 with both parts already of unit slice norm at r=1? h_0 = 1,
  // h_1 = 2, so scale the linear part by 1/sqrt(2) to make both unit:
  // N(1) = (0 + 1)/(1 + 1) = 1/2.
  Polynomial p = Polynomial::constant(2, Rational(1)) +
                 x_power(2, 0, 1).scaled(Rational(1) / rational_from_double(std::sqrt(2.0)));
  CaloricPolynomial P(p);
  CHECK(polynomial_frequency(P, 1.0) == doctest::Approx(0.5).epsilon(1e-9));

  // Cross-check against the quadrature route E/H.
  double H = gaussian_slice_mass(P, 1.0);
  double E = gaussian_slice_energy(P, 1.0) * 2.0 * 1.0 * 1.0;
  CHECK(E / H == doctest::Approx(0.5).epsilon(1e-9));

  CaloricPolynomial zero(Polynomial(2));
  CHECK_THROWS_AS(polynomial_frequency(zero, 1.0), std::domain_error);
}

TEST_CASE("frequency is monotone in r and bounded by the degree") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + trial % 3;
    CaloricPolynomial P = random_caloric(rng, n, 5, 3);
    double prev = -1;
    for (int k = 0; k < 20; ++k) {
      double r = 0.1 + 0.1 * k;
      double N = polynomial_frequency(P, r);
      CHECK(N <= P.degree() + 1e-10);
      CHECK(N >= prev - 1e-10);
      prev = N;
    }
  }
}

TEST_CASE("frequency limits: lowest order as r -> 0, highest as r -> inf") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 1 + trial % 3;
    CaloricPolynomial P = random_caloric(rng, n, 5, 3);
    auto parts = homogeneous_decompose(P);
    int lo = parts.front().first, hi = parts.back().first;
    CHECK(polynomial_frequency(P, 1e-3) == doctest::Approx(lo).epsilon(1e-3));
    CHECK(polynomial_frequency(P, 1e3) == doctest::Approx(hi).epsilon(1e-3));
  }
}

TEST_CASE("eigenvalue identity per homogeneous component") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 1 + trial % 3;
    CaloricPolynomial P = random_caloric(rng, n, 6, 3);
    for (const auto& [order, part] : homogeneous_decompose(P)) {
      for (double r : {0.5, 1.0}) {
        double mass = gaussian_slice_mass(part, r);
        double energy = gaussian_inner_product_quadrature(
            part.poly().partial_x(0), part.poly().partial_x(0), r);
        for (int i = 1; i < n; ++i)
          energy += gaussian_inner_product_quadrature(
              part.poly().partial_x(i), part.poly().partial_x(i), r);
        if (mass == 0) continue;
        CHECK(2 * r * r * energy ==
              doctest::Approx(order * mass).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("homogeneous decomposition reassembles the input") {
  // x1^2 + 2t + x1 -> orders 1 and 2.
  Polynomial p = x_power(2, 0, 2) + Polynomial::monomial(2, {0, 0}, 1, Rational(2)) +
                 x_power(2, 0, 1);
  CaloricPolynomial P(p);
  auto parts = homogeneous_decompose(P);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].first == 1);
  CHECK(parts[0].second.poly() == x_power(2, 0, 1));
  CHECK(parts[1].first == 2);

  Polynomial sum(2);
  for (const auto& [k, comp] : parts) sum = sum + comp.poly();
  CHECK(sum == p);

  // x1^4 + 12 t x1^2 + 12 t^2 + 5 -> orders 0 and 4.
  Polynomial q = caloric_extension(x_power(2, 0, 4)).poly() +
                 Polynomial::constant(2, Rational(5));
  auto qparts = homogeneous_decompose(CaloricPolynomial(q));
  REQUIRE(qparts.size() == 2);
  CHECK(qparts[0].first == 0);
  CHECK(qparts[1].first == 4);
  double ip = gaussian_inner_product(qparts[0].second, qparts[1].second, 1.0);
  CHECK(std::abs(ip) <= 1e-10);
}

TEST_CASE("small frequency flatness") {
  CaloricPolynomial one(Polynomial::constant(2, Rational(1)));
  auto rep = small_frequency_flatness(one, 0.5, 1.0);
  CHECK(rep.a0 == doctest::Approx(1.0));
  CHECK(rep.deviation == doctest::Approx(0.0));

  // 1 + 0.01 x1, slice-normalized linear part.
  Polynomial p = Polynomial::constant(2, Rational(1)) +
                 x_power(2, 0, 1).scaled(rational_from_double(0.01 / std::sqrt(2.0)));
  CaloricPolynomial P(p);
  double eps = polynomial_frequency(P, 1.0);
  auto rep2 = small_frequency_flatness(P, eps * 1.0001, 1.0);
  // Deviation tracks 0.01/sqrt(2) sup |x1| over Q_1.
  CHECK(rep2.deviation == doctest::Approx(0.01 / std::sqrt(2.0)).epsilon(0.05));

  // Coefficient-mass bound: N(1) <= eps forces sum_{i>=1} a_i^2 <=
  // eps/(1-eps) a_0^2, sharp for a single extra mode.
  auto parts = homogeneous_decompose(P);
  double a0_sq = gaussian_slice_mass(parts[0].second, 1.0);
  double rest = 0;
  for (size_t i = 1; i < parts.size(); ++i)
    rest += gaussian_slice_mass(parts[i].second, 1.0);
  CHECK(rest <= eps / (1 - eps) * a0_sq + 1e-15);

  // Zero constant part contradicts the precondition.
  CaloricPolynomial x1(x_power(2, 0, 1).scaled(rational_from_double(1e-4)));
  CHECK_THROWS_AS(small_frequency_flatness(x1, 0.5, 1.0), std::domain_error);
}

TEST_CASE("normalizers") {
  auto P = caloric_extension(x_power(2, 0, 3));
  auto Pg = normalize_gaussian_slice(P);
  CHECK(gaussian_slice_mass(Pg, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  auto Pc = normalize_cylinder(P);
  CHECK(cylinder_mean_square(Pc) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gaussian weight normalization by quadrature") {
  for (int n = 1; n <= 2; ++n) {
    GaussianWeight w = GaussianWeight::origin(n);
    double mass = ball_integrate(
        n, 30.0,
        [&](const Eigen::VectorXd& x) { return w.eval(x, -1.0); }, 80);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("JSON round trip") {
  auto P = caloric_extension(x_power(3, 1, 4)).scaled(Rational(3, 7));
  nlohmann::json j = P.to_json();
  auto back = CaloricPolynomial::from_json(j);
  CHECK(back.poly() == P.poly());
  CHECK(j["n"] == 3);
}
