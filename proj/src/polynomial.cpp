#include "parafreq/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace parafreq {

std::string rational_to_string(const Rational& q) {
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  // Strip factors of 2 and 5; if nothing remains the value has a finite
  // decimal expansion.
  BigInt d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d == 1) {
    int digits = std::max(twos, fives);
    BigInt scale = bigint_pow10(digits);
    BigInt scaled = num * (scale / den);
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string s = scaled.str();
    if (digits > 0) {
      if (static_cast<int>(s.size()) <= digits)
        s.insert(0, digits + 1 - s.size(), '0');
      s.insert(s.size() - digits, ".");
    }
    return (neg ? "-" : "") + s;
  }
  return num.str() + "/" + den.str();
}

namespace {

// cpp_int's string constructor treats a leading zero as an octal prefix;
// strip them (keeping the sign) before parsing.
BigInt parse_decimal_bigint(std::string s) {
  bool neg = !s.empty() && s[0] == '-';
  size_t start = neg || (!s.empty() && s[0] == '+') ? 1 : 0;
  size_t first = s.find_first_not_of('0', start);
  std::string digits =
      first == std::string::npos ? "0" : s.substr(first);
  BigInt v(digits);
  return neg ? -v : v;
}

}  // namespace

Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num = parse_decimal_bigint(s.substr(0, slash));
    BigInt den = parse_decimal_bigint(s.substr(slash + 1));
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(parse_decimal_bigint(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  int frac = static_cast<int>(s.size() - dot - 1);
  return Rational(parse_decimal_bigint(digits), bigint_pow10(frac));
}

Polynomial::Polynomial(int n) : n_(n) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("polynomial dimension out of range");
}

Polynomial Polynomial::constant(int n, const Rational& c) {
  Polynomial p(n);
  p.add_term(Term{}, c);
  return p;
}

Polynomial Polynomial::monomial(int n, const std::vector<int>& mu, int l,
                                const Rational& c) {
  if (static_cast<int>(mu.size()) != n)
    throw std::invalid_argument("monomial exponent list has wrong length");
  Polynomial p(n);
  Term t;
  for (int i = 0; i < n; ++i) {
    if (mu[i] < 0) throw std::invalid_argument("negative exponent");
    t.mu[i] = mu[i];
  }
  if (l < 0) throw std::invalid_argument("negative time exponent");
  t.l = l;
  p.add_term(t, c);
  return p;
}

Polynomial Polynomial::coordinate(int n, int i) {
  std::vector<int> mu(n, 0);
  mu.at(i) = 1;
  return monomial(n, mu, 0, Rational(1));
}

Rational Polynomial::coefficient(const Term& t) const {
  auto it = terms_.find(t);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Term& t, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(t, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (n_ != o.n_) throw std::invalid_argument("dimension mismatch");
  Polynomial r = *this;
  for (const auto& [t, c] : o.terms_) r.add_term(t, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + (-o);
}

Polynomial Polynomial::operator-() const { return scaled(Rational(-1)); }

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(n_);
  if (c == 0) return r;
  for (const auto& [t, a] : terms_) r.terms_.emplace(t, a * c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (n_ != o.n_) throw std::invalid_argument("dimension mismatch");
  Polynomial r(n_);
  for (const auto& [ta, ca] : terms_)
    for (const auto& [tb, cb] : o.terms_) {
      Term t;
      for (int i = 0; i < n_; ++i) t.mu[i] = ta.mu[i] + tb.mu[i];
      t.l = ta.l + tb.l;
      r.add_term(t, ca * cb);
    }
  return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
  return n_ == o.n_ && terms_ == o.terms_;
}

Polynomial Polynomial::partial_x(int i) const {
  Polynomial r(n_);
  for (const auto& [t, c] : terms_) {
    if (t.mu[i] == 0) continue;
    Term d = t;
    d.mu[i] -= 1;
    r.add_term(d, c * t.mu[i]);
  }
  return r;
}

Polynomial Polynomial::partial_t() const {
  Polynomial r(n_);
  for (const auto& [t, c] : terms_) {
    if (t.l == 0) continue;
    Term d = t;
    d.l -= 1;
    r.add_term(d, c * t.l);
  }
  return r;
}

Polynomial Polynomial::laplacian() const {
  Polynomial r(n_);
  for (int i = 0; i < n_; ++i) r = r + partial_x(i).partial_x(i);
  return r;
}

Polynomial Polynomial::heat_residual() const {
  return partial_t() - laplacian();
}

int Polynomial::parabolic_degree() const {
  int d = -1;
  for (const auto& [t, c] : terms_) d = std::max(d, t.parabolic_order());
  return d;
}

int Polynomial::spatial_degree() const {
  int d = -1;
  for (const auto& [t, c] : terms_) d = std::max(d, t.spatial_order());
  return d;
}

bool Polynomial::spatial_only() const {
  for (const auto& [t, c] : terms_)
    if (t.l != 0) return false;
  return true;
}

bool Polynomial::is_parabolically_homogeneous() const {
  return parabolic_orders().size() == 1;
}

bool Polynomial::is_spatially_homogeneous() const {
  int d = -2;
  for (const auto& [t, c] : terms_) {
    if (d == -2) d = t.spatial_order();
    if (t.spatial_order() != d) return false;
  }
  return true;
}

Polynomial Polynomial::homogeneous_part(int k) const {
  Polynomial r(n_);
  for (const auto& [t, c] : terms_)
    if (t.parabolic_order() == k) r.add_term(t, c);
  return r;
}

std::vector<int> Polynomial::parabolic_orders() const {
  std::vector<int> orders;
  for (const auto& [t, c] : terms_) {
    int k = t.parabolic_order();
    if (std::find(orders.begin(), orders.end(), k) == orders.end())
      orders.push_back(k);
  }
  std::sort(orders.begin(), orders.end());
  return orders;
}

Polynomial Polynomial::substitute_t(const Rational& tau) const {
  Polynomial r(n_);
  for (const auto& [t, c] : terms_) {
    Term s = t;
    s.l = 0;
    r.add_term(s, c * rational_pow(tau, t.l));
  }
  return r;
}

double Polynomial::eval(const Eigen::VectorXd& x, double t) const {
  double sum = 0;
  for (const auto& [term, c] : terms_) {
    double v = to_double(c);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < term.mu[i]; ++k) v *= x[i];
    for (int k = 0; k < term.l; ++k) v *= t;
    sum += v;
  }
  return sum;
}

Rational Polynomial::eval_exact(const std::vector<Rational>& x,
                                const Rational& t) const {
  Rational sum(0);
  for (const auto& [term, c] : terms_) {
    Rational v = c;
    for (int i = 0; i < n_; ++i) v *= rational_pow(x.at(i), term.mu[i]);
    v *= rational_pow(t, term.l);
    sum += v;
  }
  return sum;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << rational_to_string(c) << ")";
    for (int i = 0; i < n_; ++i)
      if (t.mu[i] > 0) {
        os << "*x" << (i + 1);
        if (t.mu[i] > 1) os << "^" << t.mu[i];
      }
    if (t.l > 0) {
      os << "*t";
      if (t.l > 1) os << "^" << t.l;
    }
  }
  return os.str();
}

}  // namespace parafreq
