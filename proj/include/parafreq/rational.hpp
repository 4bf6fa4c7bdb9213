#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace parafreq {

// Exact coefficient arithmetic. Doubles convert losslessly (they are dyadic
// rationals), so symbolic cancellation checks stay exact even for values
// that started life as floating point.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational rational_from_double(double x) { return Rational(x); }

inline Rational rational_pow(const Rational& base, int e) {
  if (e < 0) return Rational(1) / rational_pow(base, -e);
  Rational r(1), b(base);
  for (int k = e; k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

inline BigInt bigint_pow10(int e) {
  BigInt r(1);
  for (int k = 0; k < e; ++k) r *= 10;
  return r;
}

inline BigInt factorial(int n) {
  BigInt r(1);
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// (n)!! with the convention (-1)!! = 1.
inline BigInt double_factorial(int n) {
  BigInt r(1);
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

// Serialized form: plain decimal when the denominator is 2^a 5^b (exact),
// "p/q" otherwise.
std::string rational_to_string(const Rational& q);
Rational rational_from_string(const std::string& s);

}  // namespace parafreq
