#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

namespace germlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline std::string rational_string(const Rational& r) {
  const Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Parses "p", "-p", "p/q". Throws std::runtime_error on malformed input.
Rational parse_rational(const std::string& text);

// True if r is the square of a rational, and if so writes the nonnegative root.
bool rational_sqrt(const Rational& r, Rational& root);

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_int(long long n) { return static_cast<double>(n); }
  static double from_ratio(long long p, long long q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double abs(double x) { return std::fabs(x); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long long n) { return Rational(n); }
  static Rational from_ratio(long long p, long long q) { return Rational(p) / Rational(q); }
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
};

}  // namespace germlab
