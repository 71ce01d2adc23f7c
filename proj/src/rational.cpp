#include "germlab/rational.hpp"

#include <stdexcept>

namespace germlab {

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(text));
    const Integer num(text.substr(0, slash));
    const Integer den(text.substr(slash + 1));
    if (den == 0) throw std::runtime_error("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::runtime_error("malformed rational literal: '" + text + "'");
  }
}

bool rational_sqrt(const Rational& r, Rational& root) {
  if (r < 0) return false;
  const Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  const Integer sn = boost::multiprecision::sqrt(num);
  const Integer sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return false;
  root = Rational(sn, sd);
  return true;
}

}  // namespace germlab
