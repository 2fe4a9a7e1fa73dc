#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

#include "abelnp/error.hpp"

namespace abelnp {

// Slopes, valuations and polygon vertices.  Denominators stay small
// (they divide a * e * s_Q), so 64-bit components are plenty.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw InputError("not a rational number: '" + s + "'");
  }
}

}  // namespace abelnp
