#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "swlab/matrix.hpp"

namespace swlab {

using Rational = boost::rational<std::int64_t>;
using RationalMatrix = Matrix<Rational>;

// Accepts "p/q", integers and finite decimals ("0.125" -> 1/8).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

RealMatrix to_real(const RationalMatrix& m);

}  // namespace swlab
