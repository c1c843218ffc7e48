#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cstdint>
#include <string>

namespace aperiodica {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Dense types, templated on scalar. Doubles go through the usual Eigen
// aliases; exact scalars (BigInt, Rational, QuadExt) reuse the same
// dense containers.
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IMat = Mat<BigInt>;
using IVec = Vec<BigInt>;
using QMatR = Mat<Rational>;

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

// Parses "123", "-4.5", "7/3" into an exact rational.
Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& x);

}  // namespace aperiodica
