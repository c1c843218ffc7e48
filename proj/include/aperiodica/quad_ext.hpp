#pragma once

#include "aperiodica/numeric.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace aperiodica {

// Element a + b*sqrt(disc) of a real quadratic field Q(sqrt(disc)).
// disc == 0 marks a plain rational (b must be zero then). Values with
// different nonzero discriminants never mix; mixing throws.
class QuadExt {
 public:
  QuadExt() : a_(0), b_(0), disc_(0) {}
  QuadExt(int v) : a_(v), b_(0), disc_(0) {}  // NOLINT: implicit by design
  QuadExt(const Rational& a) : a_(a), b_(0), disc_(0) {}
  QuadExt(Rational a, Rational b, long disc)
      : a_(std::move(a)), b_(std::move(b)), disc_(disc) {
    if (b_ == 0) disc_ = disc_ == 0 ? 0 : disc_;
    if (disc_ == 0 && b_ != 0) throw std::logic_error("QuadExt: b without disc");
  }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  long disc() const { return disc_; }
  bool is_rational() const { return b_ == 0; }

  QuadExt galois_conj() const { return QuadExt(a_, -b_, disc_); }

  double value() const {
    double v = to_double(a_);
    if (b_ != 0) v += to_double(b_) * std::sqrt(static_cast<double>(disc_));
    return v;
  }

  bool is_zero() const { return a_ == 0 && b_ == 0; }

  // Exact sign of a + b*sqrt(D).
  int sign() const {
    int sa = a_ == 0 ? 0 : (a_ > 0 ? 1 : -1);
    if (b_ == 0) return sa;
    int sb = b_ > 0 ? 1 : -1;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with b^2*D.
    Rational lhs = a_ * a_, rhs = b_ * b_ * disc_;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
  }

  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    long d = merged_disc(x, y);
    return QuadExt(x.a_ + y.a_, x.b_ + y.b_, d);
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    long d = merged_disc(x, y);
    return QuadExt(x.a_ - y.a_, x.b_ - y.b_, d);
  }
  friend QuadExt operator-(const QuadExt& x) {
    return QuadExt(-x.a_, -x.b_, x.disc_);
  }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    long d = merged_disc(x, y);
    return QuadExt(x.a_ * y.a_ + x.b_ * y.b_ * d,
                   x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y) {
    long d = merged_disc(x, y);
    Rational nrm = y.a_ * y.a_ - y.b_ * y.b_ * d;
    if (nrm == 0) throw std::domain_error("QuadExt: division by zero");
    QuadExt num = x * y.galois_conj();
    return QuadExt(num.a_ / nrm, num.b_ / nrm, d);
  }
  QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
  QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
  QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }
  QuadExt& operator/=(const QuadExt& y) { return *this = *this / y; }

  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    merged_disc(x, y);
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }
  friend bool operator<(const QuadExt& x, const QuadExt& y) {
    return (x - y).sign() < 0;
  }
  friend bool operator<=(const QuadExt& x, const QuadExt& y) {
    return (x - y).sign() <= 0;
  }
  friend bool operator>(const QuadExt& x, const QuadExt& y) { return y < x; }
  friend bool operator>=(const QuadExt& x, const QuadExt& y) { return y <= x; }

  friend std::ostream& operator<<(std::ostream& os, const QuadExt& x) {
    os << x.a_;
    if (x.b_ != 0) os << (x.b_ > 0 ? "+" : "") << x.b_ << "*sqrt(" << x.disc_ << ")";
    return os;
  }

 private:
  static long merged_disc(const QuadExt& x, const QuadExt& y) {
    if (x.disc_ == 0) return y.disc_;
    if (y.disc_ == 0 || y.disc_ == x.disc_) return x.disc_;
    throw std::logic_error("QuadExt: mixed discriminants");
  }

  Rational a_, b_;
  long disc_;
};

inline QuadExt abs(const QuadExt& x) { return x.sign() < 0 ? -x : x; }

using QMat = Mat<QuadExt>;
using QVec = Vec<QuadExt>;

QuadExt qdet(const QMat& m);
QMat qinverse(const QMat& m);
QVec qsolve(const QMat& m, const QVec& rhs);
Eigen::MatrixXd to_double(const QMat& m);
QMat galois_conj(const QMat& m);

}  // namespace aperiodica

namespace Eigen {
template <>
struct NumTraits<aperiodica::QuadExt> : GenericNumTraits<aperiodica::QuadExt> {
  using Real = aperiodica::QuadExt;
  using NonInteger = aperiodica::QuadExt;
  using Nested = aperiodica::QuadExt;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 30,
    MulCost = 60,
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
