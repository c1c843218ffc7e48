#include "aperiodica/quad_ext.hpp"

#include "aperiodica/errors.hpp"

#include <sstream>

namespace aperiodica {

Rational parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator");
    return num / den;
  }
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  BigInt ipart = 0, fpart = 0, fscale = 1;
  bool any = false, frac = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (frac) throw Error(ErrorKind::ParseError, "bad number: " + text);
      frac = true;
      continue;
    }
    if (c < '0' || c > '9') throw Error(ErrorKind::ParseError, "bad number: " + text);
    any = true;
    if (frac) {
      fpart = fpart * 10 + (c - '0');
      fscale *= 10;
    } else {
      ipart = ipart * 10 + (c - '0');
    }
  }
  if (!any) throw Error(ErrorKind::ParseError, "bad number: " + text);
  Rational r = Rational(ipart) + Rational(fpart, fscale);
  return neg ? -r : r;
}

std::string rational_to_string(const Rational& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

QuadExt qdet(const QMat& m) {
  if (m.rows() != m.cols()) throw std::logic_error("qdet: square only");
  QMat a = m;
  const Eigen::Index n = a.rows();
  QuadExt det(1);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = c; r < n; ++r)
      if (!a(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) return QuadExt(0);
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (a(r, c).is_zero()) continue;
      QuadExt f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

QMat qinverse(const QMat& m) {
  if (m.rows() != m.cols()) throw std::logic_error("qinverse: square only");
  const Eigen::Index n = m.rows();
  QMat a = m;
  QMat inv = QMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) inv(i, i) = QuadExt(1);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = c; r < n; ++r)
      if (!a(r, c).is_zero()) { piv = r; break; }
    if (piv < 0) throw std::domain_error("qinverse: singular matrix");
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      inv.row(piv).swap(inv.row(c));
    }
    QuadExt p = a(c, c);
    for (Eigen::Index k = 0; k < n; ++k) {
      a(c, k) /= p;
      inv(c, k) /= p;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c || a(r, c).is_zero()) continue;
      QuadExt f = a(r, c);
      for (Eigen::Index k = 0; k < n; ++k) {
        a(r, k) -= f * a(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

QVec qsolve(const QMat& m, const QVec& rhs) {
  QMat inv = qinverse(m);
  QVec out = QVec::Zero(m.cols());
  for (Eigen::Index i = 0; i < inv.rows(); ++i) {
    QuadExt acc(0);
    for (Eigen::Index j = 0; j < inv.cols(); ++j) acc += inv(i, j) * rhs(j);
    out(i) = acc;
  }
  return out;
}

Eigen::MatrixXd to_double(const QMat& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).value();
  return out;
}

QMat galois_conj(const QMat& m) {
  QMat out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).galois_conj();
  return out;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RelationAmbiguity: return "RelationAmbiguity";
    case ErrorKind::DegenerateSpan: return "DegenerateSpan";
    case ErrorKind::InsufficientProfile: return "InsufficientProfile";
    case ErrorKind::PointNotInSample: return "PointNotInSample";
    case ErrorKind::RankNotExceedingD: return "RankNotExceedingD";
    case ErrorKind::SingularLattice: return "SingularLattice";
    case ErrorKind::DegenerateHull: return "DegenerateHull";
    case ErrorKind::NoNonSingularFound: return "NoNonSingularFound";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::UnboundedEnumeration: return "UnboundedEnumeration";
    case ErrorKind::UnknownRule: return "UnknownRule";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
  }
  return "Error";
}

}  // namespace aperiodica
