#include "aperiodica/exact_arith.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <cmath>

// Note: row operations on BigInt matrices are spelled as explicit loops;
// Eigen expression templates trip over cpp_int's converting constructors.

namespace aperiodica {

namespace {

void swap_rows(IMat& m, Eigen::Index r1, Eigen::Index r2) {
  if (r1 == r2) return;
  for (Eigen::Index c = 0; c < m.cols(); ++c) std::swap(m(r1, c), m(r2, c));
}

void negate_row(IMat& m, Eigen::Index r) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = -m(r, c);
}

// row(r1) -= q * row(r2)
void axpy_row(IMat& m, const BigInt& q, Eigen::Index r1, Eigen::Index r2) {
  if (q == 0) return;
  for (Eigen::Index c = 0; c < m.cols(); ++c) m(r1, c) -= q * m(r2, c);
}

bool row_is_zero(const IMat& m, Eigen::Index r) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (m(r, c) != 0) return false;
  return true;
}

// Replaces rows r1, r2 by unimodular combinations so that column c
// holds (gcd, 0). Applied to H and U in lockstep.
void xgcd_rows(IMat& h, IMat& u, Eigen::Index r1, Eigen::Index r2, Eigen::Index c) {
  BigInt a = h(r1, c), b = h(r2, c);
  if (b == 0) return;
  if (a == 0) {
    swap_rows(h, r1, r2);
    swap_rows(u, r1, r2);
    return;
  }
  BigInt old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt tmp = old_r - q * r; old_r = r; r = tmp;
    tmp = old_s - q * s; old_s = s; s = tmp;
    tmp = old_t - q * t; old_t = t; t = tmp;
  }
  BigInt g = old_r;             // old_s * a + old_t * b = g
  BigInt p = a / g, q = b / g;  // p * old_s + q * old_t = 1 (up to sign bookkeeping)
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    BigInt x = h(r1, k), y = h(r2, k);
    h(r1, k) = old_s * x + old_t * y;
    h(r2, k) = p * y - q * x;
  }
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    BigInt x = u(r1, k), y = u(r2, k);
    u(r1, k) = old_s * x + old_t * y;
    u(r2, k) = p * y - q * x;
  }
}

}  // namespace

HnfResult hnf(const IMat& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw Error(ErrorKind::ValidationError, "hnf: empty matrix");
  HnfResult res;
  res.h = m;
  res.u = IMat::Zero(m.rows(), m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) res.u(i, i) = 1;

  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r)
      if (res.h(r, col) != 0) { piv = r; break; }
    if (piv < 0) continue;
    if (piv != row) {
      swap_rows(res.h, piv, row);
      swap_rows(res.u, piv, row);
    }
    for (Eigen::Index r = row + 1; r < m.rows(); ++r)
      if (res.h(r, col) != 0) xgcd_rows(res.h, res.u, row, r, col);
    if (res.h(row, col) < 0) {
      negate_row(res.h, row);
      negate_row(res.u, row);
    }
    for (Eigen::Index r = 0; r < row; ++r) {
      BigInt q = floor_div(res.h(r, col), res.h(row, col));
      axpy_row(res.h, q, r, row);
      axpy_row(res.u, q, r, row);
    }
    ++row;
  }
  res.rank = static_cast<int>(row);
  return res;
}

BigInt idet(const IMat& m) {
  if (m.rows() != m.cols()) throw std::logic_error("idet: square only");
  IMat a = m;
  const Eigen::Index n = a.rows();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index piv = -1;
      for (Eigen::Index r = k + 1; r < n; ++r)
        if (a(r, k) != 0) { piv = r; break; }
      if (piv < 0) return 0;
      swap_rows(a, piv, k);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign > 0 ? a(n - 1, n - 1) : BigInt(-a(n - 1, n - 1));
}

IMat imul(const IMat& a, const IMat& b) {
  if (a.cols() != b.rows()) throw std::logic_error("imul: shape mismatch");
  IMat out = IMat::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

IMat integer_kernel(const IMat& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw Error(ErrorKind::ValidationError, "integer_kernel: empty matrix");
  IMat mt(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) mt(j, i) = m(i, j);
  // Zero rows of H = U * M^T pull back to kernel vectors through U.
  HnfResult res = hnf(mt);
  const Eigen::Index n = m.cols();
  std::vector<Eigen::Index> zero_rows;
  for (Eigen::Index r = 0; r < n; ++r)
    if (row_is_zero(res.h, r)) zero_rows.push_back(r);
  IMat kernel(static_cast<Eigen::Index>(zero_rows.size()), n);
  for (std::size_t i = 0; i < zero_rows.size(); ++i)
    for (Eigen::Index c = 0; c < n; ++c) kernel(static_cast<Eigen::Index>(i), c) = res.u(zero_rows[i], c);
  return kernel;
}

IMat lll_reduce(const IMat& basis) {
  const Eigen::Index k = basis.rows();
  const Eigen::Index n = basis.cols();
  if (k <= 1) return basis;
  IMat b = basis;

  std::vector<std::vector<Rational>> gs(k, std::vector<Rational>(n));
  std::vector<Rational> norm2(k);
  std::vector<std::vector<Rational>> mu(k, std::vector<Rational>(k));

  auto recompute = [&]() {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) gs[i][j] = Rational(b(i, j));
      for (Eigen::Index j = 0; j < i; ++j) {
        if (norm2[j] == 0) { mu[i][j] = 0; continue; }
        Rational dot = 0;
        for (Eigen::Index c = 0; c < n; ++c) dot += Rational(b(i, c)) * gs[j][c];
        mu[i][j] = dot / norm2[j];
        for (Eigen::Index c = 0; c < n; ++c) gs[i][c] -= mu[i][j] * gs[j][c];
      }
      Rational n2 = 0;
      for (Eigen::Index c = 0; c < n; ++c) n2 += gs[i][c] * gs[i][c];
      norm2[i] = n2;
    }
  };
  recompute();

  auto nearest_int = [](const Rational& x) {
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);
    BigInt twice = 2 * num + den;  // floor(x + 1/2) = floor((2num+den)/(2den))
    return floor_div(twice, 2 * den);
  };

  const Rational delta(3, 4);
  Eigen::Index i = 1;
  while (i < k) {
    bool changed = false;
    for (Eigen::Index j = i - 1; j >= 0; --j) {
      BigInt q = nearest_int(mu[i][j]);
      if (q != 0) {
        axpy_row(b, q, i, j);
        changed = true;
      }
    }
    if (changed) recompute();
    if (norm2[i - 1] != 0 &&
        norm2[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * norm2[i - 1]) {
      swap_rows(b, i, i - 1);
      recompute();
      i = std::max<Eigen::Index>(i - 1, 1);
    } else if (norm2[i - 1] == 0 && norm2[i] != 0) {
      swap_rows(b, i, i - 1);  // zero vectors sink to the bottom
      recompute();
      i = std::max<Eigen::Index>(i - 1, 1);
    } else {
      ++i;
    }
  }
  return b;
}

double relation_residual(const Eigen::MatrixXd& vectors, const Eigen::VectorXi& rel) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(vectors.cols());
  for (Eigen::Index i = 0; i < vectors.rows(); ++i)
    acc += static_cast<double>(rel(i)) * vectors.row(i).transpose();
  return acc.norm();
}

std::vector<Eigen::VectorXi> lll_relations(const Eigen::MatrixXd& vectors,
                                           const RelationOptions& opts) {
  const Eigen::Index k = vectors.rows();
  const Eigen::Index m = vectors.cols();
  if (k == 0) return {};

  double vmax = 0;
  for (Eigen::Index i = 0; i < k; ++i) vmax = std::max(vmax, vectors.row(i).norm());
  const double bound = opts.tol * (vmax > 0 ? vmax : 1.0);

  IMat lattice = IMat::Zero(k, k + m);
  for (Eigen::Index i = 0; i < k; ++i) {
    lattice(i, i) = 1;
    for (Eigen::Index j = 0; j < m; ++j) {
      double scaled = vectors(i, j) * opts.scale;
      if (!std::isfinite(scaled) || std::abs(scaled) > 9e17)
        throw Error(ErrorKind::ValidationError, "lll_relations: scale overflow");
      lattice(i, k + j) = BigInt(static_cast<long long>(std::llround(scaled)));
    }
  }
  IMat red = lll_reduce(lattice);

  std::vector<Eigen::VectorXi> out;
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::VectorXi rel(static_cast<int>(k));
    bool nonzero = false, fits = true;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (red(r, i) > 1000000 || red(r, i) < -1000000) { fits = false; break; }
      rel(i) = static_cast<int>(red(r, i).convert_to<long long>());
      nonzero = nonzero || rel(i) != 0;
    }
    if (!fits || !nonzero) continue;
    if (relation_residual(vectors, rel) <= bound) {
      for (Eigen::Index i = 0; i < k; ++i) {
        if (rel(i) == 0) continue;
        if (rel(i) < 0) rel = -rel;
        break;
      }
      out.push_back(rel);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                        b.data(), b.data() + b.size());
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            out.end());
  return out;
}

}  // namespace aperiodica
