#include <doctest.h>

#include "aperiodica/exact_arith.hpp"
#include "aperiodica/quad_ext.hpp"
#include "aperiodica/rng.hpp"

#include <cmath>
#include <vector>

using namespace aperiodica;

namespace {

IMat make(int rows, int cols, std::initializer_list<long long> vals) {
  IMat m(rows, cols);
  auto it = vals.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = BigInt(*it++);
  return m;
}

bool imat_eq(const IMat& a, const IMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

bool row_zero(const IMat& m, int r) {
  for (int c = 0; c < m.cols(); ++c)
    if (m(r, c) != 0) return false;
  return true;
}

bool is_row_hnf(const IMat& h, int rank) {
  int prev_pivot = -1;
  for (int r = 0; r < rank; ++r) {
    int piv = -1;
    for (int c = 0; c < h.cols(); ++c)
      if (h(r, c) != 0) { piv = c; break; }
    if (piv < 0 || piv <= prev_pivot) return false;
    if (h(r, piv) <= 0) return false;
    for (int k = 0; k < r; ++k)
      if (h(k, piv) < 0 || h(k, piv) >= h(r, piv)) return false;
    prev_pivot = piv;
  }
  for (int r = rank; r < h.rows(); ++r)
    if (!row_zero(h, r)) return false;
  return true;
}

// Brute-force kernel oracle: all integer vectors of height <= bound.
std::vector<Eigen::VectorXi> kernel_by_enumeration(const IMat& m, int bound) {
  std::vector<Eigen::VectorXi> out;
  const int n = static_cast<int>(m.cols());
  Eigen::VectorXi x = Eigen::VectorXi::Constant(n, -bound);
  while (true) {
    bool zero = true, allzero = true;
    for (int r = 0; r < m.rows() && zero; ++r) {
      BigInt acc = 0;
      for (int c = 0; c < n; ++c) acc += m(r, c) * x(c);
      zero = acc == 0;
    }
    for (int c = 0; c < n; ++c) allzero = allzero && x(c) == 0;
    if (zero && !allzero) out.push_back(x);
    int i = 0;
    for (; i < n; ++i) {
      if (x(i) < bound) { ++x(i); break; }
      x(i) = -bound;
    }
    if (i == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("hnf: identity and zero") {
  IMat id = make(2, 2, {1, 0, 0, 1});
  auto r = hnf(id);
  CHECK(imat_eq(r.h, id));
  CHECK(imat_eq(r.u, id));
  CHECK(r.rank == 2);

  IMat z = make(2, 2, {0, 0, 0, 0});
  auto rz = hnf(z);
  CHECK(imat_eq(rz.h, z));
  CHECK(imat_eq(rz.u, id));
  CHECK(rz.rank == 0);
}

TEST_CASE("hnf: 2x2 staircase with transform") {
  IMat m = make(2, 2, {2, 4, 1, 3});
  auto r = hnf(m);
  // Exhaustive row reduction gives H = [[1,1],[0,2]].
  CHECK(imat_eq(r.h, make(2, 2, {1, 1, 0, 2})));
  CHECK(imat_eq(imul(r.u, m), r.h));
  BigInt du = idet(r.u);
  CHECK((du == 1 || du == -1));
  CHECK(r.rank == 2);
}

TEST_CASE("hnf: unimodular transform on random matrices") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    int rows = 1 + static_cast<int>(rng.uniform_int(0, 7));
    int cols = 1 + static_cast<int>(rng.uniform_int(0, 7));
    IMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = BigInt(rng.uniform_int(-50, 50));
    auto r = hnf(m);
    REQUIRE(imat_eq(imul(r.u, m), r.h));
    BigInt du = idet(r.u);
    REQUIRE((du == 1 || du == -1));
    REQUIRE(is_row_hnf(r.h, r.rank));
  }
}

TEST_CASE("integer_kernel: injective map has trivial kernel") {
  IMat id = make(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK(integer_kernel(id).rows() == 0);
}

TEST_CASE("integer_kernel: 1x2 forced by symmetry") {
  IMat m = make(1, 2, {1, 1});
  IMat k = integer_kernel(m);
  REQUIRE(k.rows() == 1);
  CHECK(((k(0, 0) == 1 && k(0, 1) == -1) || (k(0, 0) == -1 && k(0, 1) == 1)));
}

TEST_CASE("integer_kernel: matches brute-force oracle") {
  IMat m = make(2, 3, {2, -3, 0, 0, 0, 5});
  IMat k = integer_kernel(m);
  REQUIRE(k.rows() == 1);
  // Oracle: smallest kernel vectors of height <= 10 are +-(3,2,0).
  auto oracle = kernel_by_enumeration(m, 10);
  REQUIRE(!oracle.empty());
  Eigen::VectorXi shortest = oracle[0];
  for (const auto& v : oracle)
    if (v.squaredNorm() < shortest.squaredNorm()) shortest = v;
  CHECK(shortest.cwiseAbs().maxCoeff() == 3);
  CHECK(((k(0, 0) == 3 && k(0, 1) == 2 && k(0, 2) == 0) ||
         (k(0, 0) == -3 && k(0, 1) == -2 && k(0, 2) == 0)));
}

TEST_CASE("integer_kernel: exactness and Z-independence on random matrices") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    int rows = 1 + static_cast<int>(rng.uniform_int(0, 3));
    int cols = 1 + static_cast<int>(rng.uniform_int(0, 4));
    IMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = BigInt(rng.uniform_int(-8, 8));
    IMat k = integer_kernel(m);
    if (k.rows() == 0) continue;
    IMat kt(k.cols(), k.rows());
    for (int i = 0; i < k.rows(); ++i)
      for (int j = 0; j < k.cols(); ++j) kt(j, i) = k(i, j);
    IMat prod = imul(m, kt);
    for (int i = 0; i < prod.rows(); ++i) REQUIRE(row_zero(prod, i));
    auto hk = hnf(k);
    REQUIRE(hk.rank == k.rows());
  }
}

TEST_CASE("lll_relations: independent integer vectors give no relation") {
  Eigen::MatrixXd v(2, 2);
  v << 1, 0, 0, 1;
  CHECK(lll_relations(v).empty());
}

TEST_CASE("lll_relations: finds 2*(1/2) - 3*(1/3) = 0") {
  Eigen::MatrixXd v(2, 1);
  v << 0.5, 1.0 / 3.0;
  auto rels = lll_relations(v);
  REQUIRE(!rels.empty());
  bool found = false;
  for (const auto& r : rels) {
    CHECK(relation_residual(v, r) <= 1e-6 * v.rowwise().norm().maxCoeff());
    if (r(0) == 2 && r(1) == -3) found = true;
  }
  CHECK(found);
  // Oracle: exhaustive search over height <= 10; the shortest zero
  // relation is proportional to (2, -3).
  double best = 1e9;
  Eigen::VectorXi bestrel(2);
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b) {
      if (a == 0 && b == 0) continue;
      double res = std::abs(a * 0.5 + b / 3.0);
      int h = std::abs(a) + std::abs(b);
      if (res < best - 1e-12 ||
          (res < best + 1e-12 && h < std::abs(bestrel(0)) + std::abs(bestrel(1)))) {
        best = res;
        bestrel << a, b;
      }
    }
  CHECK(best == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(bestrel(0)) == 2);
  CHECK(std::abs(bestrel(1)) == 3);
}

TEST_CASE("lll_relations: 1 and sqrt(5) are independent at tol 1e-9") {
  Eigen::MatrixXd v(2, 1);
  v << 1.0, std::sqrt(5.0);
  RelationOptions opts;
  opts.tol = 1e-9;
  CHECK(lll_relations(v, opts).empty());
  // Oracle: min residual over height <= 10^4 is far above tol.
  double best = 1e9;
  for (int a = -10000; a <= 10000; ++a) {
    double b = std::round(-a / std::sqrt(5.0));
    double res = std::abs(a + b * std::sqrt(5.0));
    if (a != 0 || b != 0) best = std::min(best, res);
  }
  CHECK(best > 1e-5);
}

TEST_CASE("lll_reduce: keeps the lattice and shortens the basis") {
  IMat b = make(2, 2, {1, 0, 1000000, 1});
  IMat red = lll_reduce(b);
  BigInt d0 = idet(b), d1 = idet(red);
  if (d0 < 0) d0 = -d0;
  if (d1 < 0) d1 = -d1;
  CHECK(d0 == d1);
  BigInt big = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      BigInt a = red(i, j) < 0 ? BigInt(-red(i, j)) : red(i, j);
      if (a > big) big = a;
    }
  CHECK(big <= 1000000);
}

TEST_CASE("quad_ext: field arithmetic in Q(sqrt(5))") {
  QuadExt tau(Rational(1, 2), Rational(1, 2), 5);  // golden ratio
  QuadExt one(1);
  CHECK((tau * tau) == tau + one);  // tau^2 = tau + 1
  QuadExt conj = tau.galois_conj();
  CHECK((tau + conj) == one);           // trace 1
  CHECK((tau * conj) == QuadExt(-1));   // norm -1
  CHECK(tau.sign() == 1);
  CHECK(conj.sign() == -1);
  CHECK((tau / tau) == one);
  CHECK(tau.value() == doctest::Approx((1 + std::sqrt(5.0)) / 2));
  QuadExt r = (tau - one) * (tau + one);  // tau^2 - 1 = tau
  CHECK(r == tau);
}

TEST_CASE("quad_ext: exact determinant and inverse") {
  QuadExt tau(Rational(1, 2), Rational(1, 2), 5);
  QMat m(2, 2);
  m << QuadExt(1), tau, QuadExt(1), QuadExt(1) - tau;
  QuadExt d = qdet(m);
  // det = (1 - tau) - tau = 1 - 2*tau = -sqrt(5)
  CHECK(d == QuadExt(Rational(0), Rational(-1), 5));
  QMat inv = qinverse(m);
  QMat prod = inv * m;
  CHECK(prod(0, 0) == QuadExt(1));
  CHECK(prod(0, 1) == QuadExt(0));
  CHECK(prod(1, 0) == QuadExt(0));
  CHECK(prod(1, 1) == QuadExt(1));
}
