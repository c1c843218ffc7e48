#pragma once

#include "aperiodica/numeric.hpp"

#include <vector>

namespace aperiodica {

struct HnfResult {
  IMat h;  // row Hermite normal form, H = U * M
  IMat u;  // unimodular transform
  int rank = 0;
};

// Row-style Hermite normal form: upper staircase, positive pivots,
// entries above each pivot reduced into [0, pivot).
HnfResult hnf(const IMat& m);

BigInt idet(const IMat& m);  // fraction-free (Bareiss) determinant
IMat imul(const IMat& a, const IMat& b);

// Basis of { x in Z^cols : M x = 0 }, one basis vector per row.
// Zero rows count means trivial kernel.
IMat integer_kernel(const IMat& m);

// Lenstra-Lenstra-Lovasz reduction of the lattice spanned by the rows
// of `basis` (exact rational Gram-Schmidt, delta = 3/4).
IMat lll_reduce(const IMat& basis);

struct RelationOptions {
  double tol = 1e-6;
  double scale = 1e10;
};

// Integer relations m with || sum_i m_i v_i || <= tol * max_i ||v_i||
// among the rows of `vectors`, found by reducing the rows scaled by
// `scale` and augmented with an identity block. Eigen is the numeric
// backend for the residual test; the reduction itself is exact.
std::vector<Eigen::VectorXi> lll_relations(const Eigen::MatrixXd& vectors,
                                           const RelationOptions& opts = {});

// Residual of a candidate relation against the original vectors.
double relation_residual(const Eigen::MatrixXd& vectors, const Eigen::VectorXi& rel);

}  // namespace aperiodica
