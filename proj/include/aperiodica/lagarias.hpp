#pragma once

#include "aperiodica/address.hpp"

#include <optional>

namespace aperiodica {

// Euclidean cut-and-project scheme: physical space R^d, internal space
// R^n, lattice spanned by the columns of `lifted` ((d+n) x s, s = d+n).
//
// `lifted` is the canonical numeric lattice basis; when the scheme comes
// from exact quadratic data, `lifted_exact` carries an exact basis whose
// internal block is the Galois-conjugate star. The two internal blocks
// agree up to a linear isomorphism of R^n, which every window comparison
// in this library mods out anyway.
struct EuclideanCps {
  int d = 1;
  int n = 0;
  Eigen::MatrixXd lifted;   // (d+n) x s
  QMat lifted_exact;        // same shape, or empty
  long disc = 0;
  Eigen::MatrixXd kernel;   // s x n orthonormal basis of Ker(embed), or empty
  double covolume = 0;
  double star_tol = 0;      // numeric uncertainty of star images (0: exact/ideal)

  int s() const { return d + n; }
  bool exact() const { return lifted_exact.size() > 0; }
  Eigen::MatrixXd phys() const { return lifted.topRows(d); }
  Eigen::MatrixXd star() const { return lifted.bottomRows(n); }
  const Eigen::MatrixXd& psi() const { return lifted; }
};

// Builds the cut-and-project scheme from an addressed sample and a
// linear approximation: orthonormal kernel basis of embed, star vectors
// from w_j = A v_j - e_j, lifted lattice, covolume. With an exact ideal
// map the Galois-star exact basis is attached as well.
EuclideanCps build_cps(const AddressedSample& as, const LinearApprox& approx);

// Convenience: build with the ideal map when available, else with the fit.
EuclideanCps build_cps_ideal(const AddressedSample& as);

Eigen::VectorXd star_map(const EuclideanCps& cps, const IVec& coords);
QVec exact_star(const EuclideanCps& cps, const IVec& coords);
Eigen::VectorXd phys_map(const EuclideanCps& cps, const IVec& coords);
QVec exact_phys(const EuclideanCps& cps, const IVec& coords);

struct MinimalityVerdict {
  bool minimal = true;
  Eigen::VectorXi witness;  // integer vector with A^T m ~ 0 when non-minimal
};

// Minimal address system iff Ker(A^T) meets Z^s only in 0; searched by
// lattice reduction over the rows of A.
MinimalityVerdict minimality_check(const Eigen::MatrixXd& A, double tol = 1e-6);

// (w, t) -> w + A t mod Z^s.
Eigen::VectorXd address_flow(const Eigen::VectorXd& w0, const Eigen::MatrixXd& A,
                             const Eigen::VectorXd& t);

// Max relative deviation of bin occupancy from uniform over a bins^s
// histogram of the orbit {A t mod Z^s} for t sampled across [0,T]^d.
double equidistribution_discrepancy(const Eigen::MatrixXd& A, double T, int bins,
                                    long long samples = 0);

// All lattice coordinate tuples m with psi * m inside the product box
// (physical block x internal block). Candidate ranges come from the dual
// basis; a suffix-interval bound prunes the coordinate tree. Throws
// UnboundedEnumeration past `guard` candidates.
std::vector<IVec> enumerate_lattice(const EuclideanCps& cps,
                                    const Eigen::VectorXd& phys_lo,
                                    const Eigen::VectorXd& phys_hi,
                                    const Eigen::VectorXd& int_lo,
                                    const Eigen::VectorXd& int_hi,
                                    long long guard = 100000000);

}  // namespace aperiodica
