#pragma once

#include "aperiodica/exact_arith.hpp"
#include "aperiodica/point_sample.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace aperiodica {

enum class Provenance { declared, discovered };

// Basis of the difference group <Lambda - Lambda>, columns = generators.
struct GeneratorBasis {
  int s = 0;
  Eigen::MatrixXd v;  // d x s
  QMat v_exact;       // d x s, empty when numeric
  long disc = 0;
  Provenance provenance = Provenance::discovered;
  bool exact() const { return v_exact.size() > 0; }
};

// A sample translated so the base point (closest to the box center)
// sits at the origin, with the address map phi(t) of every point.
struct AddressedSample {
  PointSample base;
  GeneratorBasis basis;
  IMat coords;  // N x s
  int base_index = 0;
  Eigen::VectorXd base_point;  // base point in the original coordinates
};

struct GroupBasisResult {
  GeneratorBasis basis;
  AddressedSample addressed;
};

GroupBasisResult difference_group_basis(const PointSample& sample, double tol = 1e-6);

struct RankVerdict {
  int s = 0;
  bool exceeds_d = false;
};
RankVerdict rank(const AddressedSample& as);

struct LinearApprox {
  Eigen::MatrixXd A;  // s x d matrix of the linear map
  double C = 0;       // sup deviation over the sample
  std::vector<std::pair<double, double>> profile;  // (R, C(R)), increasing R
  bool ideal = false;
  QMat A_exact;  // exact matrix when the map is the ideal one
};

// Constrained least squares: A = A0 + K M with embed(A t) = t exactly.
LinearApprox fit_linear_map(const AddressedSample& as);

// The ideal map when it is algebraically determined: s == d (embed is
// invertible) or s == 2 d over a quadratic field, where the Galois
// conjugate supplies the bounded complement.
std::optional<LinearApprox> ideal_linear_map(const AddressedSample& as);

double sup_deviation_within(const AddressedSample& as, const Eigen::MatrixXd& A,
                            double radius);

std::vector<std::pair<double, double>> deviation_profile(
    const AddressedSample& as, const Eigen::MatrixXd& A, int levels = 8);

enum class MeyerVerdict { meyer_plausible, rejected };
MeyerVerdict meyer_test(const LinearApprox& approx, double window_ratio = 0.1);

// ell(t) - phi(t) for a sample point t (post-translation coordinates).
Eigen::VectorXd cocycle_value(const AddressedSample& as, const LinearApprox& approx,
                              const Eigen::VectorXd& t);

struct AnalysisReport {
  int s = 0;
  bool rank_exceeds_d = false;
  Eigen::MatrixXd A;
  double C = 0;
  std::vector<std::pair<double, double>> profile;
  MeyerVerdict verdict = MeyerVerdict::meyer_plausible;
};

AnalysisReport analyze_sample(const PointSample& sample, double tol = 1e-6);

}  // namespace aperiodica
