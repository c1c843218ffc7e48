#pragma once

#include "aperiodica/quad_ext.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aperiodica {

enum class Mode { exact, numeric };

struct BoxRegion {
  Eigen::VectorXd lo, hi;
  std::optional<std::pair<QVec, QVec>> exact;  // exact bounds when available

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const {
    double v = 1;
    for (int i = 0; i < dim(); ++i) v *= hi(i) - lo(i);
    return v;
  }
  bool contains(const Eigen::VectorXd& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x(i) < lo(i) || x(i) > hi(i)) return false;
    return true;
  }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  BoxRegion translated(const Eigen::VectorXd& t) const;
};

BoxRegion make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
BoxRegion make_box(const QVec& lo, const QVec& hi);

// A finite patch of a Delone set. Exact mode stores integer coordinates
// against the declared generator matrix (d x s, entries in Q(sqrt(disc)))
// plus embedded double positions; numeric mode stores positions only.
struct PointSample {
  int dim = 1;
  Mode mode = Mode::numeric;
  long disc = 0;
  QMat gens;                  // d x s (exact mode)
  IMat coords;                // N x s (exact mode)
  QVec offset;                // subtracted from every embedded point (may be empty)
  Eigen::MatrixXd positions;  // N x d
  BoxRegion box;

  int size() const { return static_cast<int>(positions.rows()); }
  bool exact() const { return mode == Mode::exact; }
  QVec exact_position(int i) const;  // exact mode only
};

// Recomputes embedded positions from coords and generators.
void embed_positions(PointSample& sample);

// Duplicate points, points outside the box, shape mismatches.
void validate_sample(const PointSample& sample);

struct DeloneRadii {
  double r = 0;  // packing radius
  double R = 0;  // covering radius estimate
};

struct DifferenceSet {
  Eigen::MatrixXd vectors;  // D x d difference vectors, shortest first
  IMat coords;              // D x s integer tuples (exact mode), else 0 x 0
};

DifferenceSet difference_set(const PointSample& sample, long long cap = 1000000);

DeloneRadii delone_radii(const PointSample& sample);

enum class FlcVerdict { plausible, violated };
FlcVerdict flc_check(const PointSample& sample, double tol);

enum class SubstitutionRule { fibonacci, silver };
SubstitutionRule substitution_rule_from_name(const std::string& name);

// Left endpoints of the tile sequence obtained by iterating the rule on
// the seed letter, as an exact sample (fibonacci over Z[tau], silver
// over Z[1+sqrt 2]).
PointSample substitution_generate(SubstitutionRule rule, int iterations);

// Nearest-neighbour index lookup over sample positions (d <= 3).
class NearestIndex {
 public:
  explicit NearestIndex(const Eigen::MatrixXd& points);
  // Returns (index, distance) of the nearest stored point.
  std::pair<int, double> nearest(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd points_;
  double cell_ = 1;
  Eigen::VectorXd origin_;
  std::vector<std::vector<int>> buckets_;
  Eigen::VectorXi dims_;
  long long bucket_of(const Eigen::VectorXd& x) const;
};

}  // namespace aperiodica
