#pragma once

#include "aperiodica/window.hpp"

#include <optional>
#include <string>

namespace aperiodica {

enum class CutMode { closed, interior };

// Cut-and-project generation data: lattice, window, shift pair (t, w),
// physical region. Exact shifts keep exact schemes exact end to end.
struct ModelSetSpec {
  EuclideanCps cps;
  Window window;
  Eigen::VectorXd t;  // physical shift
  Eigen::VectorXd w;  // internal shift
  std::optional<QVec> t_exact;
  std::optional<QVec> w_exact;
  BoxRegion box;

  bool exact() const {
    return cps.exact() && window.exact.has_value() &&
           (t.size() == 0 || t.isZero(0) || t_exact.has_value()) &&
           (w.size() == 0 || w.isZero(0) || w_exact.has_value());
  }
};

// { p1(psi m) - t : m in Z^s, p1(psi m) - t in box, p2(psi m) in w + W },
// closed or interior cut. Exact specs produce exact samples.
PointSample generate(const ModelSetSpec& spec, CutMode mode);

struct IntermodelVerdict {
  bool inside_sandwich = true;
  std::optional<Eigen::VectorXd> witness;
};

// Checks interior-cut subset of S subset of closed-cut on the spec box.
IntermodelVerdict intermodel_check(const ModelSetSpec& spec, const PointSample& sample);

double density_estimate(const PointSample& sample);

struct FiberResult {
  PointSample lower, upper;
  bool singular = false;
};

// Interior and closed cuts at a torus point (t, w); singular when they differ.
FiberResult fiber_points(const ModelSetSpec& base, const Eigen::VectorXd& t,
                         const Eigen::VectorXd& w,
                         const std::optional<QVec>& t_exact = std::nullopt,
                         const std::optional<QVec>& w_exact = std::nullopt);

struct RoundTripReport {
  long long original_count = 0;
  long long regenerated_count = 0;
  long long symmetric_difference = 0;
  bool rank_match = false;
  double window_hausdorff = 0;
  MinimalityVerdict minimality;
  MeyerVerdict meyer = MeyerVerdict::meyer_plausible;
  int s = 0;
  double C = 0;
  std::vector<std::pair<double, double>> profile;
  std::string failed_stage;  // empty when the full pipeline ran
};

// generate -> difference_group_basis -> rank -> fit -> meyer -> build_cps
// -> minimality -> window estimate -> recover -> regenerate -> compare.
RoundTripReport roundtrip_verify(const ModelSetSpec& ground_truth, const BoxRegion& box);

// The analysis arm of the round trip for raw samples (no ground truth):
// stops at the Meyer stage when the deviation profile grows.
RoundTripReport roundtrip_analyze_sample(const PointSample& sample);

}  // namespace aperiodica
