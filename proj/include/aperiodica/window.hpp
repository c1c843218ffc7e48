#pragma once

#include "aperiodica/lagarias.hpp"

#include <optional>
#include <vector>

namespace aperiodica {

enum class WindowKind { box, ball, polytope, hull };

// Exact geometry backing a window: axis box bounds, or halfspace rows
// normals * x <= offsets. Polygonal hulls store their edge halfspaces.
struct ExactWindowGeom {
  bool is_box = false;
  QVec lo, hi;
  QMat normals;
  QVec offsets;
};

struct Window {
  int n = 1;
  WindowKind kind = WindowKind::box;

  Eigen::VectorXd lo, hi;       // box
  Eigen::VectorXd center;       // ball
  double radius = 0;            // ball
  Eigen::MatrixXd normals;      // polytope: F x n rows
  Eigen::VectorXd offsets;      // polytope: F
  Eigen::MatrixXd hull_points;  // hull: vertices (ordered CCW when n = 2)
  double inflation = 0;         // hull

  std::optional<ExactWindowGeom> exact;
  bool nonconvexity_warning = false;
};

enum class ContainMode { closed, interior };

Window box_window(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
Window box_window_exact(const QVec& lo, const QVec& hi);
Window ball_window(const Eigen::VectorXd& center, double radius);
Window polytope_window(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets);
Window polytope_window_exact(const QMat& normals, const QVec& offsets);

bool contains(const Window& w, const Eigen::VectorXd& x, ContainMode mode);
// Exact membership; nullopt when the window has no exact geometry.
std::optional<bool> exact_contains(const Window& w, const QVec& x, ContainMode mode);

// Distance from x to the window set (0 inside) and to its boundary.
double window_distance(const Window& w, const Eigen::VectorXd& x);
double boundary_distance(const Window& w, const Eigen::VectorXd& x);

std::pair<Eigen::VectorXd, Eigen::VectorXd> window_bbox(const Window& w);
double window_volume(const Window& w);  // exact for box/ball/polygon, else hull volume
Eigen::VectorXd window_centroid(const Window& w);

// Hull window over star images. With exact images (same row count) the
// hull and its halfspaces are exact. n <= 2.
Window minimal_window_estimate(const Eigen::MatrixXd& stars, double inflation,
                               const QMat* exact_stars = nullptr,
                               bool convexity_scan = true);

struct RegularityReport {
  std::vector<std::pair<double, double>> estimates;  // (scale, boundary estimate)
  enum class Verdict { regular_plausible, irregular_plausible } verdict;
};

RegularityReport boundary_measure_report(const Window& w,
                                         const std::vector<double>& scales);
RegularityReport::Verdict regularity_verdict(
    const std::vector<std::pair<double, double>>& estimates);

std::vector<Eigen::VectorXd> window_boundary_points(const Window& w, int count);
double window_hausdorff(const Window& a, const Window& b, int samples = 2048);

struct EuclideanCps;
struct NonSingularOptions {
  int trials = 64;
  std::uint64_t seed = 0;
  double clearance = 1e-6;
};

// Internal shift whose translated window boundary clears every star image
// of lattice points with physical part in `box`.
Eigen::VectorXd nonsingular_shift(const EuclideanCps& cps, const Window& w,
                                  const BoxRegion& box, const NonSingularOptions& opts);

struct RecoveredParameter {
  Eigen::VectorXd w;
  double diameter = 0;
  std::optional<QVec> w_exact;
};

// Intersection of s_L(gamma) - W over the sample points: exact halfspace
// intersection when everything is exact, otherwise a refined grid scan.
RecoveredParameter recover_parameter(const EuclideanCps& cps, const Window& w,
                                     const AddressedSample& as, double pitch = 1e-4);

}  // namespace aperiodica
