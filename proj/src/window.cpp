#include "aperiodica/window.hpp"

#include "aperiodica/errors.hpp"
#include "aperiodica/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aperiodica {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dist_point_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b) {
  Eigen::Vector2d e = b - a;
  double len2 = e.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  double t = std::clamp((p - a).dot(e) / len2, 0.0, 1.0);
  return (p - (a + t * e)).norm();
}

// Distance from x to the convex hull of `pts` (0 inside). Handles
// degenerate hulls (points, segments). pts ordered CCW when full-dim.
double dist_to_hull_2d(const Eigen::MatrixXd& pts, const Eigen::Vector2d& x) {
  const int m = static_cast<int>(pts.rows());
  if (m == 1) return (x - pts.row(0).transpose()).norm();
  if (m == 2)
    return dist_point_segment(x, pts.row(0).transpose(), pts.row(1).transpose());
  bool inside = true;
  double min_edge = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    Eigen::Vector2d a = pts.row(i).transpose();
    Eigen::Vector2d b = pts.row((i + 1) % m).transpose();
    Eigen::Vector2d e = b - a;
    double cross = e(0) * (x(1) - a(1)) - e(1) * (x(0) - a(0));
    if (cross < 0) inside = false;  // CCW: inside means left of every edge
    min_edge = std::min(min_edge, dist_point_segment(x, a, b));
  }
  return inside ? 0.0 : min_edge;
}

double hull_boundary_distance_2d(const Eigen::MatrixXd& pts, const Eigen::Vector2d& x) {
  const int m = static_cast<int>(pts.rows());
  if (m <= 2) return dist_to_hull_2d(pts, x);
  double min_edge = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    min_edge = std::min(min_edge, dist_point_segment(x, pts.row(i).transpose(),
                                                     pts.row((i + 1) % m).transpose()));
  return min_edge;
}

// Convex hull (monotone chain). When exact points are supplied the
// orientation and ordering predicates fall back to exact arithmetic on
// near-ties, so the vertex set is the true hull.
struct HullBuilder {
  const Eigen::MatrixXd& pts;
  const QMat* exact;

  int orient(int a, int b, int c) const {
    double cross = (pts(b, 0) - pts(a, 0)) * (pts(c, 1) - pts(a, 1)) -
                   (pts(b, 1) - pts(a, 1)) * (pts(c, 0) - pts(a, 0));
    double scale = std::abs(pts(b, 0) - pts(a, 0)) + std::abs(pts(b, 1) - pts(a, 1)) +
                   std::abs(pts(c, 0) - pts(a, 0)) + std::abs(pts(c, 1) - pts(a, 1));
    if (std::abs(cross) > 1e-9 * std::max(scale, 1.0) || !exact)
      return cross > 0 ? 1 : (cross < 0 ? -1 : 0);
    QuadExt ex = ((*exact)(b, 0) - (*exact)(a, 0)) * ((*exact)(c, 1) - (*exact)(a, 1)) -
                 ((*exact)(b, 1) - (*exact)(a, 1)) * ((*exact)(c, 0) - (*exact)(a, 0));
    return ex.sign();
  }

  bool less(int a, int b) const {
    if (std::abs(pts(a, 0) - pts(b, 0)) > 1e-9 || !exact) {
      if (pts(a, 0) != pts(b, 0)) return pts(a, 0) < pts(b, 0);
      return pts(a, 1) < pts(b, 1);
    }
    int sx = ((*exact)(a, 0) - (*exact)(b, 0)).sign();
    if (sx != 0) return sx < 0;
    return ((*exact)(a, 1) - (*exact)(b, 1)).sign() < 0;
  }

  bool equal(int a, int b) const {
    if (!exact)
      return pts(a, 0) == pts(b, 0) && pts(a, 1) == pts(b, 1);
    return ((*exact)(a, 0) - (*exact)(b, 0)).sign() == 0 &&
           ((*exact)(a, 1) - (*exact)(b, 1)).sign() == 0;
  }

  std::vector<int> build() const {
    const int n = static_cast<int>(pts.rows());
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return less(a, b); });
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](int a, int b) { return equal(a, b); }),
              idx.end());
    if (idx.size() <= 2) return idx;
    std::vector<int> hull;
    // Lower chain, then upper chain.
    for (int pass = 0; pass < 2; ++pass) {
      std::size_t start = hull.size() + 1;
      const auto& source = idx;
      auto begin = pass == 0 ? source.begin() : source.end() - 1;
      for (std::size_t step = 0; step < source.size(); ++step) {
        int p = pass == 0 ? source[step] : source[source.size() - 1 - step];
        while (hull.size() >= start &&
               orient(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 0)
          hull.pop_back();
        hull.push_back(p);
      }
      hull.pop_back();
      (void)begin;
    }
    return hull;
  }
};

}  // namespace

Window box_window(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Window w;
  w.n = static_cast<int>(lo.size());
  w.kind = WindowKind::box;
  w.lo = lo;
  w.hi = hi;
  return w;
}

Window box_window_exact(const QVec& lo, const QVec& hi) {
  Window w;
  w.n = static_cast<int>(lo.size());
  w.kind = WindowKind::box;
  w.lo.resize(w.n);
  w.hi.resize(w.n);
  for (int i = 0; i < w.n; ++i) {
    w.lo(i) = lo(i).value();
    w.hi(i) = hi(i).value();
  }
  ExactWindowGeom geom;
  geom.is_box = true;
  geom.lo = lo;
  geom.hi = hi;
  w.exact = geom;
  return w;
}

Window ball_window(const Eigen::VectorXd& center, double radius) {
  Window w;
  w.n = static_cast<int>(center.size());
  w.kind = WindowKind::ball;
  w.center = center;
  w.radius = radius;
  return w;
}

Window polytope_window(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets) {
  Window w;
  w.n = static_cast<int>(normals.cols());
  w.kind = WindowKind::polytope;
  w.normals = normals;
  w.offsets = offsets;
  return w;
}

Window polytope_window_exact(const QMat& normals, const QVec& offsets) {
  Window w;
  w.n = static_cast<int>(normals.cols());
  w.kind = WindowKind::polytope;
  w.normals = to_double(normals);
  w.offsets.resize(offsets.size());
  for (Eigen::Index i = 0; i < offsets.size(); ++i) w.offsets(i) = offsets(i).value();
  ExactWindowGeom geom;
  geom.is_box = false;
  geom.normals = normals;
  geom.offsets = offsets;
  w.exact = geom;
  return w;
}

bool contains(const Window& w, const Eigen::VectorXd& x, ContainMode mode) {
  if (x.size() != w.n)
    throw Error(ErrorKind::DimensionMismatch, "contains: point dim != window dim");
  const bool strict = mode == ContainMode::interior;
  switch (w.kind) {
    case WindowKind::box:
      for (int i = 0; i < w.n; ++i) {
        if (strict ? !(w.lo(i) < x(i) && x(i) < w.hi(i))
                   : !(w.lo(i) <= x(i) && x(i) <= w.hi(i)))
          return false;
      }
      return true;
    case WindowKind::ball: {
      double dist = (x - w.center).norm();
      return strict ? dist < w.radius : dist <= w.radius;
    }
    case WindowKind::polytope: {
      for (Eigen::Index f = 0; f < w.normals.rows(); ++f) {
        double v = w.normals.row(f).dot(x);
        if (strict ? !(v < w.offsets(f)) : !(v <= w.offsets(f))) return false;
      }
      return true;
    }
    case WindowKind::hull: {
      double dist = window_distance(w, x);
      if (!strict) return dist <= w.inflation;
      if (w.inflation > 0) return dist < w.inflation;
      // Inflation 0: interior of the hull itself.
      if (w.n == 1) {
        double lo = w.hull_points.col(0).minCoeff(), hi = w.hull_points.col(0).maxCoeff();
        return lo < x(0) && x(0) < hi;
      }
      const int m = static_cast<int>(w.hull_points.rows());
      if (m < 3) return false;
      for (int i = 0; i < m; ++i) {
        Eigen::Vector2d a = w.hull_points.row(i).transpose();
        Eigen::Vector2d b = w.hull_points.row((i + 1) % m).transpose();
        double cross = (b(0) - a(0)) * (x(1) - a(1)) - (b(1) - a(1)) * (x(0) - a(0));
        if (cross <= 0) return false;
      }
      return true;
    }
  }
  return false;
}

std::optional<bool> exact_contains(const Window& w, const QVec& x, ContainMode mode) {
  if (!w.exact) return std::nullopt;
  if (w.kind == WindowKind::hull && w.inflation != 0) return std::nullopt;
  const bool strict = mode == ContainMode::interior;
  const ExactWindowGeom& g = *w.exact;
  if (g.is_box) {
    for (Eigen::Index i = 0; i < g.lo.size(); ++i) {
      int slo = (x(i) - g.lo(i)).sign();
      int shi = (g.hi(i) - x(i)).sign();
      if (strict ? !(slo > 0 && shi > 0) : !(slo >= 0 && shi >= 0)) return false;
    }
    return true;
  }
  for (Eigen::Index f = 0; f < g.normals.rows(); ++f) {
    QuadExt v(0);
    for (Eigen::Index c = 0; c < g.normals.cols(); ++c) v += g.normals(f, c) * x(c);
    int sign = (g.offsets(f) - v).sign();
    if (strict ? !(sign > 0) : !(sign >= 0)) return false;
  }
  return true;
}

double window_distance(const Window& w, const Eigen::VectorXd& x) {
  switch (w.kind) {
    case WindowKind::box: {
      double acc = 0;
      for (int i = 0; i < w.n; ++i) {
        double d = std::max({w.lo(i) - x(i), x(i) - w.hi(i), 0.0});
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    case WindowKind::ball:
      return std::max(0.0, (x - w.center).norm() - w.radius);
    case WindowKind::polytope: {
      if (w.n == 1) {
        // Feasible interval of the halfspaces.
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index f = 0; f < w.normals.rows(); ++f) {
          double a = w.normals(f, 0), c = w.offsets(f);
          if (a > 0) hi = std::min(hi, c / a);
          else if (a < 0) lo = std::max(lo, c / a);
        }
        return std::max({lo - x(0), x(0) - hi, 0.0});
      }
      auto verts = window_boundary_points(w, 0);  // polygon vertices
      Eigen::MatrixXd pts(static_cast<Eigen::Index>(verts.size()), 2);
      for (std::size_t i = 0; i < verts.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
      return dist_to_hull_2d(pts, Eigen::Vector2d(x(0), x(1)));
    }
    case WindowKind::hull: {
      double base;
      if (w.n == 1) {
        double lo = w.hull_points.col(0).minCoeff(), hi = w.hull_points.col(0).maxCoeff();
        base = std::max({lo - x(0), x(0) - hi, 0.0});
      } else {
        base = dist_to_hull_2d(w.hull_points, Eigen::Vector2d(x(0), x(1)));
      }
      return std::max(0.0, base - w.inflation);
    }
  }
  return 0;
}

double boundary_distance(const Window& w, const Eigen::VectorXd& x) {
  switch (w.kind) {
    case WindowKind::box: {
      bool inside = contains(w, x, ContainMode::closed);
      if (!inside) return window_distance(w, x);
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < w.n; ++i) m = std::min({m, x(i) - w.lo(i), w.hi(i) - x(i)});
      return m;
    }
    case WindowKind::ball:
      return std::abs((x - w.center).norm() - w.radius);
    case WindowKind::polytope: {
      if (w.n == 1) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index f = 0; f < w.normals.rows(); ++f) {
          double a = w.normals(f, 0), c = w.offsets(f);
          if (a > 0) hi = std::min(hi, c / a);
          else if (a < 0) lo = std::max(lo, c / a);
        }
        return std::min(std::abs(x(0) - lo), std::abs(hi - x(0)));
      }
      auto verts = window_boundary_points(w, 0);
      Eigen::MatrixXd pts(static_cast<Eigen::Index>(verts.size()), 2);
      for (std::size_t i = 0; i < verts.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
      return hull_boundary_distance_2d(pts, Eigen::Vector2d(x(0), x(1)));
    }
    case WindowKind::hull: {
      double base;
      if (w.n == 1) {
        double lo = w.hull_points.col(0).minCoeff(), hi = w.hull_points.col(0).maxCoeff();
        if (w.inflation == 0) return std::min(std::abs(x(0) - lo), std::abs(hi - x(0)));
        base = std::max({lo - x(0), x(0) - hi, 0.0});
        if (base == 0) base = -std::min(x(0) - lo, hi - x(0));  // signed: inside < 0
        return std::abs(base - w.inflation);
      }
      if (w.inflation == 0) return hull_boundary_distance_2d(w.hull_points, Eigen::Vector2d(x(0), x(1)));
      double dist = dist_to_hull_2d(w.hull_points, Eigen::Vector2d(x(0), x(1)));
      if (dist > 0) return std::abs(dist - w.inflation);
      return w.inflation + hull_boundary_distance_2d(w.hull_points, Eigen::Vector2d(x(0), x(1)));
    }
  }
  return 0;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> window_bbox(const Window& w) {
  switch (w.kind) {
    case WindowKind::box:
      return {w.lo, w.hi};
    case WindowKind::ball:
      return {w.center.array() - w.radius, w.center.array() + w.radius};
    case WindowKind::polytope: {
      auto pts = window_boundary_points(w, 0);
      Eigen::VectorXd lo = Eigen::VectorXd::Constant(w.n, std::numeric_limits<double>::infinity());
      Eigen::VectorXd hi = -lo;
      for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      return {lo, hi};
    }
    case WindowKind::hull: {
      Eigen::VectorXd lo = w.hull_points.colwise().minCoeff().transpose();
      Eigen::VectorXd hi = w.hull_points.colwise().maxCoeff().transpose();
      return {lo.array() - w.inflation, hi.array() + w.inflation};
    }
  }
  return {w.lo, w.hi};
}

namespace {

double polygon_area(const Eigen::MatrixXd& verts) {
  double acc = 0;
  const int m = static_cast<int>(verts.rows());
  for (int i = 0; i < m; ++i) {
    const auto& a = verts.row(i);
    const auto& b = verts.row((i + 1) % m);
    acc += a(0) * b(1) - b(0) * a(1);
  }
  return std::abs(acc) / 2;
}

}  // namespace

double window_volume(const Window& w) {
  switch (w.kind) {
    case WindowKind::box: {
      double v = 1;
      for (int i = 0; i < w.n; ++i) v *= w.hi(i) - w.lo(i);
      return v;
    }
    case WindowKind::ball:
      if (w.n == 1) return 2 * w.radius;
      if (w.n == 2) return kPi * w.radius * w.radius;
      throw Error(ErrorKind::UnsupportedDimension, "window_volume: ball n <= 2");
    case WindowKind::polytope: {
      auto pts = window_boundary_points(w, 0);
      if (w.n == 1) {
        return std::abs(pts[1](0) - pts[0](0));
      }
      Eigen::MatrixXd verts(static_cast<Eigen::Index>(pts.size()), 2);
      for (std::size_t i = 0; i < pts.size(); ++i) verts.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
      return polygon_area(verts);
    }
    case WindowKind::hull: {
      if (w.n == 1) {
        double len = w.hull_points.col(0).maxCoeff() - w.hull_points.col(0).minCoeff();
        return len + 2 * w.inflation;
      }
      double area = w.hull_points.rows() >= 3 ? polygon_area(w.hull_points) : 0.0;
      double perim = 0;
      const int m = static_cast<int>(w.hull_points.rows());
      for (int i = 0; i < m && m >= 2; ++i)
        perim += (w.hull_points.row(i) - w.hull_points.row((i + 1) % m)).norm();
      return area + perim * w.inflation + kPi * w.inflation * w.inflation;
    }
  }
  return 0;
}

Eigen::VectorXd window_centroid(const Window& w) {
  switch (w.kind) {
    case WindowKind::box:
      return 0.5 * (w.lo + w.hi);
    case WindowKind::ball:
      return w.center;
    case WindowKind::polytope:
    case WindowKind::hull: {
      std::vector<Eigen::VectorXd> pts;
      if (w.kind == WindowKind::hull) {
        for (int i = 0; i < w.hull_points.rows(); ++i)
          pts.push_back(w.hull_points.row(i).transpose());
      } else {
        pts = window_boundary_points(w, 0);
      }
      if (w.n == 1) {
        double lo = pts[0](0), hi = pts[0](0);
        for (const auto& p : pts) {
          lo = std::min(lo, p(0));
          hi = std::max(hi, p(0));
        }
        Eigen::VectorXd c(1);
        c(0) = (lo + hi) / 2;
        return c;
      }
      // Area centroid of the polygon.
      double a2 = 0, cx = 0, cy = 0;
      const int m = static_cast<int>(pts.size());
      for (int i = 0; i < m; ++i) {
        const auto& p = pts[static_cast<std::size_t>(i)];
        const auto& q = pts[static_cast<std::size_t>((i + 1) % m)];
        double cross = p(0) * q(1) - q(0) * p(1);
        a2 += cross;
        cx += (p(0) + q(0)) * cross;
        cy += (p(1) + q(1)) * cross;
      }
      Eigen::VectorXd c(2);
      if (std::abs(a2) < 1e-14) {
        c.setZero();
        for (const auto& p : pts) c += p;
        c /= static_cast<double>(m);
        return c;
      }
      c << cx / (3 * a2), cy / (3 * a2);
      return c;
    }
  }
  return Eigen::VectorXd::Zero(w.n);
}

Window minimal_window_estimate(const Eigen::MatrixXd& stars, double inflation,
                               const QMat* exact_stars, bool convexity_scan) {
  const int n = static_cast<int>(stars.cols());
  const int count = static_cast<int>(stars.rows());
  if (n < 1 || n > 2)
    throw Error(ErrorKind::UnsupportedDimension, "window estimate: n <= 2");
  if (count < 1) throw Error(ErrorKind::DegenerateHull, "no star images");

  Window w;
  w.n = n;
  w.kind = WindowKind::hull;
  w.inflation = inflation;

  if (n == 1) {
    int imin = 0, imax = 0;
    for (int i = 1; i < count; ++i) {
      if (stars(i, 0) < stars(imin, 0)) imin = i;
      if (stars(i, 0) > stars(imax, 0)) imax = i;
    }
    if (exact_stars) {
      for (int i = 0; i < count; ++i) {
        if (((*exact_stars)(i, 0) - (*exact_stars)(imin, 0)).sign() < 0) imin = i;
        if (((*exact_stars)(i, 0) - (*exact_stars)(imax, 0)).sign() > 0) imax = i;
      }
    }
    double lo = stars(imin, 0), hi = stars(imax, 0);
    if (lo >= hi && inflation == 0)
      throw Error(ErrorKind::DegenerateHull, "all star images coincide");
    w.hull_points.resize(2, 1);
    w.hull_points << lo, hi;
    if (exact_stars && inflation == 0) {
      ExactWindowGeom geom;
      geom.is_box = true;
      geom.lo.resize(1);
      geom.hi.resize(1);
      geom.lo(0) = (*exact_stars)(imin, 0);
      geom.hi(0) = (*exact_stars)(imax, 0);
      w.exact = geom;
    }
  } else {
    HullBuilder builder{stars, exact_stars};
    std::vector<int> hull = builder.build();
    if (static_cast<int>(hull.size()) < 3 && inflation == 0)
      throw Error(ErrorKind::DegenerateHull, "star images are affinely degenerate");
    w.hull_points.resize(static_cast<Eigen::Index>(hull.size()), 2);
    for (std::size_t i = 0; i < hull.size(); ++i)
      w.hull_points.row(static_cast<Eigen::Index>(i)) = stars.row(hull[i]);
    if (exact_stars && inflation == 0) {
      // Edge halfspaces, exact. CCW edge p->q has outward normal (dy, -dx).
      const int m = static_cast<int>(hull.size());
      ExactWindowGeom geom;
      geom.is_box = false;
      geom.normals.resize(m, 2);
      geom.offsets.resize(m);
      for (int i = 0; i < m; ++i) {
        int p = hull[static_cast<std::size_t>(i)];
        int q = hull[static_cast<std::size_t>((i + 1) % m)];
        QuadExt dx = (*exact_stars)(q, 0) - (*exact_stars)(p, 0);
        QuadExt dy = (*exact_stars)(q, 1) - (*exact_stars)(p, 1);
        geom.normals(i, 0) = dy;
        geom.normals(i, 1) = QuadExt(0) - dx;
        geom.offsets(i) =
            geom.normals(i, 0) * (*exact_stars)(p, 0) + geom.normals(i, 1) * (*exact_stars)(p, 1);
      }
      w.exact = geom;
    }
  }

  // Non-convexity scan: inside-hull grid cells far from every image hint
  // that the true window is not convex.
  if (convexity_scan && count >= 8) {
    NearestIndex index(stars);
    std::vector<double> nn;
    for (int i = 0; i < count; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < count; ++j) {
        if (j == i) continue;
        best = std::min(best, (stars.row(i) - stars.row(j)).norm());
      }
      nn.push_back(best);
      if (count > 1200 && i > 600) break;  // the median stabilizes early
    }
    std::sort(nn.begin(), nn.end());
    double median = nn[nn.size() / 2];
    auto [lo, hi] = window_bbox(w);
    double pitch = std::max(median, (hi - lo).maxCoeff() / 64);
    long long holes = 0, total = 0;
    if (n == 1) {
      for (double x = lo(0); x <= hi(0); x += pitch) {
        Eigen::VectorXd p(1);
        p << x;
        if (!contains(w, p, ContainMode::closed)) continue;
        ++total;
        if (index.nearest(p).second > 3 * median) ++holes;
      }
    } else {
      for (double x = lo(0); x <= hi(0); x += pitch)
        for (double y = lo(1); y <= hi(1); y += pitch) {
          Eigen::VectorXd p(2);
          p << x, y;
          if (!contains(w, p, ContainMode::closed)) continue;
          ++total;
          if (index.nearest(p).second > 3 * median) ++holes;
        }
    }
    if (total > 0 && static_cast<double>(holes) / static_cast<double>(total) > 0.005)
      w.nonconvexity_warning = true;
  }
  return w;
}

RegularityReport::Verdict regularity_verdict(
    const std::vector<std::pair<double, double>>& estimates) {
  const double needed = std::log2(1.5);
  for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
    auto [h0, e0] = estimates[i];
    auto [h1, e1] = estimates[i + 1];
    if (e1 == 0) continue;  // boundary resolved away: consistent with measure zero
    if (e0 == 0) return RegularityReport::Verdict::irregular_plausible;
    double rate = std::log(e0 / e1) / std::log(h0 / h1);
    if (rate < needed - 1e-9) return RegularityReport::Verdict::irregular_plausible;
  }
  return RegularityReport::Verdict::regular_plausible;
}

RegularityReport boundary_measure_report(const Window& w,
                                         const std::vector<double>& scales) {
  if (scales.size() < 3)
    throw Error(ErrorKind::ValidationError, "need >= 3 scales");
  for (std::size_t i = 0; i + 1 < scales.size(); ++i)
    if (!(scales[i] > scales[i + 1]))
      throw Error(ErrorKind::ValidationError, "scales must be strictly decreasing");
  if (w.n > 2)
    throw Error(ErrorKind::UnsupportedDimension, "boundary report: n <= 2");

  RegularityReport report;
  auto [blo, bhi] = window_bbox(w);
  for (double h : scales) {
    // Grid anchored off-lattice so window boundaries do not sit on corners.
    Eigen::VectorXd anchor = blo.array() - h * 1.6180339887498949;
    long long cells = 0;
    if (w.n == 1) {
      long long steps = static_cast<long long>(std::ceil((bhi(0) - anchor(0)) / h)) + 2;
      for (long long i = 0; i < steps; ++i) {
        Eigen::VectorXd a(1), b(1);
        a << anchor(0) + static_cast<double>(i) * h;
        b << anchor(0) + static_cast<double>(i + 1) * h;
        bool in_a = contains(w, a, ContainMode::closed);
        bool in_b = contains(w, b, ContainMode::closed);
        if (in_a != in_b) ++cells;
      }
      report.estimates.emplace_back(h, static_cast<double>(cells) * h);
    } else {
      long long sx = static_cast<long long>(std::ceil((bhi(0) - anchor(0)) / h)) + 2;
      long long sy = static_cast<long long>(std::ceil((bhi(1) - anchor(1)) / h)) + 2;
      if (sx * sy > 30000000)
        throw Error(ErrorKind::ValidationError, "boundary report: grid too large");
      for (long long i = 0; i < sx; ++i)
        for (long long j = 0; j < sy; ++j) {
          int inside = 0;
          for (int ci = 0; ci < 2; ++ci)
            for (int cj = 0; cj < 2; ++cj) {
              Eigen::VectorXd p(2);
              p << anchor(0) + static_cast<double>(i + ci) * h,
                  anchor(1) + static_cast<double>(j + cj) * h;
              if (contains(w, p, ContainMode::closed)) ++inside;
            }
          if (inside > 0 && inside < 4) ++cells;
        }
      report.estimates.emplace_back(h, static_cast<double>(cells) * h * h);
    }
  }
  report.verdict = regularity_verdict(report.estimates);
  return report;
}

std::vector<Eigen::VectorXd> window_boundary_points(const Window& w, int count) {
  std::vector<Eigen::VectorXd> out;
  if (w.n == 1) {
    double lo, hi;
    switch (w.kind) {
      case WindowKind::box: lo = w.lo(0); hi = w.hi(0); break;
      case WindowKind::ball: lo = w.center(0) - w.radius; hi = w.center(0) + w.radius; break;
      case WindowKind::polytope: {
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index f = 0; f < w.normals.rows(); ++f) {
          double a = w.normals(f, 0), c = w.offsets(f);
          if (a > 0) hi = std::min(hi, c / a);
          else if (a < 0) lo = std::max(lo, c / a);
        }
        break;
      }
      case WindowKind::hull:
        lo = w.hull_points.col(0).minCoeff() - w.inflation;
        hi = w.hull_points.col(0).maxCoeff() + w.inflation;
        break;
      default: lo = hi = 0;
    }
    Eigen::VectorXd a(1), b(1);
    a << lo;
    b << hi;
    out.push_back(a);
    out.push_back(b);
    return out;
  }

  // n = 2: assemble the boundary polygon (or circle), then sample.
  std::vector<Eigen::Vector2d> poly;
  if (w.kind == WindowKind::ball) {
    int m = std::max(count, 64);
    for (int i = 0; i < m; ++i) {
      double a = 2 * kPi * i / m;
      Eigen::VectorXd p(2);
      p << w.center(0) + w.radius * std::cos(a), w.center(1) + w.radius * std::sin(a);
      out.push_back(p);
    }
    return out;
  }
  if (w.kind == WindowKind::box) {
    poly = {{w.lo(0), w.lo(1)}, {w.hi(0), w.lo(1)}, {w.hi(0), w.hi(1)}, {w.lo(0), w.hi(1)}};
  } else if (w.kind == WindowKind::polytope) {
    // Vertices: pairwise halfspace intersections that satisfy all constraints.
    const Eigen::Index f = w.normals.rows();
    std::vector<Eigen::Vector2d> verts;
    for (Eigen::Index i = 0; i < f; ++i)
      for (Eigen::Index j = i + 1; j < f; ++j) {
        Eigen::Matrix2d m;
        m << w.normals(i, 0), w.normals(i, 1), w.normals(j, 0), w.normals(j, 1);
        if (std::abs(m.determinant()) < 1e-12) continue;
        Eigen::Vector2d rhs(w.offsets(i), w.offsets(j));
        Eigen::Vector2d x = m.inverse() * rhs;
        bool ok = true;
        for (Eigen::Index k = 0; k < f && ok; ++k)
          if (w.normals.row(k).dot(x) > w.offsets(k) + 1e-9) ok = false;
        if (ok) verts.push_back(x);
      }
    if (verts.empty())
      throw Error(ErrorKind::ValidationError, "empty polytope");
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& v : verts) c += v;
    c /= static_cast<double>(verts.size());
    std::sort(verts.begin(), verts.end(), [&](const auto& a, const auto& b) {
      return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
    });
    verts.erase(std::unique(verts.begin(), verts.end(),
                            [](const auto& a, const auto& b) { return (a - b).norm() < 1e-9; }),
                verts.end());
    poly.assign(verts.begin(), verts.end());
  } else {  // hull
    for (int i = 0; i < w.hull_points.rows(); ++i)
      poly.emplace_back(w.hull_points(i, 0), w.hull_points(i, 1));
    if (w.inflation > 0) {
      // Push edges outward; corner arcs are sampled separately below.
      std::vector<Eigen::Vector2d> inflated;
      const int m = static_cast<int>(poly.size());
      if (m == 1) {
        Window b = ball_window(poly[0], w.inflation);
        return window_boundary_points(b, count);
      }
      for (int i = 0; i < m; ++i) {
        Eigen::Vector2d a = poly[static_cast<std::size_t>(i)];
        Eigen::Vector2d b = poly[static_cast<std::size_t>((i + 1) % m)];
        Eigen::Vector2d e = (b - a).normalized();
        Eigen::Vector2d nrm(e(1), -e(0));
        inflated.push_back(a + w.inflation * nrm);
        inflated.push_back(b + w.inflation * nrm);
      }
      poly = inflated;
    }
  }

  if (count <= 0) {
    for (const auto& p : poly) {
      Eigen::VectorXd v(2);
      v << p(0), p(1);
      out.push_back(v);
    }
    return out;
  }
  double perim = 0;
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) perim += (poly[(i + 1) % m] - poly[i]).norm();
  double step = perim / count;
  for (int i = 0; i < m; ++i) {
    Eigen::Vector2d a = poly[static_cast<std::size_t>(i)];
    Eigen::Vector2d b = poly[static_cast<std::size_t>((i + 1) % m)];
    double len = (b - a).norm();
    int pieces = std::max(1, static_cast<int>(std::floor(len / step)));
    for (int k = 0; k < pieces; ++k) {
      Eigen::VectorXd p(2);
      Eigen::Vector2d q = a + (static_cast<double>(k) / pieces) * (b - a);
      p << q(0), q(1);
      out.push_back(p);
    }
  }
  return out;
}

double window_hausdorff(const Window& a, const Window& b, int samples) {
  auto pa = window_boundary_points(a, samples);
  auto pb = window_boundary_points(b, samples);
  auto directed = [](const std::vector<Eigen::VectorXd>& from,
                     const std::vector<Eigen::VectorXd>& to) {
    double worst = 0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

Eigen::VectorXd nonsingular_shift(const EuclideanCps& cps, const Window& w,
                                  const BoxRegion& box, const NonSingularOptions& opts) {
  if (opts.trials < 1)
    throw Error(ErrorKind::ValidationError, "nonsingular_shift: trials >= 1");
  auto [wlo, whi] = window_bbox(w);
  Eigen::VectorXd width = (whi - wlo).cwiseMax(1e-9);
  // Candidate shifts live in the window's bounding box inflated by one
  // width on each side; stars are collected from the matching region.
  Eigen::VectorXd span_lo = wlo - 2 * width, span_hi = whi + 2 * width;
  auto lattice = enumerate_lattice(cps, box.lo, box.hi, span_lo, span_hi);
  std::vector<Eigen::VectorXd> stars;
  stars.reserve(lattice.size());
  for (const auto& m : lattice) stars.push_back(star_map(cps, m));

  double clearance = std::max(opts.clearance, cps.star_tol);
  SplitMix64 rng(opts.seed);
  for (int trial = 0; trial < opts.trials; ++trial) {
    Eigen::VectorXd shift(cps.n);
    for (int i = 0; i < cps.n; ++i)
      shift(i) = rng.uniform(wlo(i) - width(i), whi(i) + width(i));
    bool ok = true;
    for (const auto& star : stars) {
      if (boundary_distance(w, star - shift) < clearance) { ok = false; break; }
    }
    if (ok) return shift;
  }
  throw Error(ErrorKind::NoNonSingularFound, "no non-singular shift found");
}

namespace {

RecoveredParameter exact_recover(const EuclideanCps& cps, const Window& w,
                                 const AddressedSample& as) {
  const ExactWindowGeom& g = *w.exact;
  const int n = cps.n;
  const int count = as.base.size();
  RecoveredParameter out;

  // Collect exact stars.
  std::vector<QVec> stars;
  stars.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    IVec c(as.coords.cols());
    for (Eigen::Index j = 0; j < as.coords.cols(); ++j) c(j) = as.coords(i, j);
    stars.push_back(exact_star(cps, c));
  }

  if (g.is_box) {
    QVec lo(n), hi(n);
    for (int k = 0; k < n; ++k) {
      QuadExt max_s = stars[0](k), min_s = stars[0](k);
      for (const auto& s : stars) {
        if ((s(k) - max_s).sign() > 0) max_s = s(k);
        if ((s(k) - min_s).sign() < 0) min_s = s(k);
      }
      lo(k) = max_s - g.hi(k);
      hi(k) = min_s - g.lo(k);
      if ((hi(k) - lo(k)).sign() < 0)
        throw Error(ErrorKind::EmptyIntersection, "sample inconsistent with window");
    }
    out.w_exact = QVec(n);
    out.w.resize(n);
    double diam2 = 0;
    for (int k = 0; k < n; ++k) {
      (*out.w_exact)(k) = (lo(k) + hi(k)) / QuadExt(2);
      out.w(k) = (*out.w_exact)(k).value();
      double width = (hi(k) - lo(k)).value();
      diam2 += width * width;
    }
    out.diameter = std::sqrt(diam2);
    return out;
  }

  // Halfspace form: x in cap_i (s_i - W) iff for every face f,
  // (-n_f) . x <= c_f - max_i (n_f . s_i).
  const Eigen::Index faces = g.normals.rows();
  QMat rn(faces, 2);
  QVec rc(faces);
  for (Eigen::Index f = 0; f < faces; ++f) {
    QuadExt worst(0);
    bool first = true;
    for (const auto& s : stars) {
      QuadExt v = g.normals(f, 0) * s(0) + g.normals(f, 1) * s(1);
      if (first || (v - worst).sign() > 0) { worst = v; first = false; }
    }
    rn(f, 0) = QuadExt(0) - g.normals(f, 0);
    rn(f, 1) = QuadExt(0) - g.normals(f, 1);
    rc(f) = g.offsets(f) - worst;
  }
  // Vertex enumeration over the exact field.
  std::vector<QVec> verts;
  for (Eigen::Index i = 0; i < faces; ++i)
    for (Eigen::Index j = i + 1; j < faces; ++j) {
      QuadExt det = rn(i, 0) * rn(j, 1) - rn(i, 1) * rn(j, 0);
      if (det.is_zero()) continue;
      QVec x(2);
      x(0) = (rc(i) * rn(j, 1) - rn(i, 1) * rc(j)) / det;
      x(1) = (rn(i, 0) * rc(j) - rc(i) * rn(j, 0)) / det;
      bool ok = true;
      for (Eigen::Index k = 0; k < faces && ok; ++k) {
        QuadExt v = rn(k, 0) * x(0) + rn(k, 1) * x(1);
        if ((rc(k) - v).sign() < 0) ok = false;
      }
      if (!ok) continue;
      bool dup = false;
      for (const auto& u : verts)
        if ((u(0) - x(0)).sign() == 0 && (u(1) - x(1)).sign() == 0) dup = true;
      if (!dup) verts.push_back(x);
    }
  if (verts.empty())
    throw Error(ErrorKind::EmptyIntersection, "sample inconsistent with window");
  out.w_exact = QVec(2);
  QuadExt cx(0), cy(0);
  for (const auto& v : verts) {
    cx += v(0);
    cy += v(1);
  }
  (*out.w_exact)(0) = cx / QuadExt(Rational(static_cast<long long>(verts.size())));
  (*out.w_exact)(1) = cy / QuadExt(Rational(static_cast<long long>(verts.size())));
  out.w.resize(2);
  out.w << (*out.w_exact)(0).value(), (*out.w_exact)(1).value();
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j) {
      double dx = verts[i](0).value() - verts[j](0).value();
      double dy = verts[i](1).value() - verts[j](1).value();
      out.diameter = std::max(out.diameter, std::hypot(dx, dy));
    }
  return out;
}

}  // namespace

RecoveredParameter recover_parameter(const EuclideanCps& cps, const Window& w,
                                     const AddressedSample& as, double pitch) {
  if (as.base.size() < 1)
    throw Error(ErrorKind::TooFewPoints, "recover_parameter needs a sample");
  bool base_ok = false;
  for (int i = 0; i < as.base.size(); ++i)
    if (as.base.positions.row(i).norm() < 1e-9) base_ok = true;
  if (!base_ok)
    throw Error(ErrorKind::ValidationError, "recover_parameter: 0 not in sample");

  if (cps.exact() && w.exact && as.base.exact() &&
      !(w.kind == WindowKind::hull && w.inflation != 0) &&
      (w.exact->is_box || cps.n == 2))
    return exact_recover(cps, w, as);

  // Grid path: multiresolution refinement from the bounding region of
  // (star(0) - W) = -W down to the requested pitch.
  const int n = cps.n;
  std::vector<Eigen::VectorXd> stars;
  for (int i = 0; i < as.base.size(); ++i) {
    IVec c(as.coords.cols());
    for (Eigen::Index j = 0; j < as.coords.cols(); ++j) c(j) = as.coords(i, j);
    stars.push_back(star_map(cps, c));
  }
  auto [wlo, whi] = window_bbox(w);
  Eigen::VectorXd lo = -whi, hi = -wlo;
  double extent = (hi - lo).maxCoeff();
  double level_pitch = std::max(extent / 32, pitch);

  std::vector<Eigen::VectorXd> survivors;
  auto pass = [&](const std::vector<Eigen::VectorXd>& seeds, double h_prev, double h) {
    std::vector<Eigen::VectorXd> next;
    auto test = [&](const Eigen::VectorXd& x, double slack) {
      for (const auto& s : stars)
        if (window_distance(w, s - x) > slack) return false;
      return true;
    };
    auto emit = [&](const Eigen::VectorXd& x) {
      if (test(x, h * 1.8)) next.push_back(x);
    };
    if (seeds.empty()) {
      // Initial sweep over [-W].
      std::vector<long long> steps(n);
      long long total = 1;
      for (int k = 0; k < n; ++k) {
        steps[k] = static_cast<long long>(std::ceil((hi(k) - lo(k)) / h)) + 1;
        total *= steps[k] + 1;
      }
      for (long long flat = 0; flat < total; ++flat) {
        long long rem = flat;
        Eigen::VectorXd x(n);
        for (int k = 0; k < n; ++k) {
          x(k) = lo(k) + static_cast<double>(rem % (steps[k] + 1)) * h;
          rem /= steps[k] + 1;
        }
        emit(x);
      }
    } else {
      long long reach = static_cast<long long>(std::ceil(h_prev / h)) + 1;
      std::vector<Eigen::VectorXd> local;
      for (const auto& seed : seeds) {
        std::vector<long long> c(n, -reach);
        while (true) {
          Eigen::VectorXd x = seed;
          for (int k = 0; k < n; ++k) x(k) += static_cast<double>(c[k]) * h;
          emit(x);
          int k = 0;
          for (; k < n; ++k) {
            if (c[k] < reach) { ++c[k]; break; }
            c[k] = -reach;
          }
          if (k == n) break;
        }
      }
      // Deduplicate grid points from overlapping neighborhoods.
      std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) {
        for (int k = 0; k < a.size(); ++k)
          if (a(k) != b(k)) return a(k) < b(k);
        return false;
      });
      next.erase(std::unique(next.begin(), next.end(),
                             [h](const auto& a, const auto& b) {
                               return (a - b).norm() < h * 1e-6;
                             }),
                 next.end());
    }
    return next;
  };

  double h = level_pitch, h_prev = 0;
  survivors = pass({}, 0, h);
  while (h > pitch) {
    h_prev = h;
    h = std::max(h / 4, pitch);
    survivors = pass(survivors, h_prev, h);
    if (survivors.empty()) break;
    if (survivors.size() > 2000000)
      throw Error(ErrorKind::ValidationError, "recover_parameter: region too large");
  }
  if (survivors.empty())
    throw Error(ErrorKind::EmptyIntersection, "sample inconsistent with window");

  // Strict filter at the final pitch; fall back to the slack survivors
  // when the region is thinner than the grid.
  std::vector<Eigen::VectorXd> strict;
  for (const auto& x : survivors) {
    bool ok = true;
    for (const auto& s : stars)
      if (!contains(w, s - x, ContainMode::closed)) { ok = false; break; }
    if (ok) strict.push_back(x);
  }
  const auto& region = strict.empty() ? survivors : strict;
  RecoveredParameter out;
  out.w = Eigen::VectorXd::Zero(n);
  for (const auto& x : region) out.w += x;
  out.w /= static_cast<double>(region.size());
  for (std::size_t i = 0; i < region.size(); ++i)
    for (std::size_t j = i + 1; j < region.size(); ++j)
      out.diameter = std::max(out.diameter, (region[i] - region[j]).norm());
  if (strict.empty()) out.diameter = std::max(out.diameter, pitch);
  return out;
}

}  // namespace aperiodica
