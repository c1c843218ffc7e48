#include "aperiodica/point_sample.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

namespace aperiodica {

BoxRegion make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  BoxRegion box;
  box.lo = lo;
  box.hi = hi;
  for (int i = 0; i < box.dim(); ++i)
    if (!(lo(i) <= hi(i))) throw Error(ErrorKind::ValidationError, "box: lo > hi");
  return box;
}

BoxRegion make_box(const QVec& lo, const QVec& hi) {
  BoxRegion box;
  box.lo.resize(lo.size());
  box.hi.resize(hi.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    box.lo(i) = lo(i).value();
    box.hi(i) = hi(i).value();
    if ((hi(i) - lo(i)).sign() < 0)
      throw Error(ErrorKind::ValidationError, "box: lo > hi");
  }
  box.exact = std::make_pair(lo, hi);
  return box;
}

BoxRegion BoxRegion::translated(const Eigen::VectorXd& t) const {
  BoxRegion out = *this;
  out.lo += t;
  out.hi += t;
  out.exact.reset();
  return out;
}

QVec PointSample::exact_position(int i) const {
  QVec p = QVec::Zero(dim);
  for (int k = 0; k < dim; ++k) {
    QuadExt acc(0);
    for (Eigen::Index j = 0; j < gens.cols(); ++j)
      acc += gens(k, j) * QuadExt(Rational(coords(i, j)));
    if (offset.size() > 0) acc -= offset(k);
    p(k) = acc;
  }
  return p;
}

void embed_positions(PointSample& sample) {
  if (!sample.exact()) return;
  const int n = static_cast<int>(sample.coords.rows());
  sample.positions.resize(n, sample.dim);
  for (int i = 0; i < n; ++i) {
    QVec p = sample.exact_position(i);
    for (int k = 0; k < sample.dim; ++k) sample.positions(i, k) = p(k).value();
  }
}

void validate_sample(const PointSample& sample) {
  const int n = sample.size();
  if (sample.positions.cols() != sample.dim)
    throw Error(ErrorKind::ValidationError, "points do not match dim");
  for (int i = 0; i < n; ++i) {
    if (sample.box.exact && sample.exact()) {
      QVec p = sample.exact_position(i);
      for (int k = 0; k < sample.dim; ++k) {
        if ((p(k) - sample.box.exact->first(k)).sign() < 0 ||
            (sample.box.exact->second(k) - p(k)).sign() < 0)
          throw Error(ErrorKind::ValidationError, "point outside box");
      }
    } else if (!sample.box.contains(sample.positions.row(i).transpose())) {
      throw Error(ErrorKind::ValidationError, "point outside box");
    }
  }
  if (sample.exact()) {
    if (sample.coords.rows() != n)
      throw Error(ErrorKind::ValidationError, "coords/positions size mismatch");
    std::map<std::vector<std::string>, int> seen;
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> key;
      for (Eigen::Index j = 0; j < sample.coords.cols(); ++j)
        key.push_back(sample.coords(i, j).str());
      if (!seen.emplace(key, i).second)
        throw Error(ErrorKind::ValidationError, "duplicate point");
    }
  }
  // Pairwise-distinct embedded positions: sort, then compare only
  // near-equal neighbours.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int k = 0; k < sample.dim; ++k)
      if (sample.positions(a, k) != sample.positions(b, k))
        return sample.positions(a, k) < sample.positions(b, k);
    return false;
  });
  for (int i = 0; i + 1 < n; ++i) {
    int a = order[i], b = order[i + 1];
    double dist = (sample.positions.row(a) - sample.positions.row(b)).norm();
    if (dist > 1e-9) continue;
    if (!sample.exact()) {
      if (dist == 0) throw Error(ErrorKind::ValidationError, "duplicate point");
      continue;
    }
    QVec pa = sample.exact_position(a), pb = sample.exact_position(b);
    bool same = true;
    for (int k = 0; k < sample.dim; ++k) same = same && (pa(k) == pb(k));
    if (same) throw Error(ErrorKind::ValidationError, "duplicate embedded point");
  }
}

DifferenceSet difference_set(const PointSample& sample, long long cap) {
  const int n = sample.size();
  if (n < 2) throw Error(ErrorKind::TooFewPoints, "difference_set needs >= 2 points");

  struct Entry {
    double norm;
    std::vector<long long> key;
    int i, j;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Entry e;
      e.i = i;
      e.j = j;
      e.norm = (sample.positions.row(i) - sample.positions.row(j)).norm();
      if (sample.exact()) {
        for (Eigen::Index c = 0; c < sample.coords.cols(); ++c)
          e.key.push_back(
              BigInt(sample.coords(i, c) - sample.coords(j, c)).convert_to<long long>());
      } else {
        for (int k = 0; k < sample.dim; ++k) {
          double x = sample.positions(i, k) - sample.positions(j, k);
          long long bits;
          std::memcpy(&bits, &x, sizeof(bits));
          e.key.push_back(bits);
        }
      }
      entries.push_back(std::move(e));
    }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.key < b.key;
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const Entry& a, const Entry& b) { return a.key == b.key; }),
                entries.end());
  if (static_cast<long long>(entries.size()) > cap) entries.resize(static_cast<std::size_t>(cap));

  DifferenceSet out;
  out.vectors.resize(static_cast<Eigen::Index>(entries.size()), sample.dim);
  if (sample.exact())
    out.coords.resize(static_cast<Eigen::Index>(entries.size()), sample.coords.cols());
  for (std::size_t r = 0; r < entries.size(); ++r) {
    out.vectors.row(static_cast<Eigen::Index>(r)) =
        sample.positions.row(entries[r].i) - sample.positions.row(entries[r].j);
    if (sample.exact())
      for (Eigen::Index c = 0; c < sample.coords.cols(); ++c)
        out.coords(static_cast<Eigen::Index>(r), c) =
            sample.coords(entries[r].i, c) - sample.coords(entries[r].j, c);
  }
  return out;
}

NearestIndex::NearestIndex(const Eigen::MatrixXd& points) : points_(points) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (d > 3) throw Error(ErrorKind::UnsupportedDimension, "NearestIndex: d <= 3");
  Eigen::VectorXd lo = points.colwise().minCoeff();
  Eigen::VectorXd hi = points.colwise().maxCoeff();
  double extent = std::max(1e-9, (hi - lo).maxCoeff());
  double target = std::pow(static_cast<double>(std::max(n, 1)), 1.0 / d);
  cell_ = std::max(1e-9, extent / std::max(1.0, target));
  origin_ = lo;
  dims_.resize(d);
  long long total = 1;
  for (int k = 0; k < d; ++k) {
    dims_(k) = static_cast<int>(std::floor((hi(k) - lo(k)) / cell_)) + 1;
    total *= dims_(k);
  }
  buckets_.resize(static_cast<std::size_t>(total));
  for (int i = 0; i < n; ++i)
    buckets_[static_cast<std::size_t>(bucket_of(points.row(i).transpose()))].push_back(i);
}

long long NearestIndex::bucket_of(const Eigen::VectorXd& x) const {
  long long idx = 0;
  for (int k = 0; k < x.size(); ++k) {
    long long c = static_cast<long long>(std::floor((x(k) - origin_(k)) / cell_));
    c = std::clamp(c, 0LL, static_cast<long long>(dims_(k)) - 1);
    idx = idx * dims_(k) + c;
  }
  return idx;
}

std::pair<int, double> NearestIndex::nearest(const Eigen::VectorXd& x) const {
  const int d = static_cast<int>(points_.cols());
  std::vector<long long> base(d);
  for (int k = 0; k < d; ++k) {
    long long c = static_cast<long long>(std::floor((x(k) - origin_(k)) / cell_));
    base[k] = std::clamp(c, 0LL, static_cast<long long>(dims_(k)) - 1);
  }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  long long max_ring = dims_.maxCoeff() + 1;
  for (long long ring = 0; ring <= max_ring; ++ring) {
    std::vector<long long> c(d, 0);
    std::function<void(int)> visit = [&](int k) {
      if (k == d) {
        bool on_ring = ring == 0;
        for (int q = 0; q < d && !on_ring; ++q)
          if (std::llabs(c[q] - base[q]) == ring) on_ring = true;
        if (!on_ring) return;
        long long idx = 0;
        for (int q = 0; q < d; ++q) idx = idx * dims_(q) + c[q];
        for (int i : buckets_[static_cast<std::size_t>(idx)]) {
          double dist = (points_.row(i).transpose() - x).norm();
          if (dist < best_d) { best_d = dist; best = i; }
        }
        return;
      }
      long long lo = std::max(0LL, base[k] - ring);
      long long hi = std::min<long long>(dims_(k) - 1, base[k] + ring);
      for (c[k] = lo; c[k] <= hi; ++c[k]) visit(k + 1);
    };
    visit(0);
    if (best >= 0 && best_d <= static_cast<double>(ring) * cell_) break;
  }
  return {best, best_d};
}

DeloneRadii delone_radii(const PointSample& sample) {
  const int n = sample.size();
  if (n < 2) throw Error(ErrorKind::TooFewPoints, "delone_radii needs >= 2 points");
  double min_dist = std::numeric_limits<double>::infinity();
  // Minimum pairwise distance: sweep on the first coordinate.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return sample.positions(a, 0) < sample.positions(b, 0);
  });
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dx = sample.positions(order[j], 0) - sample.positions(order[i], 0);
      if (dx >= min_dist) break;
      min_dist = std::min(
          min_dist, (sample.positions.row(order[i]) - sample.positions.row(order[j])).norm());
    }

  DeloneRadii radii;
  radii.r = min_dist / 2;

  // Covering radius on a grid of pitch r/2, box eroded by the running
  // estimate (two passes kill the edge inflation).
  NearestIndex index(sample.positions);
  double pitch = std::max(radii.r / 2, 1e-6);
  double erosion = 0;
  double R = 0;
  for (int pass = 0; pass < 2; ++pass) {
    R = 0;
    const int d = sample.dim;
    std::vector<long long> steps(d);
    long long total = 1;
    for (int k = 0; k < d; ++k) {
      double len = sample.box.hi(k) - sample.box.lo(k) - 2 * erosion;
      if (len < 0) { total = 0; break; }
      steps[k] = static_cast<long long>(std::floor(len / pitch));
      total *= steps[k] + 1;
      if (total > 20000000)
        throw Error(ErrorKind::ValidationError, "delone_radii: grid too large");
    }
    for (long long flat = 0; flat < total; ++flat) {
      long long rem = flat;
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k) {
        long long c = rem % (steps[k] + 1);
        rem /= steps[k] + 1;
        x(k) = sample.box.lo(k) + erosion + static_cast<double>(c) * pitch;
      }
      R = std::max(R, index.nearest(x).second);
    }
    erosion = R;
  }
  radii.R = std::max(R, radii.r);
  return radii;
}

FlcVerdict flc_check(const PointSample& sample, double tol) {
  if (sample.size() < 2)
    throw Error(ErrorKind::TooFewPoints, "flc_check needs >= 2 points");
  DifferenceSet diffs = difference_set(sample, 200000);
  const Eigen::Index m = diffs.vectors.rows();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    norms[static_cast<std::size_t>(i)] = diffs.vectors.row(i).norm();
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return norms[static_cast<std::size_t>(a)] < norms[static_cast<std::size_t>(b)]; });
  // Vectors within tol of each other have norms within tol: sliding window.
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (norms[static_cast<std::size_t>(order[j])] - norms[static_cast<std::size_t>(order[i])] > tol) break;
      double dist = (diffs.vectors.row(order[i]) - diffs.vectors.row(order[j])).norm();
      if (dist > tol) continue;
      if (!sample.exact()) {
        if (dist > 0) return FlcVerdict::violated;
        continue;
      }
      bool same = true;
      for (Eigen::Index c = 0; c < diffs.coords.cols(); ++c)
        same = same && diffs.coords(order[i], c) == diffs.coords(order[j], c);
      if (!same) return FlcVerdict::violated;
    }
  }
  return FlcVerdict::plausible;
}

SubstitutionRule substitution_rule_from_name(const std::string& name) {
  if (name == "fibonacci") return SubstitutionRule::fibonacci;
  if (name == "silver") return SubstitutionRule::silver;
  throw Error(ErrorKind::UnknownRule, "unknown substitution rule: " + name);
}

PointSample substitution_generate(SubstitutionRule rule, int iterations) {
  if (iterations < 1 || iterations > 40)
    throw Error(ErrorKind::ValidationError, "iterations must be in [1, 40]");

  std::vector<char> word = {'a'};
  for (int it = 0; it < iterations; ++it) {
    std::vector<char> next;
    next.reserve(word.size() * 3);
    for (char c : word) {
      if (rule == SubstitutionRule::fibonacci) {
        if (c == 'a') { next.push_back('a'); next.push_back('b'); }
        else next.push_back('a');
      } else {
        if (c == 'a') { next.push_back('a'); next.push_back('a'); next.push_back('b'); }
        else next.push_back('a');
      }
    }
    word.swap(next);
  }

  PointSample sample;
  sample.dim = 1;
  sample.mode = Mode::exact;
  sample.disc = rule == SubstitutionRule::fibonacci ? 5 : 2;
  sample.gens.resize(1, 2);
  sample.gens(0, 0) = QuadExt(1);
  if (rule == SubstitutionRule::fibonacci)
    sample.gens(0, 1) = QuadExt(Rational(1, 2), Rational(1, 2), 5);  // tau
  else
    sample.gens(0, 1) = QuadExt(Rational(0), Rational(1), 2);  // sqrt 2

  const int n = static_cast<int>(word.size());
  sample.coords = IMat::Zero(n, 2);
  BigInt ca = 0, cb = 0;
  for (int i = 0; i < n; ++i) {
    sample.coords(i, 0) = ca;
    sample.coords(i, 1) = cb;
    if (rule == SubstitutionRule::fibonacci) {
      if (word[i] == 'a') cb += 1;  // tile of length tau
      else ca += 1;                 // tile of length 1
    } else {
      if (word[i] == 'a') { ca += 1; cb += 1; }  // tile of length 1 + sqrt 2
      else ca += 1;
    }
  }
  embed_positions(sample);
  QuadExt total = sample.gens(0, 0) * QuadExt(Rational(ca)) +
                  sample.gens(0, 1) * QuadExt(Rational(cb));
  QVec lo(1), hi(1);
  lo(0) = QuadExt(0);
  hi(0) = total;
  sample.box = make_box(lo, hi);
  return sample;
}

}  // namespace aperiodica
