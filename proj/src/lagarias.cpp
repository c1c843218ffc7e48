#include "aperiodica/lagarias.hpp"

#include "aperiodica/errors.hpp"
#include "aperiodica/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <vector>

namespace aperiodica {

namespace {

Eigen::MatrixXd orthonormal_kernel(const Eigen::MatrixXd& v) {
  const int d = static_cast<int>(v.rows());
  const int s = static_cast<int>(v.cols());
  const int n = s - d;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullV);
  Eigen::MatrixXd k = svd.matrixV().rightCols(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) k.col(j) -= k.col(i).dot(k.col(j)) * k.col(i);
    k.col(j).normalize();
    for (int r = 0; r < s; ++r) {
      if (std::abs(k(r, j)) < 1e-12) continue;
      if (k(r, j) < 0) k.col(j) = -k.col(j);
      break;
    }
  }
  return k;
}

}  // namespace

EuclideanCps build_cps(const AddressedSample& as, const LinearApprox& approx) {
  const int d = as.base.dim;
  const int s = as.basis.s;
  if (s <= d)
    throw Error(ErrorKind::RankNotExceedingD, "internal space is trivial (s <= d)");
  const int n = s - d;

  EuclideanCps cps;
  cps.d = d;
  cps.n = n;
  cps.disc = as.basis.disc;
  const Eigen::MatrixXd v = as.basis.v;  // d x s
  cps.kernel = orthonormal_kernel(v);    // s x n

  // w_j = A v_j - e_j must lie in Ker(embed); star coordinates are the
  // kernel-basis coordinates of w_j.
  Eigen::MatrixXd w = approx.A * v - Eigen::MatrixXd::Identity(s, s);
  Eigen::MatrixXd resid = v * w;  // d x s, should vanish
  if (resid.cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorKind::ValidationError, "A fails embed(A v_j) = v_j");
  Eigen::MatrixXd vstar = cps.kernel.transpose() * w;  // n x s

  cps.lifted.resize(s, s);
  cps.lifted.topRows(d) = v;
  cps.lifted.bottomRows(n) = vstar;
  cps.covolume = std::abs(cps.lifted.determinant());
  if (cps.covolume < 1e-12)
    throw Error(ErrorKind::SingularLattice, "lifted lattice is singular");

  if (approx.ideal && as.basis.exact() && s == 2 * d && as.basis.disc > 0) {
    cps.lifted_exact.resize(s, s);
    cps.lifted_exact.topRows(d) = as.basis.v_exact;
    cps.lifted_exact.bottomRows(d) = galois_conj(as.basis.v_exact);
    if (qdet(cps.lifted_exact).is_zero()) {
      cps.lifted_exact.resize(0, 0);
    }
  }
  if (!approx.ideal) {
    cps.star_tol = 10.0 * approx.C / std::sqrt(static_cast<double>(as.base.size()));
  }
  return cps;
}

EuclideanCps build_cps_ideal(const AddressedSample& as) {
  if (auto ideal = ideal_linear_map(as)) return build_cps(as, *ideal);
  return build_cps(as, fit_linear_map(as));
}

Eigen::VectorXd star_map(const EuclideanCps& cps, const IVec& coords) {
  Eigen::VectorXd m(coords.size());
  for (Eigen::Index i = 0; i < coords.size(); ++i) m(i) = to_double(coords(i));
  return cps.star() * m;
}

QVec exact_star(const EuclideanCps& cps, const IVec& coords) {
  QVec out = QVec::Zero(cps.n);
  for (int k = 0; k < cps.n; ++k) {
    QuadExt acc(0);
    for (Eigen::Index j = 0; j < coords.size(); ++j)
      acc += cps.lifted_exact(cps.d + k, j) * QuadExt(Rational(coords(j)));
    out(k) = acc;
  }
  return out;
}

Eigen::VectorXd phys_map(const EuclideanCps& cps, const IVec& coords) {
  Eigen::VectorXd m(coords.size());
  for (Eigen::Index i = 0; i < coords.size(); ++i) m(i) = to_double(coords(i));
  return cps.phys() * m;
}

QVec exact_phys(const EuclideanCps& cps, const IVec& coords) {
  QVec out = QVec::Zero(cps.d);
  for (int k = 0; k < cps.d; ++k) {
    QuadExt acc(0);
    for (Eigen::Index j = 0; j < coords.size(); ++j)
      acc += cps.lifted_exact(k, j) * QuadExt(Rational(coords(j)));
    out(k) = acc;
  }
  return out;
}

MinimalityVerdict minimality_check(const Eigen::MatrixXd& A, double tol) {
  RelationOptions opts;
  opts.tol = tol;
  auto rels = lll_relations(A, opts);  // rows of A are the vectors
  MinimalityVerdict verdict;
  if (!rels.empty()) {
    verdict.minimal = false;
    verdict.witness = rels.front();
    for (const auto& r : rels)
      if (r.squaredNorm() < verdict.witness.squaredNorm()) verdict.witness = r;
  }
  return verdict;
}

Eigen::VectorXd address_flow(const Eigen::VectorXd& w0, const Eigen::MatrixXd& A,
                             const Eigen::VectorXd& t) {
  Eigen::VectorXd w = w0 + A * t;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) -= std::floor(w(i));
    if (w(i) >= 1.0) w(i) = 0.0;  // guard against floor rounding at 1-eps
  }
  return w;
}

double equidistribution_discrepancy(const Eigen::MatrixXd& A, double T, int bins,
                                    long long samples) {
  if (T <= 0 || bins < 2)
    throw Error(ErrorKind::ValidationError, "discrepancy needs T > 0, bins >= 2");
  const int s = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  long long cells = 1;
  for (int i = 0; i < s; ++i) {
    cells *= bins;
    if (cells > 100000000)
      throw Error(ErrorKind::ValidationError, "discrepancy: too many bins");
  }
  if (samples <= 0) {
    samples = std::max<long long>(40001, 2500LL * cells);
    samples = std::min<long long>(samples, 20000000);
  }

  // d = 1: evenly spaced grid over [0, T]. d >= 2: Kronecker sequence
  // over the box (plain grids alias against rational relations in A and
  // against the torus bins; the low-discrepancy path has no such spikes).
  static const double kR2[4] = {0.6180339887498949, 0.7548776662466927,
                                0.5698402909980532, 0.4328588752693751};
  std::vector<long long> counts(static_cast<std::size_t>(cells), 0);
  std::mutex merge_mutex;
  parallel_chunks(samples, [&](int, long long lo, long long hi) {
    std::vector<long long> local(static_cast<std::size_t>(cells), 0);
    Eigen::VectorXd t(d), w(s);
    for (long long k = lo; k < hi; ++k) {
      if (d == 1) {
        t(0) = T * static_cast<double>(k) / static_cast<double>(samples - 1);
      } else {
        for (int q = 0; q < d; ++q) {
          double g = kR2[(q + 1) % 4];
          double frac = std::fmod(static_cast<double>(k + 1) * g, 1.0);
          t(q) = T * frac;
        }
      }
      w = A * t;
      long long idx = 0;
      for (int i = 0; i < s; ++i) {
        double f = w(i) - std::floor(w(i));
        int b = std::min(bins - 1, static_cast<int>(f * bins));
        idx = idx * bins + b;
      }
      ++local[static_cast<std::size_t>(idx)];
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
  });

  const double uniform = static_cast<double>(samples) / static_cast<double>(cells);
  double worst = 0;
  for (long long c : counts)
    worst = std::max(worst, std::abs(static_cast<double>(c) - uniform) / uniform);
  return worst;
}

std::vector<IVec> enumerate_lattice(const EuclideanCps& cps,
                                    const Eigen::VectorXd& phys_lo,
                                    const Eigen::VectorXd& phys_hi,
                                    const Eigen::VectorXd& int_lo,
                                    const Eigen::VectorXd& int_hi,
                                    long long guard) {
  const int s = cps.s();
  const int d = cps.d;
  Eigen::VectorXd lo(s), hi(s);
  lo.head(d) = phys_lo;
  hi.head(d) = phys_hi;
  if (cps.n > 0) {
    lo.tail(cps.n) = int_lo;
    hi.tail(cps.n) = int_hi;
  }
  const double eps = 1e-9;

  Eigen::MatrixXd inv = cps.lifted.inverse();
  std::vector<long long> mlo(s), mhi(s);
  double count = 1;
  for (int j = 0; j < s; ++j) {
    double a = 0, b = 0;
    for (int k = 0; k < s; ++k) {
      double c = inv(j, k);
      a += std::min(c * lo(k), c * hi(k));
      b += std::max(c * lo(k), c * hi(k));
    }
    mlo[j] = static_cast<long long>(std::floor(a - eps));
    mhi[j] = static_cast<long long>(std::ceil(b + eps));
    count *= static_cast<double>(mhi[j] - mlo[j] + 1);
    if (count > static_cast<double>(guard))
      throw Error(ErrorKind::UnboundedEnumeration, "candidate box too large");
  }

  // Suffix interval hulls: bounds of sum_{k >= j} m_k vtilde_k.
  std::vector<Eigen::VectorXd> suf_lo(s + 1, Eigen::VectorXd::Zero(s));
  std::vector<Eigen::VectorXd> suf_hi(s + 1, Eigen::VectorXd::Zero(s));
  for (int j = s - 1; j >= 0; --j) {
    suf_lo[j] = suf_lo[j + 1];
    suf_hi[j] = suf_hi[j + 1];
    for (int i = 0; i < s; ++i) {
      double c = cps.lifted(i, j);
      suf_lo[j](i) += std::min(c * static_cast<double>(mlo[j]), c * static_cast<double>(mhi[j]));
      suf_hi[j](i) += std::max(c * static_cast<double>(mlo[j]), c * static_cast<double>(mhi[j]));
    }
  }

  std::vector<IVec> out;
  IVec m = IVec::Zero(s);
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(s);
  std::vector<long long> mval(s, 0);

  std::function<void(int)> dfs = [&](int j) {
    if (j == s - 1) {
      // Solve the last coordinate range directly from the box.
      double a = -std::numeric_limits<double>::infinity();
      double b = std::numeric_limits<double>::infinity();
      for (int i = 0; i < s; ++i) {
        double c = cps.lifted(i, j);
        double rlo = lo(i) - partial(i), rhi = hi(i) - partial(i);
        if (std::abs(c) < 1e-14) {
          if (rlo > eps || rhi < -eps) return;  // infeasible
          continue;
        }
        double x0 = rlo / c, x1 = rhi / c;
        a = std::max(a, std::min(x0, x1));
        b = std::min(b, std::max(x0, x1));
      }
      long long ja = std::max(mlo[j], static_cast<long long>(std::ceil(a - eps)));
      long long jb = std::min(mhi[j], static_cast<long long>(std::floor(b + eps)));
      for (long long v = ja; v <= jb; ++v) {
        m(j) = BigInt(v);
        out.push_back(m);
      }
      return;
    }
    for (long long v = mlo[j]; v <= mhi[j]; ++v) {
      bool ok = true;
      for (int i = 0; i < s && ok; ++i) {
        double pi = partial(i) + cps.lifted(i, j) * static_cast<double>(v);
        if (pi + suf_lo[j + 1](i) > hi(i) + eps || pi + suf_hi[j + 1](i) < lo(i) - eps)
          ok = false;
      }
      if (!ok) continue;
      for (int i = 0; i < s; ++i) partial(i) += cps.lifted(i, j) * static_cast<double>(v);
      m(j) = BigInt(v);
      dfs(j + 1);
      for (int i = 0; i < s; ++i) partial(i) -= cps.lifted(i, j) * static_cast<double>(v);
    }
  };
  dfs(0);
  return out;
}

}  // namespace aperiodica
