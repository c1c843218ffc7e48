#include "aperiodica/address.hpp"

#include "aperiodica/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aperiodica {

namespace {

int pick_base_index(const PointSample& sample) {
  Eigen::VectorXd c = sample.box.center();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sample.size(); ++i) {
    double d = (sample.positions.row(i).transpose() - c).norm();
    if (d < best_d - 1e-12 ||
        (std::abs(d - best_d) <= 1e-12 && i < best)) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Solves x^T H = delta^T over Z for a row-staircase H; throws if delta
// is not in the row lattice.
IVec staircase_solve(const IMat& h, const IVec& delta) {
  const Eigen::Index r = h.rows(), s = h.cols();
  IVec x = IVec::Zero(r);
  IVec res = delta;
  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::Index piv = -1;
    for (Eigen::Index c = 0; c < s; ++c)
      if (h(k, c) != 0) { piv = c; break; }
    if (piv < 0) break;
    BigInt q = res(piv) / h(k, piv);
    if (q * h(k, piv) != res(piv))
      throw Error(ErrorKind::ValidationError, "difference outside the generated group");
    x(k) = q;
    for (Eigen::Index c = 0; c < s; ++c) res(c) -= q * h(k, c);
  }
  for (Eigen::Index c = 0; c < s; ++c)
    if (res(c) != 0)
      throw Error(ErrorKind::ValidationError, "difference outside the generated group");
  return x;
}

GroupBasisResult exact_group_basis(const PointSample& sample) {
  const int n = sample.size();
  const Eigen::Index s0 = sample.coords.cols();
  int base = pick_base_index(sample);

  IMat stack(n - 1, s0);
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i) {
    if (i == base) continue;
    for (Eigen::Index c = 0; c < s0; ++c)
      stack(row, c) = sample.coords(i, c) - sample.coords(base, c);
    ++row;
  }
  HnfResult h = hnf(stack);
  const int rank = h.rank;
  IMat basis_rows(rank, s0);
  for (int k = 0; k < rank; ++k)
    for (Eigen::Index c = 0; c < s0; ++c) basis_rows(k, c) = h.h(k, c);

  GeneratorBasis basis;
  basis.s = rank;
  basis.disc = sample.disc;
  basis.provenance = Provenance::discovered;
  basis.v_exact.resize(sample.dim, rank);
  for (int d = 0; d < sample.dim; ++d)
    for (int k = 0; k < rank; ++k) {
      QuadExt acc(0);
      for (Eigen::Index c = 0; c < s0; ++c)
        acc += sample.gens(d, c) * QuadExt(Rational(basis_rows(k, c)));
      basis.v_exact(d, k) = acc;
    }
  basis.v = to_double(basis.v_exact);

  // Real span must be all of R^d.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.v);
  if (svd.rank() < sample.dim ||
      svd.singularValues()(sample.dim - 1) < 1e-10)
    throw Error(ErrorKind::DegenerateSpan, "generators do not span R^d");

  AddressedSample as;
  as.base_index = base;
  as.base_point = sample.positions.row(base).transpose();
  as.basis = basis;
  as.coords.resize(n, rank);
  for (int i = 0; i < n; ++i) {
    IVec delta(s0);
    for (Eigen::Index c = 0; c < s0; ++c)
      delta(c) = sample.coords(i, c) - sample.coords(base, c);
    IVec x = staircase_solve(basis_rows, delta);
    for (int k = 0; k < rank; ++k) as.coords(i, k) = x(k);
  }

  as.base = sample;
  as.base.gens = basis.v_exact;
  as.base.disc = sample.disc;
  as.base.coords = as.coords;
  as.base.offset.resize(0);  // coordinates are already relative to the base point
  if (sample.box.exact) {
    QVec base_pos = sample.exact_position(base);
    QVec lo = sample.box.exact->first, hi = sample.box.exact->second;
    for (int k = 0; k < sample.dim; ++k) {
      lo(k) = lo(k) - base_pos(k);
      hi(k) = hi(k) - base_pos(k);
    }
    as.base.box = make_box(lo, hi);
  } else {
    as.base.box = sample.box.translated(-as.base_point);
  }
  embed_positions(as.base);
  return {basis, as};
}

// Numeric-mode discovery: greedy generators from shortest differences,
// membership decided by integer-relation search with an ambiguity band.
struct NumericGroup {
  std::vector<Eigen::VectorXd> gens;

  // Returns integer coordinates if v lies in the Z-span, std::nullopt if
  // independent; throws RelationAmbiguity in the gray zone.
  std::optional<Eigen::VectorXi> membership(const Eigen::VectorXd& v, double tol) {
    if (gens.empty()) return std::nullopt;
    const int k = static_cast<int>(gens.size());
    Eigen::MatrixXd rows(k + 1, v.size());
    for (int i = 0; i < k; ++i) rows.row(i) = gens[i].transpose();
    rows.row(k) = v.transpose();
    RelationOptions strict{tol, 1e10};
    auto rels = lll_relations(rows, strict);
    const Eigen::VectorXi* best = nullptr;
    for (const auto& r : rels) {
      if (r(k) == 0) continue;
      if (!best || std::abs(r(k)) < std::abs((*best)(k))) best = &r;
    }
    if (!best) {
      RelationOptions wide{tol * 10, 1e10};
      for (const auto& r : lll_relations(rows, wide))
        if (r(k) != 0)
          throw Error(ErrorKind::RelationAmbiguity,
                      "residual falls between tol and 10*tol");
      return std::nullopt;
    }
    if (std::abs((*best)(k)) == 1) {
      Eigen::VectorXi coords(k);
      int sign = (*best)(k);
      for (int i = 0; i < k; ++i) coords(i) = -sign * (*best)(i);
      return coords;
    }
    // Fractional membership: refine the group by the Hermite form of the
    // stacked coordinates over denominator q.
    int q = std::abs((*best)(k));
    IMat stack(k + 1, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) stack(i, j) = i == j ? BigInt(q) : BigInt(0);
    int sign = (*best)(k) > 0 ? 1 : -1;
    for (int j = 0; j < k; ++j) stack(k, j) = BigInt(-sign * (*best)(j));
    HnfResult h = hnf(stack);
    std::vector<Eigen::VectorXd> refined;
    for (int r = 0; r < h.rank; ++r) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
      for (int j = 0; j < k; ++j)
        g += (to_double(h.h(r, j)) / q) * gens[static_cast<std::size_t>(j)];
      refined.push_back(g);
    }
    gens = refined;
    return membership(v, tol);
  }
};

GroupBasisResult numeric_group_basis(const PointSample& sample, double tol) {
  const int n = sample.size();
  int base = pick_base_index(sample);
  Eigen::VectorXd base_pt = sample.positions.row(base).transpose();

  DifferenceSet diffs = difference_set(sample, 20000);
  NumericGroup group;
  for (Eigen::Index i = 0; i < diffs.vectors.rows(); ++i) {
    Eigen::VectorXd v = diffs.vectors.row(i).transpose();
    if (v.norm() < 1e-12) continue;
    if (!group.membership(v, tol)) group.gens.push_back(v);
  }
  if (group.gens.empty())
    throw Error(ErrorKind::TooFewPoints, "no nonzero differences");

  GeneratorBasis basis;
  basis.s = static_cast<int>(group.gens.size());
  basis.v.resize(sample.dim, basis.s);
  for (int j = 0; j < basis.s; ++j) basis.v.col(j) = group.gens[static_cast<std::size_t>(j)];
  basis.provenance = Provenance::discovered;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.v);
  if (svd.rank() < sample.dim)
    throw Error(ErrorKind::DegenerateSpan, "generators do not span R^d");

  AddressedSample as;
  as.base_index = base;
  as.base_point = base_pt;
  as.basis = basis;
  as.coords.resize(n, basis.s);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd delta = sample.positions.row(i).transpose() - base_pt;
    if (delta.norm() < 1e-12) {
      for (int k = 0; k < basis.s; ++k) as.coords(i, k) = 0;
      continue;
    }
    auto coords = group.membership(delta, tol);
    if (!coords)
      throw Error(ErrorKind::RelationAmbiguity,
                  "point does not resolve against the discovered group");
    for (int k = 0; k < basis.s; ++k) as.coords(i, k) = BigInt((*coords)(k));
  }

  as.base = sample;
  as.base.positions.rowwise() -= base_pt.transpose();
  as.base.box = sample.box.translated(-base_pt);
  return {basis, as};
}

}  // namespace

GroupBasisResult difference_group_basis(const PointSample& sample, double tol) {
  if (sample.size() < 2)
    throw Error(ErrorKind::TooFewPoints, "difference_group_basis needs >= 2 points");
  return sample.exact() ? exact_group_basis(sample) : numeric_group_basis(sample, tol);
}

RankVerdict rank(const AddressedSample& as) {
  return {as.basis.s, as.basis.s > as.base.dim};
}

namespace {

Eigen::MatrixXd kernel_of_embed(const Eigen::MatrixXd& v) {
  const int d = static_cast<int>(v.rows());
  const int s = static_cast<int>(v.cols());
  const int n = s - d;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullV);
  Eigen::MatrixXd k = svd.matrixV().rightCols(n);
  // Gram-Schmidt, then signs: first nonzero component positive.
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

LinearApprox fit_linear_map(const AddressedSample& as) {
  const int d = as.base.dim;
  const int s = as.basis.s;
  const int n_pts = as.base.size();
  const Eigen::MatrixXd& t = as.base.positions;  // N x d

  Eigen::JacobiSVD<Eigen::MatrixXd> tsvd(t);
  if (tsvd.rank() < d)
    throw Error(ErrorKind::DegenerateSpan, "sample does not span R^d");

  Eigen::MatrixXd coords(n_pts, s);
  for (int i = 0; i < n_pts; ++i)
    for (int j = 0; j < s; ++j) coords(i, j) = to_double(as.coords(i, j));

  Eigen::MatrixXd v = as.basis.v;  // d x s
  // Moore-Penrose section: V A0 = I.
  Eigen::MatrixXd a0 =
      v.transpose() * (v * v.transpose()).ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  LinearApprox out;
  if (s == d) {
    out.A = a0;
  } else {
    Eigen::MatrixXd k = kernel_of_embed(v);  // s x n
    Eigen::MatrixXd y = coords - t * a0.transpose();  // N x s, rows in Ker(V)
    Eigen::MatrixXd yk = y * k;                       // N x n
    Eigen::MatrixXd mt = t.colPivHouseholderQr().solve(yk);  // d x n
    out.A = a0 + k * mt.transpose();
  }
  out.C = 0;
  for (int i = 0; i < n_pts; ++i)
    out.C = std::max(out.C,
                     (coords.row(i).transpose() - out.A * t.row(i).transpose()).norm());
  out.profile = deviation_profile(as, out.A);
  return out;
}

std::optional<LinearApprox> ideal_linear_map(const AddressedSample& as) {
  if (!as.basis.exact()) return std::nullopt;
  const int d = as.base.dim;
  const int s = as.basis.s;
  QMat system;
  if (s == d) {
    system = as.basis.v_exact;
  } else if (s == 2 * d && as.basis.disc > 0) {
    system.resize(s, s);
    system.topRows(d) = as.basis.v_exact;
    system.bottomRows(d) = galois_conj(as.basis.v_exact);
  } else {
    return std::nullopt;
  }
  if (qdet(system).is_zero()) return std::nullopt;

  LinearApprox out;
  out.ideal = true;
  out.A_exact.resize(s, d);
  for (int col = 0; col < d; ++col) {
    QVec rhs = QVec::Zero(s);
    rhs(col) = QuadExt(1);
    QVec sol = qsolve(system, rhs);
    for (int r = 0; r < s; ++r) out.A_exact(r, col) = sol(r);
  }
  out.A = to_double(out.A_exact);
  out.C = sup_deviation_within(as, out.A, std::numeric_limits<double>::infinity());
  out.profile = deviation_profile(as, out.A);
  return out;
}

double sup_deviation_within(const AddressedSample& as, const Eigen::MatrixXd& A,
                            double radius) {
  double c = 0;
  for (int i = 0; i < as.base.size(); ++i) {
    Eigen::VectorXd t = as.base.positions.row(i).transpose();
    if (t.norm() > radius) continue;
    Eigen::VectorXd dev(as.basis.s);
    for (int j = 0; j < as.basis.s; ++j) dev(j) = to_double(as.coords(i, j));
    dev -= A * t;
    c = std::max(c, dev.norm());
  }
  return c;
}

std::vector<std::pair<double, double>> deviation_profile(
    const AddressedSample& as, const Eigen::MatrixXd& A, int levels) {
  double rmax = 0;
  for (int i = 0; i < as.base.size(); ++i)
    rmax = std::max(rmax, as.base.positions.row(i).norm());
  std::vector<std::pair<double, double>> profile;
  for (int k = levels - 1; k >= 0; --k) {
    double radius = rmax / std::pow(2.0, k);
    int inside = 0;
    for (int i = 0; i < as.base.size(); ++i)
      if (as.base.positions.row(i).norm() <= radius) ++inside;
    if (inside < 2) continue;
    profile.emplace_back(radius, sup_deviation_within(as, A, radius));
  }
  return profile;
}

MeyerVerdict meyer_test(const LinearApprox& approx, double window_ratio) {
  if (approx.profile.size() < 4)
    throw Error(ErrorKind::InsufficientProfile, "meyer_test needs >= 4 radii");
  double r_max = approx.profile.back().first;
  double c_max = approx.profile.back().second;
  double c_half = 0;
  for (const auto& [radius, c] : approx.profile)
    if (radius <= r_max / 2 + 1e-9) c_half = std::max(c_half, c);
  if (c_half == 0) {
    // Identically-zero half profile: bounded iff the full profile is zero too.
    return c_max == 0 ? MeyerVerdict::meyer_plausible : MeyerVerdict::rejected;
  }
  return c_max <= (1 + window_ratio) * c_half ? MeyerVerdict::meyer_plausible
                                              : MeyerVerdict::rejected;
}

Eigen::VectorXd cocycle_value(const AddressedSample& as, const LinearApprox& approx,
                              const Eigen::VectorXd& t) {
  for (int i = 0; i < as.base.size(); ++i) {
    if ((as.base.positions.row(i).transpose() - t).norm() <= 1e-9) {
      Eigen::VectorXd phi(as.basis.s);
      for (int j = 0; j < as.basis.s; ++j) phi(j) = to_double(as.coords(i, j));
      return approx.A * t - phi;
    }
  }
  throw Error(ErrorKind::PointNotInSample, "cocycle_value: t not in sample");
}

AnalysisReport analyze_sample(const PointSample& sample, double tol) {
  auto gb = difference_group_basis(sample, tol);
  LinearApprox fit = fit_linear_map(gb.addressed);
  AnalysisReport report;
  RankVerdict rk = rank(gb.addressed);
  report.s = rk.s;
  report.rank_exceeds_d = rk.exceeds_d;
  report.A = fit.A;
  report.C = fit.C;
  report.profile = fit.profile;
  report.verdict = meyer_test(fit);
  return report;
}

}  // namespace aperiodica
