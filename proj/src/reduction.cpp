#include "czono/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "czono/linalg.hpp"
#include "czono/lp.hpp"

namespace czono {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kTieTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  }
  return out;
}

Eigen::MatrixXd drop_row(const Eigen::MatrixXd& m, Eigen::Index row) {
  Eigen::MatrixXd out(m.rows() - 1, m.cols());
  out.topRows(row) = m.topRows(row);
  out.bottomRows(m.rows() - 1 - row) = m.bottomRows(m.rows() - 1 - row);
  return out;
}

Eigen::VectorXd drop_entry(const Eigen::VectorXd& v, Eigen::Index i) {
  Eigen::VectorXd out(v.size() - 1);
  out.head(i) = v.head(i);
  out.tail(v.size() - 1 - i) = v.tail(v.size() - 1 - i);
  return out;
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& m, Eigen::Index col) {
  Eigen::MatrixXd out(m.rows(), m.cols() - 1);
  out.leftCols(col) = m.leftCols(col);
  out.rightCols(m.cols() - 1 - col) = m.rightCols(m.cols() - 1 - col);
  return out;
}

// Generator-boxing step of Method A applied to an explicit column split.
Zonotope box_columns(const Eigen::MatrixXd& keep, const Eigen::MatrixXd& boxed,
                     const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) q(i, i) = boxed.row(i).cwiseAbs().sum();
  Eigen::MatrixXd g(n, keep.cols() + n);
  g << keep, q;
  return Zonotope(std::move(g), c);
}

std::vector<Eigen::Index> columns_by_descending_norm(const Eigen::MatrixXd& g) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(g.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return g.col(a).norm() > g.col(b).norm();
  });
  return order;
}

Zonotope reduce_method_a(const Zonotope& z, int target) {
  const Eigen::Index n = z.dim();
  const std::vector<Eigen::Index> order = columns_by_descending_norm(z.G);
  const Eigen::Index kept = static_cast<Eigen::Index>(target) - n;
  std::vector<Eigen::Index> head(order.begin(), order.begin() + kept);
  std::vector<Eigen::Index> tail(order.begin() + kept, order.end());
  return box_columns(select_columns(z.G, head), select_columns(z.G, tail), z.c);
}

// One Method B pass: absorb the cheapest non-pivot generator into the
// Gauss-Jordan pivot parallelotope. Returns false when the parallelotope is
// rank-deficient and Method A must take over.
bool reduce_method_b_pass(Zonotope& z) {
  const Eigen::Index n = z.dim();
  const GaussJordanResult gj = gauss_jordan_full_pivot(z.G, kPivotTol);
  if (gj.rank < n) return false;

  std::vector<Eigen::Index> basis(gj.col_perm.begin(), gj.col_perm.begin() + n);
  std::vector<Eigen::Index> rest(gj.col_perm.begin() + n, gj.col_perm.end());
  std::sort(rest.begin(), rest.end());

  const Eigen::MatrixXd t = select_columns(z.G, basis);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);

  double best_score = kInf;
  Eigen::Index best = -1;
  Eigen::VectorXd best_ratio;
  for (const Eigen::Index v : rest) {
    const Eigen::VectorXd ratio = lu.solve(z.G.col(v)).cwiseAbs();
    double prod = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) prod *= 1.0 + ratio[i];
    const double score = prod - (1.0 + ratio.sum());
    if (score < best_score - kTieTol) {
      best_score = score;
      best = v;
      best_ratio = ratio;
    }
  }

  Eigen::MatrixXd inflated = t;
  for (Eigen::Index i = 0; i < n; ++i) inflated.col(i) *= 1.0 + best_ratio[i];
  Eigen::MatrixXd g(n, z.num_generators() - 1);
  g.leftCols(n) = inflated;
  Eigen::Index pos = n;
  for (const Eigen::Index v : rest) {
    if (v == best) continue;
    g.col(pos++) = z.G.col(v);
  }
  z.G = std::move(g);
  return true;
}

}  // namespace

RescaleBounds rescale_bounds(const ConstrainedZonotope& z, int sweeps) {
  const Eigen::Index ng = z.num_generators();
  RescaleBounds out;
  out.clipped.assign(static_cast<std::size_t>(ng), Interval(-1.0, 1.0));
  out.forced.assign(static_cast<std::size_t>(ng), ExtendedInterval());

  for (int pass = 0; pass < sweeps; ++pass) {
    for (Eigen::Index i = 0; i < z.num_constraints(); ++i) {
      for (Eigen::Index j = 0; j < ng; ++j) {
        const double a = z.A(i, j);
        if (a == 0.0) continue;
        Interval rest(z.b[i], z.b[i]);
        for (Eigen::Index k = 0; k < ng; ++k) {
          if (k == j || z.A(i, k) == 0.0) continue;
          rest = rest - z.A(i, k) * out.clipped[static_cast<std::size_t>(k)];
        }
        const double e0 = rest.lo() / a;
        const double e1 = rest.hi() / a;
        ExtendedInterval& forced = out.forced[static_cast<std::size_t>(j)];
        forced.intersect_with(ExtendedInterval(std::min(e0, e1), std::max(e0, e1)));

        Interval& clip = out.clipped[static_cast<std::size_t>(j)];
        const double lo = std::max(clip.lo(), forced.lo());
        const double hi = std::min(clip.hi(), forced.hi());
        if (lo > hi + 1e-12) {
          throw EmptySet("factor propagation proved the set empty");
        }
        clip = lo <= hi ? Interval(lo, hi) : Interval(hi, lo);
      }
    }
  }
  return out;
}

ConstrainedZonotope rescale(const ConstrainedZonotope& z, int sweeps) {
  const RescaleBounds bounds = rescale_bounds(z, sweeps);
  const Eigen::Index ng = z.num_generators();
  Eigen::VectorXd mid(ng), rad(ng);
  for (Eigen::Index j = 0; j < ng; ++j) {
    mid[j] = bounds.clipped[static_cast<std::size_t>(j)].mid();
    rad[j] = bounds.clipped[static_cast<std::size_t>(j)].rad();
  }
  ConstrainedZonotope out;
  out.G = z.G * rad.asDiagonal();
  out.c = z.c + z.G * mid;
  if (z.num_constraints() > 0) {
    out.A = z.A * rad.asDiagonal();
    out.b = z.b - z.A * mid;
  } else {
    out.A.resize(0, ng);
    out.b.resize(0);
  }
  return out;
}

ConstrainedZonotope move_center(const ConstrainedZonotope& z, const Eigen::VectorXd& h) {
  if (h.size() != z.dim()) {
    throw DimensionMismatch("target center must match set dimension");
  }
  const Eigen::Index n = z.dim();
  const Eigen::Index ng = z.num_generators();
  const Eigen::Index nc = z.num_constraints();

  Eigen::MatrixXd stacked(n, ng + 1);
  stacked.leftCols(ng) = z.G;
  stacked.col(ng) = h - z.c;
  if (matrix_rank(stacked) > matrix_rank(z.G)) {
    throw NotInRange("target center lies outside the generator span");
  }

  const RescaleBounds bounds = rescale_bounds(z);
  Eigen::VectorXd mid(ng), diam(ng);
  for (Eigen::Index j = 0; j < ng; ++j) {
    mid[j] = bounds.clipped[static_cast<std::size_t>(j)].mid();
    diam[j] = bounds.clipped[static_cast<std::size_t>(j)].diam();
  }

  // Smallest factor-slack recentering: minimize sum(a + d) subject to
  // G (d - a) = 2 (h - c - G mid), a, d >= 0.
  LpProblem p = LpProblem::with_vars(2 * ng);
  p.cost.setOnes();
  p.lower.setZero();
  p.upper.setConstant(kInf);
  p.eq_a.resize(n, 2 * ng);
  p.eq_a.leftCols(ng) = -z.G;
  p.eq_a.rightCols(ng) = z.G;
  p.eq_b = 2.0 * (h - z.c - z.G * mid);
  const LpResult r = lp_solve(p);
  if (r.status != LpStatus::Optimal) {
    throw NumericalFailure("recentering slack program did not solve");
  }
  const Eigen::VectorXd neg = r.x.head(ng);
  const Eigen::VectorXd pos = r.x.tail(ng);

  const Eigen::VectorXd shift = mid + 0.5 * (pos - neg);
  const Eigen::VectorXd radius = 0.5 * (diam + neg + pos);

  const Eigen::MatrixXd ge = z.G * radius.asDiagonal();
  ConstrainedZonotope out;
  out.G = Eigen::MatrixXd::Zero(n, 2 * ng);
  out.G.leftCols(ng) = ge;
  out.c = h;
  out.A = Eigen::MatrixXd::Zero(2 * nc + n, 2 * ng);
  out.b.resize(2 * nc + n);
  if (nc > 0) {
    out.A.topLeftCorner(nc, ng) = z.A * radius.asDiagonal();
    out.b.head(nc) = z.b - z.A * shift;
    out.A.block(nc, ng, nc, ng) = z.A;
    out.b.segment(nc, nc) = z.b;
  }
  out.A.bottomLeftCorner(n, ng) = ge;
  out.A.bottomRightCorner(n, ng) = -z.G;
  out.b.tail(n) = z.c - h;
  return out;
}

Eigen::VectorXd EliminationTranscript::replay_center() const {
  Eigen::VectorXd c = initial_center;
  for (const EliminationStep& s : steps) {
    c += s.pre_rescale_gens * s.factor_shift + s.substitution_gain * s.rhs;
  }
  return c;
}

std::pair<ConstrainedZonotope, EliminationTranscript> eliminate_constraints(
    const ConstrainedZonotope& z, int count) {
  if (count < 0 || count > z.num_constraints()) {
    throw DomainError("elimination count must lie in [0, n_c]");
  }
  ConstrainedZonotope cur = z;
  EliminationTranscript transcript;
  transcript.initial_center = z.c;

  for (int step = 0; step < count; ++step) {
    if (cur.num_constraints() == 0) break;
    const Eigen::Index ng = cur.num_generators();

    // Precondition A xi = b, permuting G's columns in lockstep, and drop the
    // all-zero rows left below the rank (inconsistent ones prove emptiness).
    const GaussJordanResult gj = gauss_jordan_full_pivot(cur.A, cur.b, kPivotTol);
    for (Eigen::Index i = gj.rank; i < gj.reduced.rows(); ++i) {
      if (std::abs(gj.rhs[i]) > kPivotTol) {
        throw EmptySet("inconsistent constraint row");
      }
    }
    cur.A = gj.reduced.topRows(gj.rank);
    cur.b = gj.rhs.head(gj.rank);
    cur.G = select_columns(cur.G, gj.col_perm);
    if (cur.num_constraints() == 0) break;
    const Eigen::Index nc = cur.num_constraints();

    EliminationStep rec;
    rec.pre_rescale_gens = cur.G;

    const RescaleBounds bounds = rescale_bounds(cur);
    Eigen::VectorXd mid(ng), rad(ng);
    for (Eigen::Index j = 0; j < ng; ++j) {
      mid[j] = bounds.clipped[static_cast<std::size_t>(j)].mid();
      rad[j] = bounds.clipped[static_cast<std::size_t>(j)].rad();
    }
    rec.factor_shift = mid;
    const Eigen::MatrixXd gs = cur.G * rad.asDiagonal();
    const Eigen::MatrixXd as = cur.A * rad.asDiagonal();
    const Eigen::VectorXd bs = cur.b - cur.A * mid;
    const Eigen::VectorXd cs = cur.c + cur.G * mid;
    rec.rhs = bs;

    // A row whose support factors are all pinned to points loses every
    // coefficient in the rescale; the shift absorbed its content, so dropping
    // it keeps the enclosure and counts as this step's elimination.
    Eigen::Index dead_row = -1;
    for (Eigen::Index i = 0; i < nc; ++i) {
      if (as.row(i).cwiseAbs().maxCoeff() <= kPivotTol) {
        dead_row = i;
        break;
      }
    }
    if (dead_row != -1) {
      rec.substitution_gain = Eigen::MatrixXd::Zero(cur.dim(), nc);
      cur.G = gs;
      cur.c = cs;
      cur.A = drop_row(as, dead_row);
      cur.b = drop_entry(bs, dead_row);
      transcript.steps.push_back(std::move(rec));
      continue;
    }

    // Out-of-box overshoot of each factor once its own [-1,1] clamp is
    // dropped: how far the constraints can force it, in rescaled units.
    Eigen::VectorXd overshoot(ng);
    for (Eigen::Index j = 0; j < ng; ++j) {
      const ExtendedInterval& forced = bounds.forced[static_cast<std::size_t>(j)];
      if (!forced.bounded_below() || !forced.bounded_above() || rad[j] == 0.0) {
        overshoot[j] = kInf;
        continue;
      }
      const double lo = (forced.lo() - mid[j]) / rad[j];
      const double hi = (forced.hi() - mid[j]) / rad[j];
      overshoot[j] = std::max(0.0, std::max(std::abs(lo), std::abs(hi)) - 1.0);
    }

    // Approximate Hausdorff error of eliminating each factor, through the
    // bordered system solved once for all columns via the matrix
    // D = W - (AW)' S^{-1} (AW) with W = (I + G'G)^{-1}.
    const Eigen::Index n = cur.dim();
    const Eigen::MatrixXd k_inv =
        (Eigen::MatrixXd::Identity(n, n) + gs * gs.transpose()).ldlt().solve(
            Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd kb = k_inv * gs;
    const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(ng, ng) - gs.transpose() * kb;
    const Eigen::MatrixXd aw = as - (as * gs.transpose()) * kb;
    const Eigen::MatrixXd s = aw * as.transpose();
    const Eigen::MatrixXd u = s.ldlt().solve(aw);
    const Eigen::MatrixXd d = w - aw.transpose() * u;

    double best_score = kInf;
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < ng; ++j) {
      if (as.col(j).cwiseAbs().maxCoeff() <= kPivotTol) continue;
      double score;
      if (overshoot[j] == 0.0) {
        score = 0.0;
      } else if (!std::isfinite(overshoot[j]) || !d.col(j).allFinite() ||
                 std::abs(d(j, j)) < 1e-14) {
        score = kInf;
      } else {
        score = overshoot[j] * overshoot[j] *
                ((gs * d.col(j)).squaredNorm() + d.col(j).squaredNorm()) /
                (d(j, j) * d(j, j));
      }
      if (best == -1 || score < best_score - kTieTol) {
        best_score = score;
        best = j;
      }
    }
    if (best == -1) {
      throw NoEliminablePivot("no constraint coefficient can anchor a substitution");
    }

    Eigen::Index row = best < nc && std::abs(as(best, best)) > kPivotTol
                           ? best
                           : static_cast<Eigen::Index>(-1);
    if (row == -1) {
      as.col(best).cwiseAbs().maxCoeff(&row);
    }
    const double pivot = as(row, best);

    Eigen::MatrixXd lambda_g = Eigen::MatrixXd::Zero(n, nc);
    lambda_g.col(row) = gs.col(best) / pivot;
    rec.substitution_gain = lambda_g;

    const Eigen::RowVectorXd arow = as.row(row) / pivot;
    const Eigen::MatrixXd g_next = gs - gs.col(best) * arow;
    const Eigen::MatrixXd a_next = as - as.col(best) * arow;
    const Eigen::VectorXd b_next = bs - as.col(best) * (bs[row] / pivot);
    const Eigen::VectorXd c_next = cs + gs.col(best) * (bs[row] / pivot);

    cur.G = drop_column(g_next, best);
    cur.A = drop_column(drop_row(a_next, row), best);
    cur.b = drop_entry(b_next, row);
    cur.c = c_next;
    transcript.steps.push_back(std::move(rec));
  }
  return {cur, transcript};
}

Zonotope reduce_generators(const Zonotope& z, int target, GenReduction method) {
  if (target < z.dim()) {
    throw TargetTooSmall("generator target below the ambient dimension");
  }
  if (target >= z.num_generators()) return z;

  if (method == GenReduction::MethodA) return reduce_method_a(z, target);

  Zonotope cur = z;
  while (cur.num_generators() > target) {
    if (!reduce_method_b_pass(cur)) return reduce_method_a(cur, target);
  }
  return cur;
}

ConstrainedZonotope reduce_generators(const ConstrainedZonotope& z, int target,
                                      GenReduction method) {
  if (target < z.dim() + z.num_constraints()) {
    throw TargetTooSmall("generator target below dimension plus constraint count");
  }
  if (target >= z.num_generators()) return z;
  const Eigen::Index n = z.dim();
  const Eigen::Index nc = z.num_constraints();

  Eigen::MatrixXd lifted_g(n + nc, z.num_generators());
  lifted_g << z.G, z.A;
  Eigen::VectorXd lifted_c(n + nc);
  lifted_c << z.c, -z.b;
  const Zonotope reduced = reduce_generators(Zonotope(lifted_g, lifted_c), target, method);

  ConstrainedZonotope out;
  out.G = reduced.G.topRows(n);
  out.c = z.c;
  out.A = reduced.G.bottomRows(nc);
  out.b = z.b;
  return out;
}

}  // namespace czono
