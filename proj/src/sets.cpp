#include "czono/sets.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "czono/lp.hpp"
#include "czono/rng.hpp"

namespace czono {

namespace {

constexpr double kMembershipSlack = 1e-8;
constexpr double kBoundaryBand = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_cz_shapes(const Eigen::MatrixXd& g, const Eigen::VectorXd& c,
                     const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (g.rows() != c.size()) {
    throw DimensionMismatch("generator matrix rows must match center length");
  }
  if (a.rows() != b.size()) {
    throw DimensionMismatch("constraint matrix rows must match offset length");
  }
  if (a.rows() > 0 && a.cols() != g.cols()) {
    throw DimensionMismatch("constraint matrix must share the generator count");
  }
}

// Columns contributing nothing (zero in both G and A) only pad the LPs.
ConstrainedZonotope drop_dead_columns(const ConstrainedZonotope& z) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < z.num_generators(); ++j) {
    const bool dead = z.G.col(j).isZero(0.0) &&
                      (z.num_constraints() == 0 || z.A.col(j).isZero(0.0));
    if (!dead) keep.push_back(j);
  }
  if (static_cast<Eigen::Index>(keep.size()) == z.num_generators()) return z;
  ConstrainedZonotope out;
  out.c = z.c;
  out.b = z.b;
  out.G.resize(z.dim(), static_cast<Eigen::Index>(keep.size()));
  out.A.resize(z.num_constraints(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.G.col(static_cast<Eigen::Index>(i)) = z.G.col(keep[i]);
    if (z.num_constraints() > 0) out.A.col(static_cast<Eigen::Index>(i)) = z.A.col(keep[i]);
  }
  return out;
}

// min |xi|_inf subject to A xi = b and optionally G xi = target, as the LP
// over (xi, t) with the coupling rows xi_j <= t and -xi_j <= t.
LpResult solve_min_inf_norm(const ConstrainedZonotope& z, const Eigen::VectorXd* target) {
  const Eigen::Index ng = z.num_generators();
  const Eigen::Index nc = z.num_constraints();
  const Eigen::Index n = z.dim();
  const Eigen::Index eq_rows = nc + (target ? n : 0);

  LpProblem p = LpProblem::with_vars(ng + 1);
  p.cost[ng] = 1.0;
  p.lower[ng] = 0.0;

  p.eq_a.setZero(eq_rows, ng + 1);
  p.eq_b.setZero(eq_rows);
  if (nc > 0) {
    p.eq_a.topLeftCorner(nc, ng) = z.A;
    p.eq_b.head(nc) = z.b;
  }
  if (target) {
    p.eq_a.block(nc, 0, n, ng) = z.G;
    p.eq_b.tail(n) = *target - z.c;
  }

  p.ineq_a.setZero(2 * ng, ng + 1);
  p.ineq_b.setZero(2 * ng);
  for (Eigen::Index j = 0; j < ng; ++j) {
    p.ineq_a(2 * j, j) = 1.0;
    p.ineq_a(2 * j, ng) = -1.0;
    p.ineq_a(2 * j + 1, j) = -1.0;
    p.ineq_a(2 * j + 1, ng) = -1.0;
  }
  return lp_solve(p);
}

// min cost' xi over the factor polytope B(A, b); EmptySet when infeasible.
LpResult solve_over_factors(const ConstrainedZonotope& z, const Eigen::VectorXd& cost) {
  LpProblem p = LpProblem::with_vars(z.num_generators());
  p.cost = cost;
  p.lower.setConstant(-1.0);
  p.upper.setConstant(1.0);
  if (z.num_constraints() > 0) {
    p.eq_a = z.A;
    p.eq_b = z.b;
  }
  const LpResult r = lp_solve(p);
  if (r.status == LpStatus::Infeasible) {
    throw EmptySet("constrained zonotope has no feasible factors");
  }
  return r;
}

Eigen::MatrixXd blkdiag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + d.rows(), a.cols() + d.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(d.rows(), d.cols()) = d;
  return out;
}

}  // namespace

Zonotope::Zonotope(Eigen::MatrixXd gens, Eigen::VectorXd center)
    : G(std::move(gens)), c(std::move(center)) {
  if (G.rows() != c.size()) {
    throw DimensionMismatch("generator matrix rows must match center length");
  }
}

Zonotope Zonotope::point(Eigen::VectorXd center) {
  Zonotope z;
  z.c = std::move(center);
  z.G.resize(z.c.size(), 0);
  return z;
}

Zonotope Zonotope::from_box(const Box& box) {
  const Eigen::Index n = static_cast<Eigen::Index>(box.size());
  Zonotope z;
  z.c.resize(n);
  z.G = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Interval& iv = box[static_cast<std::size_t>(i)];
    z.c[i] = iv.mid();
    z.G(i, i) = iv.rad();
  }
  return z;
}

ConstrainedZonotope::ConstrainedZonotope(Eigen::MatrixXd gens, Eigen::VectorXd center)
    : G(std::move(gens)), c(std::move(center)), A(0, G.cols()), b(0) {
  check_cz_shapes(G, c, A, b);
}

ConstrainedZonotope::ConstrainedZonotope(Eigen::MatrixXd gens, Eigen::VectorXd center,
                                         Eigen::MatrixXd con_coeffs, Eigen::VectorXd con_rhs)
    : G(std::move(gens)), c(std::move(center)), A(std::move(con_coeffs)), b(std::move(con_rhs)) {
  check_cz_shapes(G, c, A, b);
}

ConstrainedZonotope ConstrainedZonotope::point(Eigen::VectorXd center) {
  return from_zonotope(Zonotope::point(std::move(center)));
}

ConstrainedZonotope ConstrainedZonotope::from_box(const Box& box) {
  return from_zonotope(Zonotope::from_box(box));
}

ConstrainedZonotope ConstrainedZonotope::from_zonotope(const Zonotope& z) {
  ConstrainedZonotope out;
  out.G = z.G;
  out.c = z.c;
  out.A.resize(0, z.G.cols());
  out.b.resize(0);
  return out;
}

Zonotope as_zonotope(const ConstrainedZonotope& z) {
  if (z.num_constraints() > 0) {
    throw DomainError("constrained zonotope still carries constraints");
  }
  return Zonotope(z.G, z.c);
}

ConstrainedZonotope linear_image(const Eigen::MatrixXd& r, const ConstrainedZonotope& z) {
  if (r.cols() != z.dim()) {
    throw DimensionMismatch("linear map columns must match set dimension");
  }
  ConstrainedZonotope out;
  out.G = r * z.G;
  out.c = r * z.c;
  out.A = z.A;
  out.b = z.b;
  return out;
}

Zonotope linear_image(const Eigen::MatrixXd& r, const Zonotope& z) {
  if (r.cols() != z.dim()) {
    throw DimensionMismatch("linear map columns must match set dimension");
  }
  return Zonotope(r * z.G, r * z.c);
}

ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& z, const ConstrainedZonotope& w) {
  if (z.dim() != w.dim()) {
    throw DimensionMismatch("minkowski sum needs equal dimensions");
  }
  ConstrainedZonotope out;
  out.G.resize(z.dim(), z.num_generators() + w.num_generators());
  out.G << z.G, w.G;
  out.c = z.c + w.c;
  out.A = blkdiag(z.A, w.A);
  out.b.resize(z.num_constraints() + w.num_constraints());
  out.b << z.b, w.b;
  return out;
}

Zonotope minkowski_sum(const Zonotope& z, const Zonotope& w) {
  if (z.dim() != w.dim()) {
    throw DimensionMismatch("minkowski sum needs equal dimensions");
  }
  Eigen::MatrixXd g(z.dim(), z.num_generators() + w.num_generators());
  g << z.G, w.G;
  return Zonotope(std::move(g), z.c + w.c);
}

ConstrainedZonotope generalized_intersection(const ConstrainedZonotope& z,
                                             const ConstrainedZonotope& y,
                                             const Eigen::MatrixXd& r) {
  if (r.cols() != z.dim() || r.rows() != y.dim()) {
    throw DimensionMismatch("map must send the first set into the second set's space");
  }
  const Eigen::Index ngz = z.num_generators();
  const Eigen::Index ngy = y.num_generators();
  const Eigen::Index ncz = z.num_constraints();
  const Eigen::Index ncy = y.num_constraints();

  ConstrainedZonotope out;
  out.G = Eigen::MatrixXd::Zero(z.dim(), ngz + ngy);
  out.G.leftCols(ngz) = z.G;
  out.c = z.c;
  out.A = Eigen::MatrixXd::Zero(ncz + ncy + y.dim(), ngz + ngy);
  out.A.topLeftCorner(ncz, ngz) = z.A;
  out.A.block(ncz, ngz, ncy, ngy) = y.A;
  out.A.bottomLeftCorner(y.dim(), ngz) = r * z.G;
  out.A.bottomRightCorner(y.dim(), ngy) = -y.G;
  out.b.resize(ncz + ncy + y.dim());
  out.b << z.b, y.b, y.c - r * z.c;
  return out;
}

ConstrainedZonotope cartesian_product(const ConstrainedZonotope& x,
                                      const ConstrainedZonotope& w) {
  ConstrainedZonotope out;
  out.G = blkdiag(x.G, w.G);
  out.c.resize(x.dim() + w.dim());
  out.c << x.c, w.c;
  out.A = blkdiag(x.A, w.A);
  out.b.resize(x.num_constraints() + w.num_constraints());
  out.b << x.b, w.b;
  return out;
}

ConstrainedZonotope translate(const ConstrainedZonotope& z, const Eigen::VectorXd& v) {
  if (v.size() != z.dim()) {
    throw DimensionMismatch("translation vector must match set dimension");
  }
  ConstrainedZonotope out = z;
  out.c += v;
  return out;
}

bool is_empty(const ConstrainedZonotope& z) {
  if (z.num_constraints() == 0) return false;
  const ConstrainedZonotope zz = drop_dead_columns(z);
  const LpResult r = solve_min_inf_norm(zz, nullptr);
  if (r.status == LpStatus::Infeasible) return true;
  return r.value > 1.0 + kMembershipSlack;
}

MembershipQuery membership(const ConstrainedZonotope& z, const Eigen::VectorXd& point) {
  if (point.size() != z.dim()) {
    throw DimensionMismatch("probe point must match set dimension");
  }
  const ConstrainedZonotope zz = drop_dead_columns(z);
  const LpResult r = solve_min_inf_norm(zz, &point);
  MembershipQuery q;
  if (r.status != LpStatus::Optimal) {
    q.attained = kInf;
    return q;
  }
  q.attained = r.value;
  q.member = r.value <= 1.0 + kMembershipSlack;
  q.near_boundary = std::abs(r.value - 1.0) <= kBoundaryBand;
  return q;
}

bool contains_point(const ConstrainedZonotope& z, const Eigen::VectorXd& point) {
  return membership(z, point).member;
}

Box interval_hull(const ConstrainedZonotope& z) {
  const ConstrainedZonotope zz = drop_dead_columns(z);
  Box out;
  out.reserve(static_cast<std::size_t>(zz.dim()));
  for (Eigen::Index i = 0; i < zz.dim(); ++i) {
    const Eigen::VectorXd row = zz.G.row(i).transpose();
    const double lo = zz.c[i] + solve_over_factors(zz, row).value;
    const double hi = zz.c[i] - solve_over_factors(zz, -row).value;
    out.push_back(Interval(std::min(lo, hi), std::max(lo, hi)));
  }
  return out;
}

Box interval_hull(const Zonotope& z) {
  Box out;
  out.reserve(static_cast<std::size_t>(z.dim()));
  for (Eigen::Index i = 0; i < z.dim(); ++i) {
    const double r = z.G.row(i).cwiseAbs().sum();
    out.push_back(Interval(z.c[i] - r, z.c[i] + r));
  }
  return out;
}

double support(const ConstrainedZonotope& z, const Eigen::VectorXd& direction) {
  if (direction.size() != z.dim()) {
    throw DimensionMismatch("direction must match set dimension");
  }
  const ConstrainedZonotope zz = drop_dead_columns(z);
  const Eigen::VectorXd cost = -(zz.G.transpose() * direction);
  return direction.dot(zz.c) - solve_over_factors(zz, cost).value;
}

double support(const Zonotope& z, const Eigen::VectorXd& direction) {
  if (direction.size() != z.dim()) {
    throw DimensionMismatch("direction must match set dimension");
  }
  return direction.dot(z.c) + (z.G.transpose() * direction).cwiseAbs().sum();
}

ConstrainedZonotope from_hrep(const Eigen::MatrixXd& h, const Eigen::VectorXd& k) {
  if (h.rows() != k.size()) {
    throw DimensionMismatch("halfspace matrix rows must match offset length");
  }
  const Eigen::Index n = h.cols();
  const Eigen::Index nh = h.rows();

  LpProblem base = LpProblem::with_vars(n);
  base.ineq_a = h;
  base.ineq_b = k;
  {
    const LpResult feas = lp_solve(base);
    if (feas.status == LpStatus::Infeasible) {
      throw EmptyPolytope("halfspace intersection is empty");
    }
  }

  Box hull;
  for (Eigen::Index j = 0; j < n; ++j) {
    double ends[2];
    for (int s = 0; s < 2; ++s) {
      LpProblem p = base;
      p.cost[j] = s == 0 ? 1.0 : -1.0;
      const LpResult r = lp_solve(p);
      if (r.status == LpStatus::Unbounded) {
        throw UnboundedPolytope("halfspace intersection is unbounded");
      }
      ends[s] = s == 0 ? r.value : -r.value;
    }
    hull.push_back(Interval(std::min(ends[0], ends[1]), std::max(ends[0], ends[1])));
  }

  Eigen::VectorXd sigma(nh);
  for (Eigen::Index i = 0; i < nh; ++i) {
    LpProblem p = base;
    p.cost = h.row(i).transpose();
    const LpResult r = lp_solve(p);
    if (r.status == LpStatus::Unbounded) {
      throw UnboundedPolytope("halfspace intersection is unbounded");
    }
    sigma[i] = r.value;
  }

  Eigen::MatrixXd gz = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd cz(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    gz(j, j) = hull[static_cast<std::size_t>(j)].rad();
    cz[j] = hull[static_cast<std::size_t>(j)].mid();
  }

  ConstrainedZonotope out;
  out.G = Eigen::MatrixXd::Zero(n, n + nh);
  out.G.leftCols(n) = gz;
  out.c = cz;
  out.A = Eigen::MatrixXd::Zero(nh, n + nh);
  out.A.leftCols(n) = h * gz;
  out.A.rightCols(nh) = ((sigma - k) / 2.0).asDiagonal();
  out.b = (k + sigma) / 2.0 - h * cz;
  return out;
}

Eigen::VectorXd closest_point(const ConstrainedZonotope& z, const Eigen::VectorXd& h) {
  if (h.size() != z.dim()) {
    throw DimensionMismatch("target point must match set dimension");
  }
  const ConstrainedZonotope zz = drop_dead_columns(z);
  const Eigen::Index ng = zz.num_generators();
  const Eigen::Index n = zz.dim();
  const Eigen::Index nc = zz.num_constraints();

  LpProblem p = LpProblem::with_vars(ng + n);
  p.cost.tail(n).setOnes();
  p.lower.head(ng).setConstant(-1.0);
  p.upper.head(ng).setConstant(1.0);
  p.lower.tail(n).setZero();
  if (nc > 0) {
    p.eq_a.setZero(nc, ng + n);
    p.eq_a.leftCols(ng) = zz.A;
    p.eq_b = zz.b;
  }
  p.ineq_a.setZero(2 * n, ng + n);
  p.ineq_b.setZero(2 * n);
  p.ineq_a.topLeftCorner(n, ng) = zz.G;
  p.ineq_a.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  p.ineq_b.head(n) = h - zz.c;
  p.ineq_a.bottomLeftCorner(n, ng) = -zz.G;
  p.ineq_a.bottomRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  p.ineq_b.tail(n) = zz.c - h;

  const LpResult r = lp_solve(p);
  if (r.status == LpStatus::Infeasible) {
    throw EmptySet("constrained zonotope has no feasible factors");
  }
  return zz.c + zz.G * r.x.head(ng);
}

ConstrainedZonotope prune_zero_generators(const ConstrainedZonotope& z) {
  return drop_dead_columns(z);
}

Zonotope prune_zero_generators(const Zonotope& z) {
  return as_zonotope(drop_dead_columns(ConstrainedZonotope::from_zonotope(z)));
}

double volume_estimate(const ConstrainedZonotope& z, std::uint64_t seed, int samples) {
  const Box hull = interval_hull(z);
  double box_vol = 1.0;
  for (const Interval& iv : hull) box_vol *= iv.diam();
  if (box_vol <= 0.0 || samples <= 0) return 0.0;

  UniformRng rng(seed);
  int inside = 0;
  Eigen::VectorXd p(z.dim());
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < z.dim(); ++i) {
      const Interval& iv = hull[static_cast<std::size_t>(i)];
      p[i] = rng.in(iv.lo(), iv.hi());
    }
    if (contains_point(z, p)) ++inside;
  }
  return box_vol * static_cast<double>(inside) / static_cast<double>(samples);
}

}  // namespace czono
