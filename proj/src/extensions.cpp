#include "czono/extensions.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "czono/errors.hpp"
#include "czono/lp.hpp"
#include "czono/reduction.hpp"

namespace czono {
namespace {

// Constraint-free zonotope covering z, via full constraint elimination.
Zonotope constraint_free_cover(const ConstrainedZonotope& z) {
  if (z.num_constraints() == 0) return Zonotope(z.G, z.c);
  auto [reduced, transcript] = eliminate_constraints(z, static_cast<int>(z.num_constraints()));
  (void)transcript;
  return Zonotope(reduced.G, reduced.c);
}

IntervalMatrix slice_cols(const IntervalMatrix& m, Eigen::Index start, Eigen::Index count) {
  return IntervalMatrix(m.lower().block(0, start, m.rows(), count),
                        m.upper().block(0, start, m.rows(), count));
}

std::vector<double> to_point(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void check_output_vars(const std::vector<Expr>& outputs, Eigen::Index dim) {
  for (const Expr& e : outputs) {
    if (e.max_variable() >= dim) {
      throw DimensionMismatch("output expression uses a variable beyond the set dimension");
    }
  }
}

}  // namespace

ConstrainedZonotope cz_inclusion(const IntervalMatrix& coeff, const ConstrainedZonotope& operand) {
  if (coeff.cols() != operand.dim()) {
    throw DimensionMismatch("coefficient columns do not match the operand dimension");
  }
  const Zonotope cover = constraint_free_cover(operand);
  const Eigen::MatrixXd rad = coeff.rad();

  Eigen::VectorXd box_radii = rad * cover.c.cwiseAbs();
  if (cover.num_generators() > 0) {
    box_radii += rad * cover.G.cwiseAbs().rowwise().sum();
  }

  const ConstrainedZonotope image = linear_image(coeff.mid(), operand);
  const ConstrainedZonotope box(Eigen::MatrixXd(box_radii.asDiagonal()),
                                Eigen::VectorXd::Zero(coeff.rows()));
  return minkowski_sum(image, box);
}

ApproxPointChoice select_approx_point(const ConstrainedZonotope& set, ApproxHeuristic method,
                                      const IntervalMatrix* jac) {
  ApproxPointChoice out;
  switch (method) {
    case ApproxHeuristic::HullCenter: {
      const Eigen::VectorXd mid = box_mid(interval_hull(set));
      if (contains_point(set, mid)) {
        out.used = ApproxHeuristic::HullCenter;
        out.point = mid;
        return out;
      }
      out = select_approx_point(set, ApproxHeuristic::ClosestPoint, jac);
      out.fell_back = true;
      return out;
    }

    case ApproxHeuristic::ClosestPoint: {
      out.used = ApproxHeuristic::ClosestPoint;
      out.point = closest_point(set, set.c);
      return out;
    }

    case ApproxHeuristic::WeightedDiamLp: {
      if (jac == nullptr) {
        throw DomainError("weighted-diameter point selection needs a Jacobian enclosure");
      }
      if (jac->cols() != set.dim()) {
        throw DimensionMismatch("Jacobian enclosure columns do not match the set dimension");
      }
      out.used = ApproxHeuristic::WeightedDiamLp;
      const Eigen::Index n = set.dim();
      const Eigen::Index ng = set.num_generators();
      if (set.num_constraints() == 0) {
        // The elimination offset is zero, so the center is already optimal.
        out.point = set.c;
        return out;
      }

      auto [cover, transcript] = eliminate_constraints(set, static_cast<int>(set.num_constraints()));
      (void)cover;
      const Eigen::VectorXd offset = transcript.replay_center() - set.c;
      const Eigen::VectorXd weights = 2.0 * jac->rad().colwise().sum().transpose();

      // Variables (xi, s): minimize sum s with |W (offset - G xi)| <= s
      // componentwise, A xi = b, |xi| <= 1, s >= 0.
      LpProblem p = LpProblem::with_vars(ng + n);
      p.cost.tail(n).setOnes();
      const Eigen::MatrixXd wg = weights.asDiagonal() * set.G;
      const Eigen::VectorXd ws = weights.cwiseProduct(offset);
      p.ineq_a = Eigen::MatrixXd::Zero(2 * n, ng + n);
      p.ineq_a.topLeftCorner(n, ng) = wg;
      p.ineq_a.bottomLeftCorner(n, ng) = -wg;
      p.ineq_a.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
      p.ineq_a.bottomRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
      p.ineq_b.resize(2 * n);
      p.ineq_b << ws, -ws;
      p.eq_a = Eigen::MatrixXd::Zero(set.num_constraints(), ng + n);
      p.eq_a.leftCols(ng) = set.A;
      p.eq_b = set.b;
      p.lower.head(ng).setConstant(-1.0);
      p.lower.tail(n).setZero();
      p.upper.head(ng).setOnes();

      const LpResult r = lp_solve(p);
      if (r.status == LpStatus::Infeasible) {
        throw EmptySet("cannot pick a point in an empty set");
      }
      if (r.status != LpStatus::Optimal) {
        throw NumericalFailure("point selection program did not reach an optimum");
      }
      out.point = set.c + set.G * r.x.head(ng);
      return out;
    }

    case ApproxHeuristic::Recenter: {
      Eigen::VectorXd target = box_mid(interval_hull(set));
      bool fell = false;
      if (!contains_point(set, target)) {
        target = closest_point(set, set.c);
        fell = true;
      }
      try {
        ConstrainedZonotope moved = move_center(set, target);
        out.used = ApproxHeuristic::Recenter;
        out.point = std::move(target);
        out.recentered = std::move(moved);
        out.fell_back = fell;
        return out;
      } catch (const NotInRange&) {
        out = select_approx_point(set, ApproxHeuristic::ClosestPoint, jac);
        out.fell_back = true;
        return out;
      }
    }
  }
  throw DomainError("unknown point selection heuristic");
}

ConstrainedZonotope mean_value_extension(const SystemModel& model, const ConstrainedZonotope& prior,
                                         const Eigen::VectorXd& input,
                                         const ConstrainedZonotope& disturbance,
                                         ApproxHeuristic choice, ApproxPointChoice* chosen) {
  if (prior.dim() != model.n_x()) {
    throw DimensionMismatch("prior dimension does not match the model");
  }
  if (disturbance.dim() != model.n_w()) {
    throw DimensionMismatch("disturbance dimension does not match the model");
  }
  if (input.size() != model.n_u()) {
    throw DimensionMismatch("input length does not match the model");
  }
  if (choice == ApproxHeuristic::Recenter) {
    throw DomainError("mean-value extension accepts HullCenter, ClosestPoint, or WeightedDiamLp");
  }

  const Box xbox = interval_hull(prior);
  const Box wbox = interval_hull(disturbance);
  const IntervalMatrix full = model.dynamics_jacobian_over(xbox, input, wbox);
  const IntervalMatrix jx = slice_cols(full, 0, model.n_x());

  const ApproxPointChoice pick = select_approx_point(prior, choice, &jx);
  if (chosen) *chosen = pick;
  const Eigen::VectorXd& h = pick.point;

  ConstrainedZonotope disturbance_part;
  if (model.dynamics_affine_in_w()) {
    const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(model.n_w());
    const Eigen::VectorXd base = model.eval_dynamics(h, input, w0);
    disturbance_part = translate(linear_image(model.dynamics_dw_at(h, input, w0), disturbance), base);
  } else {
    const Eigen::VectorXd hw = closest_point(disturbance, disturbance.c);
    const Eigen::VectorXd base = model.eval_dynamics(h, input, hw);
    const IntervalMatrix atw = model.dynamics_jacobian_over(box_from_point(h), input, wbox);
    const IntervalMatrix jw = slice_cols(atw, model.n_x() + model.n_u(), model.n_w());
    disturbance_part = translate(cz_inclusion(jw, translate(disturbance, -hw)), base);
  }

  return minkowski_sum(disturbance_part, cz_inclusion(jx, translate(prior, -h)));
}

FoRemainderParts fo_remainder_parts(const std::vector<Expr>& outputs,
                                    const ConstrainedZonotope& domain,
                                    const Eigen::VectorXd& point) {
  const Eigen::Index n = domain.dim();
  const Eigen::Index m = static_cast<Eigen::Index>(outputs.size());
  if (point.size() != n) {
    throw DimensionMismatch("expansion point dimension does not match the set");
  }
  check_output_vars(outputs, n);

  const Eigen::Index ng = domain.num_generators();
  const Eigen::Index nc = domain.num_constraints();
  const Eigen::Index pairs = ng * (ng - 1) / 2;
  const Eigen::Index qcols = ng + pairs;
  const Eigen::Index crows = nc * (nc + 1) / 2;

  const auto half = half_hessian(outputs, static_cast<int>(n));
  const Box domain_box = interval_hull(domain);
  const Eigen::VectorXd p = domain.c - point;

  FoRemainderParts parts;
  parts.center_shift = Eigen::VectorXd::Zero(m);
  parts.quad_gens = Eigen::MatrixXd::Zero(m, qcols);
  parts.spread_gens = Eigen::MatrixXd::Zero(m, m);
  parts.quad_cons = Eigen::MatrixXd::Zero(crows, qcols + m);
  parts.quad_rhs = Eigen::VectorXd::Zero(crows);
  parts.cross_coeff = IntervalMatrix(m, n);

  for (Eigen::Index q = 0; q < m; ++q) {
    IntervalMatrix hq(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        hq.set(i, j, half[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(j)]
                             .eval(domain_box));
      }
    }

    const IntervalMatrix folded =
        interval_matrix_mul(interval_matrix_mul(Eigen::MatrixXd(domain.G.transpose()), hq), domain.G);
    const Eigen::MatrixXd fmid = folded.mid();
    const Eigen::MatrixXd frad = folded.rad();

    parts.center_shift[q] = 0.5 * fmid.trace();
    for (Eigen::Index i = 0; i < ng; ++i) parts.quad_gens(q, i) = 0.5 * fmid(i, i);
    Eigen::Index col = ng;
    for (Eigen::Index i = 0; i < ng; ++i) {
      for (Eigen::Index j = i + 1; j < ng; ++j, ++col) {
        parts.quad_gens(q, col) = fmid(i, j) + fmid(j, i);
      }
    }
    parts.spread_gens(q, q) = frad.sum();

    // Row enclosing p' H for every H in the Hessian family. The entrywise
    // hull with the transpose keeps the symmetrized matrix inside the family,
    // which the split of the quadratic into this term and the folded part
    // relies on.
    for (Eigen::Index k = 0; k < n; ++k) {
      Interval acc(0.0, 0.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        acc = acc + p[i] * hull(hq(i, k), hq(k, i));
      }
      parts.cross_coeff.set(q, k, acc);
    }
  }

  Eigen::Index row = 0;
  for (Eigen::Index r = 0; r < nc; ++r) {
    for (Eigen::Index s = r; s < nc; ++s, ++row) {
      for (Eigen::Index i = 0; i < ng; ++i) {
        parts.quad_cons(row, i) = 0.5 * domain.A(r, i) * domain.A(s, i);
      }
      Eigen::Index col = ng;
      for (Eigen::Index i = 0; i < ng; ++i) {
        for (Eigen::Index j = i + 1; j < ng; ++j, ++col) {
          parts.quad_cons(row, col) = domain.A(r, i) * domain.A(s, j) + domain.A(r, j) * domain.A(s, i);
        }
      }
      parts.quad_rhs[row] = domain.b[r] * domain.b[s] - 0.5 * domain.A.row(r).dot(domain.A.row(s));
    }
  }

  return parts;
}

namespace {

// Remainder set: quadratic columns with their induced constraints, plus the
// enclosure of the cross term over the doubled offset domain.
ConstrainedZonotope remainder_set(const FoRemainderParts& parts, const ConstrainedZonotope& rep,
                                  const Eigen::VectorXd& point) {
  const Eigen::Index m = parts.center_shift.size();
  Eigen::MatrixXd gens(m, parts.quad_gens.cols() + m);
  gens.leftCols(parts.quad_gens.cols()) = parts.quad_gens;
  gens.rightCols(m) = parts.spread_gens;
  const ConstrainedZonotope quad(gens, parts.center_shift, parts.quad_cons, parts.quad_rhs);

  const ConstrainedZonotope offset_dom(2.0 * rep.G, rep.c - point, rep.A, rep.b);
  return minkowski_sum(quad, cz_inclusion(parts.cross_coeff, offset_dom));
}

}  // namespace

ConstrainedZonotope first_order_extension(const std::vector<Expr>& outputs,
                                          const ConstrainedZonotope& domain,
                                          ApproxHeuristic choice, ApproxPointChoice* chosen) {
  if (choice == ApproxHeuristic::WeightedDiamLp) {
    throw DomainError("first-order extension accepts HullCenter, ClosestPoint, or Recenter");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(outputs.size());
  if (m == 0) throw DomainError("first-order extension needs at least one output");
  check_output_vars(outputs, domain.dim());

  ApproxPointChoice pick = select_approx_point(domain, choice);
  if (chosen) *chosen = pick;
  const ConstrainedZonotope& rep = pick.recentered ? *pick.recentered : domain;
  const Eigen::VectorXd& h = pick.point;
  const Eigen::Index n = rep.dim();

  const FoRemainderParts parts = fo_remainder_parts(outputs, rep, h);

  const std::vector<double> hpt = to_point(h);
  Eigen::VectorXd value_at(m);
  Eigen::MatrixXd grad(m, n);
  const auto jac = jacobian(outputs, static_cast<int>(n));
  for (Eigen::Index q = 0; q < m; ++q) {
    value_at[q] = outputs[static_cast<std::size_t>(q)].eval(hpt);
    for (Eigen::Index j = 0; j < n; ++j) {
      grad(q, j) = jac[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)].eval(hpt);
    }
  }

  const ConstrainedZonotope gradient_term = linear_image(grad, translate(rep, -h));
  return translate(minkowski_sum(gradient_term, remainder_set(parts, rep, h)), value_at);
}

ConstrainedZonotope linear_measurement_update(const ConstrainedZonotope& prediction,
                                              const Eigen::MatrixXd& c, const Eigen::MatrixXd& du,
                                              const Eigen::MatrixXd& dv, const Eigen::VectorXd& input,
                                              const Eigen::VectorXd& output,
                                              const ConstrainedZonotope& noise) {
  const Eigen::Index ny = output.size();
  if (c.rows() != ny || du.rows() != ny || dv.rows() != ny) {
    throw DimensionMismatch("observation matrices disagree on the output dimension");
  }
  if (c.cols() != prediction.dim()) {
    throw DimensionMismatch("state gain columns do not match the prediction");
  }
  if (du.cols() != input.size()) {
    throw DimensionMismatch("input gain columns do not match the input");
  }
  if (dv.cols() != noise.dim()) {
    throw DimensionMismatch("noise gain columns do not match the noise set");
  }

  const ConstrainedZonotope strip = translate(linear_image(-dv, noise), output - du * input);
  return generalized_intersection(prediction, strip, c);
}

ConstrainedZonotope nonlinear_measurement_update(const std::vector<Expr>& outputs,
                                                 const ConstrainedZonotope& prior,
                                                 const ConstrainedZonotope& noise,
                                                 const Eigen::VectorXd& output,
                                                 ApproxHeuristic choice, ApproxPointChoice* chosen) {
  if (choice == ApproxHeuristic::WeightedDiamLp) {
    throw DomainError("nonlinear update accepts HullCenter, ClosestPoint, or Recenter");
  }
  const Eigen::Index n = prior.dim();
  const Eigen::Index nv = noise.dim();
  const Eigen::Index ny = static_cast<Eigen::Index>(outputs.size());
  if (output.size() != ny) {
    throw DimensionMismatch("output length does not match the observation expressions");
  }

  const ConstrainedZonotope joint = cartesian_product(prior, noise);
  check_output_vars(outputs, joint.dim());

  ApproxPointChoice pick = select_approx_point(joint, choice);
  if (chosen) *chosen = pick;
  const ConstrainedZonotope& rep = pick.recentered ? *pick.recentered : joint;
  const Eigen::VectorXd& h = pick.point;

  const FoRemainderParts parts = fo_remainder_parts(outputs, rep, h);
  const ConstrainedZonotope remainder = remainder_set(parts, rep, h);

  const std::vector<double> hpt = to_point(h);
  Eigen::VectorXd value_at(ny);
  Eigen::MatrixXd grad(ny, n + nv);
  const auto jac = jacobian(outputs, static_cast<int>(n + nv));
  for (Eigen::Index q = 0; q < ny; ++q) {
    value_at[q] = outputs[static_cast<std::size_t>(q)].eval(hpt);
    for (Eigen::Index j = 0; j < n + nv; ++j) {
      grad(q, j) = jac[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)].eval(hpt);
    }
  }
  const Eigen::MatrixXd cx = grad.leftCols(n);
  const Eigen::MatrixXd cv = grad.rightCols(nv);

  const Eigen::VectorXd shift = output - value_at + cx * h.head(n) + cv * h.tail(nv);
  const ConstrainedZonotope strip = translate(
      minkowski_sum(linear_image(-cv, noise),
                    linear_image(-Eigen::MatrixXd::Identity(ny, ny), remainder)),
      shift);
  return generalized_intersection(prior, strip, cx);
}

}  // namespace czono
