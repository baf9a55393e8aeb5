#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "czono/interval.hpp"
#include "czono/model.hpp"
#include "czono/sets.hpp"

namespace czono {

// Enclosure of { J x : J in coeff, x in operand }: the image under the
// midpoint matrix plus an axis-aligned box absorbing the coefficient radii.
// The box generators are kept even when their radii are zero so the output
// shape depends only on the input sizes. Rectangular coeff is allowed; its
// column count must match operand.dim(). EmptySet when the operand is proven
// empty while being covered by a constraint-free zonotope.
ConstrainedZonotope cz_inclusion(const IntervalMatrix& coeff, const ConstrainedZonotope& operand);

// Strategies for picking the expansion point of a linearization.
//   HullCenter     midpoint of the interval hull, when it lies in the set;
//                  otherwise falls back to ClosestPoint (flagged).
//   ClosestPoint   point of the set closest (L1) to its representation center.
//   WeightedDiamLp LP minimizing the Jacobian-diameter-weighted L1 distance
//                  between the center shifted by the constraint-elimination
//                  offset and the candidate point. Needs a Jacobian enclosure.
//   Recenter       moves the representation center onto the hull midpoint
//                  (or onto the ClosestPoint target when the midpoint is
//                  outside), so the expansion point and center coincide.
enum class ApproxHeuristic { HullCenter, ClosestPoint, WeightedDiamLp, Recenter };

struct ApproxPointChoice {
  ApproxHeuristic used = ApproxHeuristic::ClosestPoint;  // after any fallback
  Eigen::VectorXd point;
  // Equal-as-a-set representation whose center is `point`; Recenter only.
  std::optional<ConstrainedZonotope> recentered;
  bool fell_back = false;
};

// Picks an expansion point inside `set`. `jac` is consulted only by
// WeightedDiamLp (DomainError when missing there). Recenter degrades to
// ClosestPoint when the center move is not representable. EmptySet when the
// set is empty.
ApproxPointChoice select_approx_point(const ConstrainedZonotope& set, ApproxHeuristic method,
                                      const IntervalMatrix* jac = nullptr);

// One-step forward image of `prior` under the model dynamics with the input
// fixed, bounded by linearizing around a chosen point: the state part is the
// Jacobian enclosure applied to prior - h, the disturbance part is exact when
// the dynamics are affine in w and is itself a linearization around the point
// of `disturbance` closest to its center otherwise. `choice` must be
// HullCenter, ClosestPoint, or WeightedDiamLp; `chosen` (optional) receives
// the picked point.
ConstrainedZonotope mean_value_extension(const SystemModel& model, const ConstrainedZonotope& prior,
                                         const Eigen::VectorXd& input,
                                         const ConstrainedZonotope& disturbance,
                                         ApproxHeuristic choice = ApproxHeuristic::WeightedDiamLp,
                                         ApproxPointChoice* chosen = nullptr);

// Second-order remainder pieces shared by first_order_extension and
// nonlinear_measurement_update. With n_g generators, n_c constraints and m
// outputs: quad_gens has n_g + n_g(n_g-1)/2 columns (squared factors first,
// then cross pairs in lexicographic order), spread_gens is the m-by-m
// diagonal absorbing the Hessian enclosure radii, quad_cons/quad_rhs carry
// the n_c(n_c+1)/2 induced constraints over those columns plus the spread
// block, and cross_coeff is the m-by-dim interval matrix multiplying the
// center-minus-point offset term. All blocks are present even when zero.
struct FoRemainderParts {
  Eigen::VectorXd center_shift;
  Eigen::MatrixXd quad_gens;
  Eigen::MatrixXd spread_gens;
  Eigen::MatrixXd quad_cons;
  Eigen::VectorXd quad_rhs;
  IntervalMatrix cross_coeff;
};

// Builds the remainder pieces for `outputs` over `domain`, expanded at
// `point`. Hessian enclosures are evaluated on the interval hull of the
// domain. NonSmooth when an output is not twice differentiable.
FoRemainderParts fo_remainder_parts(const std::vector<Expr>& outputs,
                                    const ConstrainedZonotope& domain,
                                    const Eigen::VectorXd& point);

// Encloses { outputs(z) : z in domain } by a first-order expansion around a
// chosen point with an explicit second-order remainder. The result keeps a
// fixed block layout (gradient image, quadratic columns, spread columns,
// offset image, offset box), giving n_g^2/2 + 5 n_g/2 + 2m generators and
// n_c^2/2 + 5 n_c/2 constraints for the representation the expansion runs on.
// `choice` must be HullCenter, ClosestPoint, or Recenter.
ConstrainedZonotope first_order_extension(const std::vector<Expr>& outputs,
                                          const ConstrainedZonotope& domain,
                                          ApproxHeuristic choice = ApproxHeuristic::ClosestPoint,
                                          ApproxPointChoice* chosen = nullptr);

// Intersection of the prediction with the measurement strip of a linear
// observation y = c x + du u + dv v, v in noise. The result can be empty;
// callers decide how to proceed.
ConstrainedZonotope linear_measurement_update(const ConstrainedZonotope& prediction,
                                              const Eigen::MatrixXd& c, const Eigen::MatrixXd& du,
                                              const Eigen::MatrixXd& dv, const Eigen::VectorXd& input,
                                              const Eigen::VectorXd& output,
                                              const ConstrainedZonotope& noise);

// Update for a nonlinear observation y = outputs(x, v): `outputs` are
// expressions over the stacked vector (x, v), linearized around a point of
// prior x noise with the second-order remainder folded into the measurement
// set. Returns the generalized intersection of the prior with that set (may
// be empty). `choice` must be HullCenter, ClosestPoint, or Recenter.
ConstrainedZonotope nonlinear_measurement_update(const std::vector<Expr>& outputs,
                                                 const ConstrainedZonotope& prior,
                                                 const ConstrainedZonotope& noise,
                                                 const Eigen::VectorXd& output,
                                                 ApproxHeuristic choice = ApproxHeuristic::ClosestPoint,
                                                 ApproxPointChoice* chosen = nullptr);

}  // namespace czono
