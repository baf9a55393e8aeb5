#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "czono/expr.hpp"
#include "czono/interval.hpp"
#include "czono/model.hpp"
#include "czono/sets.hpp"

namespace czono {

// A finite union of interval vectors of common dimension, kept as the list of
// its cells; the union itself is never materialized.
struct IntervalBundle {
  std::vector<Box> cells;

  Eigen::Index dim() const {
    return cells.empty() ? 0 : static_cast<Eigen::Index>(cells.front().size());
  }
  std::size_t size() const { return cells.size(); }
};

// Splits a box into divisions^n congruent cells forming a grid; adjacent
// cells share faces exactly. DegenerateInput when an axis has zero width,
// DomainError when divisions < 1.
IntervalBundle nd_partition(const Box& box, int divisions);

// The cells of the divisions-partition of the interval hull of z that
// actually meet z (one emptiness query per cell). The union of the kept
// cells covers z. EmptySet when z is empty.
IntervalBundle tight_interval_bundle(const ConstrainedZonotope& z, int divisions);

// Cellwise image bundle: each output cell is the natural interval evaluation
// of f over the input cell, with the input appended as exact values. The
// expressions are over the stacked variables (x, u). Evaluation errors carry
// the index of the offending cell.
IntervalBundle refine_bundle(const std::vector<Expr>& f, const Eigen::VectorXd& input,
                             const IntervalBundle& bundle);

// Componentwise smallest box covering every cell.
Box bundle_interval_hull(const IntervalBundle& bundle);

// Keeps the cells touching the hull: at least one endpoint component equals
// the hull's corresponding endpoint within 1e-12. The overload taking an
// explicit hull supports screening against an outer box; DegenerateInput when
// no cell qualifies.
IntervalBundle endpoint_intervals(const IntervalBundle& bundle);
IntervalBundle endpoint_intervals(const IntervalBundle& bundle, const Box& hull);

// Halfspace representation H x <= k of the convex hull of the cell midpoints
// (two-dimensional only; DimensionUnsupported otherwise). Affinely dependent
// midpoints are first inflated by a zero-centered box with 10% of the bundle
// hull diameter; DegenerateInput when even the inflated points stay flat.
// Rows of H are unit length with outward normals.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> midpoint_polytope_hrep(const IntervalBundle& bundle);

// Tightest right-hand side k' >= supports such that every corner of every
// cell satisfies H x <= k'; each component is attained by some corner.
Eigen::VectorXd move_hyperplanes(const Eigen::MatrixXd& h, const Eigen::VectorXd& k,
                                 const IntervalBundle& bundle);

// One prediction step for dynamics split as f(x, u) + dw * w: tight bundle of
// the state, cellwise refinement through f, midpoint polytope with moved
// hyperplanes, intersection with the refinement hull, then the disturbance
// term. Two-dimensional states only (DimensionUnsupported otherwise).
ConstrainedZonotope czib_predict(const ConstrainedZonotope& state, const std::vector<Expr>& f,
                                 const Eigen::VectorXd& input, const Eigen::MatrixXd& dw,
                                 const ConstrainedZonotope& disturbance, int divisions);

// Convenience overload taking the split from a model: requires dynamics
// affine in the disturbance with a constant disturbance gain (NotAffineInW
// otherwise).
ConstrainedZonotope czib_predict(const ConstrainedZonotope& state, const SystemModel& model,
                                 const Eigen::VectorXd& input,
                                 const ConstrainedZonotope& disturbance, int divisions);

}  // namespace czono
