#pragma once

#include <utility>
#include <vector>

#include "czono/sets.hpp"

namespace czono {

// Factor bounds produced by the interval-propagation sweep over A xi = b.
// `clipped[j]` is the propagated range intersected with [-1, 1]; `forced[j]`
// is the constraint-only range, unbounded where column j never appears.
struct RescaleBounds {
  std::vector<Interval> clipped;
  std::vector<ExtendedInterval> forced;
};

// One Gauss-Seidel pass per sweep over all (constraint, generator) pairs.
// EmptySet when the propagation proves the factor polytope empty.
RescaleBounds rescale_bounds(const ConstrainedZonotope& z, int sweeps = 1);

// Equal-as-a-set CG-rep with factors recentered and rescaled so the sweep
// bounds become [-1, 1]. EmptySet when propagation proves emptiness.
ConstrainedZonotope rescale(const ConstrainedZonotope& z, int sweeps = 1);

// Record of one constraint elimination: the generator matrix before
// rescaling, the factor recentering, the substitution gain, and the
// right-hand side it consumed. Enough to replay the center update.
struct EliminationStep {
  Eigen::MatrixXd pre_rescale_gens;   // n x n_g at step entry
  Eigen::VectorXd factor_shift;       // length n_g
  Eigen::MatrixXd substitution_gain;  // n x n_c at step entry
  Eigen::VectorXd rhs;                // length n_c at step entry
};

struct EliminationTranscript {
  Eigen::VectorXd initial_center;
  std::vector<EliminationStep> steps;

  // initial_center + sum of per-step center updates; equals the center of the
  // elimination result regardless of the initial center's value.
  Eigen::VectorXd replay_center() const;
};

// Remove `count` (constraint, generator) pairs, each step preconditioning A,
// rescaling, scoring candidate generators by approximate Hausdorff error, and
// substituting the winner. The result is a superset of the input. Redundant
// all-zero constraint rows are dropped exactly without consuming a step.
// DomainError when count exceeds n_c; NoEliminablePivot when constraints
// remain but no generator column has a usable coefficient; EmptySet when a
// step proves the input empty.
std::pair<ConstrainedZonotope, EliminationTranscript> eliminate_constraints(
    const ConstrainedZonotope& z, int count);

enum class GenReduction { MethodA, MethodB };

// Cover z by a zonotope with exactly `target` generators. Method A boxes the
// smallest-norm generators; Method B repeatedly absorbs one generator into a
// parallelotope chosen by Gauss-Jordan column pivoting, falling back to
// Method A when the pivot parallelotope is singular. TargetTooSmall when
// target < n; targets at or above n_g return the input unchanged.
Zonotope reduce_generators(const Zonotope& z, int target, GenReduction method);

// Constrained case via the lifted zonotope [G; A] with center [c; -b]:
// reduce the lift, then read the blocks back. TargetTooSmall when
// target < n + n_c.
ConstrainedZonotope reduce_generators(const ConstrainedZonotope& z, int target,
                                      GenReduction method);

}  // namespace czono
