#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czono/extensions.hpp"
#include "czono/model.hpp"
#include "czono/reduction.hpp"
#include "czono/sets.hpp"

namespace czono {

// Recursive set-valued estimators. The constrained-zonotope family keeps the
// exact measurement intersection; the zonotope family (ZMV, ZFO) is the
// symmetric baseline using the strip update.
enum class EstimationMethod { Linear, CZMV, CZFO, CZIB, ZMV, ZFO };

std::string method_name(EstimationMethod method);
std::optional<EstimationMethod> method_from_name(const std::string& name);

struct EstimatorConfig {
  EstimationMethod method = EstimationMethod::CZMV;
  // Approximation-point rule for the prediction step. Unset picks the
  // per-method default: the diameter-minimizing LP for mean-value methods,
  // the closest point for first-order methods.
  std::optional<ApproxHeuristic> heuristic;
  int max_generators = 20;
  int max_constraints = 5;
  int divisions = 3;  // partition fineness of the bundle method
  // Generator reduction flavor, used for the zonotope baselines and for the
  // lifted reduction of constrained zonotopes.
  GenReduction reduction = GenReduction::MethodB;
};

struct StepRecord {
  int k = 0;
  ConstrainedZonotope set;
  Box hull;
  double radius = 0.0;
  bool empty_update = false;  // intersection came back empty; kept the prediction
};

struct EstimatorState {
  int k = 0;
  ConstrainedZonotope estimate;
  std::vector<StepRecord> history;
};

// Builds the step-0 state from the initial set. When y0 is engaged an initial
// correction (the measurement update at k = 0) is applied before recording.
// Zonotope methods first cover the initial set by eliminating every
// constraint, since their machinery has no constraint storage.
EstimatorState initial_state(const EstimatorConfig& cfg, const SystemModel& plant,
                             const ConstrainedZonotope& x0, const Eigen::VectorXd& u,
                             const std::optional<Eigen::VectorXd>& y0,
                             const ConstrainedZonotope& v_set);

// One prediction-update cycle: propagate through the dynamics per the
// configured method, intersect with the measurement when the plant has one
// (y must then carry n_y entries), reduce constraints first and generators
// second down to the configured limits, and append the step record.
// An empty intersection falls back to the prediction set with a flag.
EstimatorState estimator_step(const EstimatorConfig& cfg, const EstimatorState& state,
                              const SystemModel& plant, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& y, const ConstrainedZonotope& w_set,
                              const ConstrainedZonotope& v_set);

// Mean-value prediction for plain zonotopes: the image of the center under
// the disturbance range, summed with the interval-Jacobian image of the
// generators boxed into a zonotope.
Zonotope zonotope_mv_predict(const SystemModel& plant, const Zonotope& x,
                             const Eigen::VectorXd& u, const Zonotope& w);

// First-order Taylor prediction for plain zonotopes: expansion at the joint
// center plus an interval remainder box from the half-Hessians.
Zonotope zonotope_fo_predict(const SystemModel& plant, const Zonotope& x,
                             const Eigen::VectorXd& u, const Zonotope& w);

// Strip-intersection update for zonotopes. Each measurement row forms a
// strip |C_i x - d_i| <= sigma_i, tightened against the zonotope's own
// projection; the candidate that subsumes the intersection with the smallest
// squared volume wins (the unmodified set competes as candidate zero).
// `y` must already have any constant measurement offset removed.
// EmptySet when a tightened strip misses the zonotope entirely.
Zonotope bravo_strip_update(const Zonotope& x, const Eigen::MatrixXd& c,
                            const Eigen::MatrixXd& du, const Eigen::MatrixXd& dv,
                            const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                            const Zonotope& v);

// Half the length of the longest interval-hull edge.
double radius_metric(const ConstrainedZonotope& z);
double radius_metric(const Box& hull);

// Mean over steps of radius_a(k) / radius_b(k). LengthMismatch when the
// series differ in length, DomainError when they are empty.
double arr(const std::vector<double>& radii_a, const std::vector<double>& radii_b);

struct TruthTrajectory {
  std::vector<Eigen::VectorXd> states;   // x_0 .. x_N
  std::vector<Eigen::VectorXd> outputs;  // y_0 .. y_N (empty vectors when n_y = 0)
};

// Seeded ground-truth rollout. Noise is drawn through the generator
// representation (uniform factors in [-1, 1], so box bounds give
// componentwise uniform draws). Draw order is fixed: v_0 first, then per
// step the process noise followed by the next measurement noise, so records
// are reproducible from the seed alone.
TruthTrajectory simulate_truth(const SystemModel& plant, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& input, int horizon, const Zonotope& w_gen,
                               const Zonotope& v_gen, std::uint64_t seed);

}  // namespace czono
