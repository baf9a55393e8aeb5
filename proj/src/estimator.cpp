#include "czono/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "czono/bundle.hpp"
#include "czono/errors.hpp"
#include "czono/rng.hpp"

namespace czono {
namespace {

ApproxHeuristic resolved_heuristic(const EstimatorConfig& cfg) {
  if (cfg.heuristic) return *cfg.heuristic;
  switch (cfg.method) {
    case EstimationMethod::Linear:
    case EstimationMethod::CZMV:
      return ApproxHeuristic::WeightedDiamLp;
    default:
      return ApproxHeuristic::ClosestPoint;
  }
}

bool uses_zonotopes(EstimationMethod method) {
  return method == EstimationMethod::ZMV || method == EstimationMethod::ZFO;
}

void validate_config(const EstimatorConfig& cfg, const SystemModel& plant) {
  if (cfg.max_generators < 1 || cfg.max_constraints < 0) {
    throw DomainError("complexity limits must be positive");
  }
  if (uses_zonotopes(cfg.method)) {
    if (cfg.max_generators < plant.n_x()) {
      throw DomainError("generator limit below the state dimension");
    }
  } else if (cfg.max_generators < plant.n_x() + cfg.max_constraints) {
    throw DomainError("generator limit below the lifted reduction floor");
  }
  if (cfg.method == EstimationMethod::CZIB && cfg.divisions < 1) {
    throw DomainError("partition count must be at least one");
  }
}

Zonotope zonotope_cover(const ConstrainedZonotope& z) {
  if (z.A.rows() == 0) return Zonotope(z.G, z.c);
  const ConstrainedZonotope cover =
      eliminate_constraints(z, static_cast<int>(z.A.rows())).first;
  return Zonotope(cover.G, cover.c);
}

ConstrainedZonotope as_cz(const Zonotope& z) {
  return ConstrainedZonotope(z.G, z.c, Eigen::MatrixXd(0, z.G.cols()), Eigen::VectorXd(0));
}

IntervalMatrix state_block(const IntervalMatrix& jac, int nx) {
  return IntervalMatrix(jac.lower().leftCols(nx), jac.upper().leftCols(nx));
}

Box centered_box(const Eigen::VectorXd& radii) {
  Box out(static_cast<std::size_t>(radii.size()));
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    out[static_cast<std::size_t>(i)] = Interval(-radii[i], radii[i]);
  }
  return out;
}

ConstrainedZonotope predict_cz(const EstimatorConfig& cfg, const SystemModel& plant,
                               const ConstrainedZonotope& x, const Eigen::VectorXd& u,
                               const ConstrainedZonotope& w_set) {
  switch (cfg.method) {
    case EstimationMethod::Linear:
    case EstimationMethod::CZMV:
      return mean_value_extension(plant, x, u, w_set, resolved_heuristic(cfg));
    case EstimationMethod::CZFO: {
      const std::vector<Expr> f = plant.dynamics_in_xw(u);
      const ConstrainedZonotope joint =
          plant.n_w() > 0 ? cartesian_product(x, w_set) : x;
      return first_order_extension(f, joint, resolved_heuristic(cfg));
    }
    case EstimationMethod::CZIB:
      return czib_predict(x, plant, u, w_set, cfg.divisions);
    default:
      throw DomainError("zonotope methods do not produce constrained predictions");
  }
}

ConstrainedZonotope update_cz(const SystemModel& plant, const ConstrainedZonotope& pred,
                              const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                              const ConstrainedZonotope& v_set) {
  if (plant.measurement_linear()) {
    return linear_measurement_update(pred, plant.meas_c(), plant.meas_du(), plant.meas_dv(),
                                     u, y - plant.meas_g0(), v_set);
  }
  return nonlinear_measurement_update(plant.measurement_in_xv(u), pred, v_set, y,
                                      ApproxHeuristic::ClosestPoint);
}

ConstrainedZonotope reduce_cz(const EstimatorConfig& cfg, const ConstrainedZonotope& z) {
  ConstrainedZonotope out = z;
  const int excess = static_cast<int>(out.A.rows()) - cfg.max_constraints;
  if (excess > 0) out = eliminate_constraints(out, excess).first;
  const int floor = static_cast<int>(out.dim() + out.A.rows());
  const int target = std::max(cfg.max_generators, floor);
  if (out.G.cols() > target) out = reduce_generators(out, target, cfg.reduction);
  return prune_zero_generators(out);
}

Zonotope reduce_z(const EstimatorConfig& cfg, const Zonotope& z) {
  const int target = std::max(cfg.max_generators, static_cast<int>(z.dim()));
  const Zonotope out =
      z.G.cols() > target ? reduce_generators(z, target, cfg.reduction) : z;
  return prune_zero_generators(out);
}

StepRecord make_record(int k, const ConstrainedZonotope& set, bool empty_update) {
  StepRecord rec;
  rec.k = k;
  rec.set = set;
  rec.hull = interval_hull(set);
  rec.radius = radius_metric(rec.hull);
  rec.empty_update = empty_update;
  return rec;
}

}  // namespace

std::string method_name(EstimationMethod method) {
  switch (method) {
    case EstimationMethod::Linear: return "Linear";
    case EstimationMethod::CZMV: return "CZMV";
    case EstimationMethod::CZFO: return "CZFO";
    case EstimationMethod::CZIB: return "CZIB";
    case EstimationMethod::ZMV: return "ZMV";
    case EstimationMethod::ZFO: return "ZFO";
  }
  return "unknown";
}

std::optional<EstimationMethod> method_from_name(const std::string& name) {
  for (EstimationMethod m : {EstimationMethod::Linear, EstimationMethod::CZMV,
                             EstimationMethod::CZFO, EstimationMethod::CZIB,
                             EstimationMethod::ZMV, EstimationMethod::ZFO}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

EstimatorState initial_state(const EstimatorConfig& cfg, const SystemModel& plant,
                             const ConstrainedZonotope& x0, const Eigen::VectorXd& u,
                             const std::optional<Eigen::VectorXd>& y0,
                             const ConstrainedZonotope& v_set) {
  validate_config(cfg, plant);
  if (x0.dim() != plant.n_x()) throw DimensionMismatch("initial set does not match the model");

  bool empty_update = false;
  ConstrainedZonotope estimate = x0;
  if (uses_zonotopes(cfg.method)) {
    Zonotope est = zonotope_cover(x0);
    if (y0) {
      if (!plant.has_measurement()) {
        throw DomainError("initial correction needs a measurement model");
      }
      if (!plant.measurement_linear()) {
        throw DomainError("zonotope methods need a linear measurement");
      }
      try {
        est = bravo_strip_update(est, plant.meas_c(), plant.meas_du(), plant.meas_dv(), u,
                                 *y0 - plant.meas_g0(), zonotope_cover(v_set));
      } catch (const EmptySet&) {
        empty_update = true;
      }
    }
    estimate = as_cz(reduce_z(cfg, est));
  } else {
    if (y0) {
      if (!plant.has_measurement()) {
        throw DomainError("initial correction needs a measurement model");
      }
      const ConstrainedZonotope corrected = update_cz(plant, x0, u, *y0, v_set);
      if (is_empty(corrected)) {
        empty_update = true;
      } else {
        estimate = corrected;
      }
    }
    estimate = reduce_cz(cfg, estimate);
  }

  EstimatorState state;
  state.k = 0;
  state.estimate = estimate;
  state.history.push_back(make_record(0, estimate, empty_update));
  return state;
}

EstimatorState estimator_step(const EstimatorConfig& cfg, const EstimatorState& state,
                              const SystemModel& plant, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& y, const ConstrainedZonotope& w_set,
                              const ConstrainedZonotope& v_set) {
  validate_config(cfg, plant);
  if (u.size() != plant.n_u()) throw DimensionMismatch("input length does not match the model");
  if (plant.has_measurement() && y.size() != plant.n_y()) {
    throw DimensionMismatch("measurement length does not match the model");
  }

  bool empty_update = false;
  ConstrainedZonotope next_estimate;
  if (uses_zonotopes(cfg.method)) {
    const Zonotope xz = zonotope_cover(state.estimate);
    const Zonotope wz = zonotope_cover(w_set);
    const Zonotope pred = cfg.method == EstimationMethod::ZMV
                              ? zonotope_mv_predict(plant, xz, u, wz)
                              : zonotope_fo_predict(plant, xz, u, wz);
    Zonotope upd = pred;
    if (plant.has_measurement()) {
      if (!plant.measurement_linear()) {
        throw DomainError("zonotope methods need a linear measurement");
      }
      try {
        upd = bravo_strip_update(pred, plant.meas_c(), plant.meas_du(), plant.meas_dv(), u,
                                 y - plant.meas_g0(), zonotope_cover(v_set));
      } catch (const EmptySet&) {
        empty_update = true;
        upd = pred;
      }
    }
    next_estimate = as_cz(reduce_z(cfg, upd));
  } else {
    const ConstrainedZonotope pred = predict_cz(cfg, plant, state.estimate, u, w_set);
    ConstrainedZonotope upd = pred;
    if (plant.has_measurement()) {
      upd = update_cz(plant, pred, u, y, v_set);
      if (is_empty(upd)) {
        empty_update = true;
        upd = pred;
      }
    }
    next_estimate = reduce_cz(cfg, upd);
  }

  EstimatorState next = state;
  next.k = state.k + 1;
  next.estimate = next_estimate;
  next.history.push_back(make_record(next.k, next_estimate, empty_update));
  return next;
}

Zonotope zonotope_mv_predict(const SystemModel& plant, const Zonotope& x,
                             const Eigen::VectorXd& u, const Zonotope& w) {
  if (x.dim() != plant.n_x() || w.dim() != plant.n_w() || u.size() != plant.n_u()) {
    throw DimensionMismatch("state, input, or disturbance does not match the model");
  }
  const Box xbox = interval_hull(x);
  const Box wbox = interval_hull(w);

  // Enclosure of the dynamics at the generator center over the whole
  // disturbance set.
  Zonotope center_part;
  if (plant.n_w() == 0) {
    center_part = Zonotope::point(plant.eval_dynamics(x.c, u, Eigen::VectorXd()));
  } else if (plant.dynamics_affine_in_w() && plant.dynamics_constant_dw()) {
    const Eigen::VectorXd zero_w = Eigen::VectorXd::Zero(plant.n_w());
    const Eigen::MatrixXd dw = plant.dynamics_dw_at(x.c, u, zero_w);
    center_part = Zonotope(dw * w.G, plant.eval_dynamics(x.c, u, zero_w) + dw * w.c);
  } else {
    Box xc(static_cast<std::size_t>(plant.n_x()));
    for (Eigen::Index i = 0; i < x.c.size(); ++i) {
      xc[static_cast<std::size_t>(i)] = Interval(x.c[i]);
    }
    const Box arg = plant.pack_dynamics_box(xc, u, wbox);
    Box image(static_cast<std::size_t>(plant.n_x()));
    for (int q = 0; q < plant.n_x(); ++q) {
      image[static_cast<std::size_t>(q)] = plant.dynamics()[static_cast<std::size_t>(q)].eval(arg);
    }
    center_part = Zonotope::from_box(image);
  }

  // Generator image through the interval Jacobian, boxed: the midpoint part
  // stays a generator block, the radius collapses into a diagonal.
  const IntervalMatrix jac = state_block(plant.dynamics_jacobian_over(xbox, u, wbox), plant.n_x());
  const IntervalMatrix m = interval_matrix_mul(jac, x.G);
  const Eigen::VectorXd spread = m.rad().rowwise().sum();

  Eigen::MatrixXd gens(plant.n_x(), center_part.G.cols() + m.cols() + plant.n_x());
  gens << center_part.G, m.mid(), Eigen::MatrixXd(spread.asDiagonal());
  return Zonotope(gens, center_part.c);
}

Zonotope zonotope_fo_predict(const SystemModel& plant, const Zonotope& x,
                             const Eigen::VectorXd& u, const Zonotope& w) {
  if (x.dim() != plant.n_x() || w.dim() != plant.n_w() || u.size() != plant.n_u()) {
    throw DimensionMismatch("state, input, or disturbance does not match the model");
  }
  const Box xbox = interval_hull(x);
  const Box wbox = interval_hull(w);

  const Eigen::MatrixXd jac = plant.dynamics_jacobian_at(x.c, u, w.c);
  const Eigen::MatrixXd lin_x = jac.leftCols(plant.n_x()) * x.G;
  const Eigen::MatrixXd lin_w = jac.rightCols(plant.n_w()) * w.G;
  const Eigen::VectorXd center = plant.eval_dynamics(x.c, u, w.c);

  // Lagrange remainder of the joint expansion at (c_x, u, c_w), evaluated as
  // an interval quadratic form over the centered deviation box.
  Box delta = centered_box(x.G.cwiseAbs().rowwise().sum());
  for (Eigen::Index i = 0; i < u.size(); ++i) delta.push_back(Interval(0.0));
  const Eigen::VectorXd w_spread = w.G.cwiseAbs().rowwise().sum();
  for (Eigen::Index i = 0; i < w_spread.size(); ++i) {
    delta.push_back(Interval(-w_spread[i], w_spread[i]));
  }

  Eigen::VectorXd rem_mid(plant.n_x()), rem_rad(plant.n_x());
  for (int q = 0; q < plant.n_x(); ++q) {
    const IntervalMatrix hq = plant.dynamics_half_hessian_over(q, xbox, u, wbox);
    const Box rows = interval_matrix_apply(hq, delta);
    Interval acc(0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      acc = acc + delta[i] * rows[i];
    }
    rem_mid[q] = acc.mid();
    rem_rad[q] = acc.rad();
  }

  Eigen::MatrixXd gens(plant.n_x(), lin_x.cols() + lin_w.cols() + plant.n_x());
  gens << lin_x, lin_w, Eigen::MatrixXd(rem_rad.asDiagonal());
  return Zonotope(gens, center + rem_mid);
}

Zonotope bravo_strip_update(const Zonotope& x, const Eigen::MatrixXd& c,
                            const Eigen::MatrixXd& du, const Eigen::MatrixXd& dv,
                            const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                            const Zonotope& v) {
  if (c.cols() != x.dim() || c.rows() != y.size()) {
    throw DimensionMismatch("measurement map does not match the set and output");
  }
  if (du.rows() != c.rows() || du.cols() != u.size() || dv.rows() != c.rows() ||
      dv.cols() != v.dim()) {
    throw DimensionMismatch("measurement gain shapes do not match");
  }

  const Eigen::VectorXd input_part = du * u;
  const Eigen::MatrixXd noise_gens = dv * v.G;
  const Eigen::VectorXd noise_center = dv * v.c;

  Zonotope cur = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Eigen::VectorXd p = c.row(i).transpose();
    double d = y[i] - input_part[i] - noise_center[i];
    double sigma = noise_gens.row(i).cwiseAbs().sum();

    // Tighten the strip against the set's own projection before intersecting.
    const double proj_mid = p.dot(cur.c);
    const Eigen::VectorXd pg = cur.G.transpose() * p;
    const double proj_rad = pg.cwiseAbs().sum();
    const double lo = std::max(d - sigma, proj_mid - proj_rad);
    const double hi = std::min(d + sigma, proj_mid + proj_rad);
    if (lo > hi) throw EmptySet("measurement strip misses the set");
    d = 0.5 * (lo + hi);
    sigma = 0.5 * (hi - lo);

    Zonotope best = cur;
    double best_score = (cur.G * cur.G.transpose()).determinant();
    for (Eigen::Index j = 0; j < cur.G.cols(); ++j) {
      const double t = pg[j];
      if (std::abs(t) <= 1e-12) continue;
      Eigen::MatrixXd g = cur.G;
      for (Eigen::Index col = 0; col < g.cols(); ++col) {
        if (col != j) g.col(col) -= (pg[col] / t) * cur.G.col(j);
      }
      g.col(j) = (sigma / t) * cur.G.col(j);
      const double score = (g * g.transpose()).determinant();
      if (score < best_score) {
        best = Zonotope(std::move(g), cur.c + ((d - proj_mid) / t) * cur.G.col(j));
        best_score = score;
      }
    }
    cur = std::move(best);
  }
  return cur;
}

double radius_metric(const Box& hull) {
  double r = 0.0;
  for (const Interval& axis : hull) r = std::max(r, axis.rad());
  return r;
}

double radius_metric(const ConstrainedZonotope& z) { return radius_metric(interval_hull(z)); }

double arr(const std::vector<double>& radii_a, const std::vector<double>& radii_b) {
  if (radii_a.size() != radii_b.size()) {
    throw LengthMismatch("radius series differ in length");
  }
  if (radii_a.empty()) throw DomainError("cannot average an empty series");
  double sum = 0.0;
  for (std::size_t k = 0; k < radii_a.size(); ++k) sum += radii_a[k] / radii_b[k];
  return sum / static_cast<double>(radii_a.size());
}

TruthTrajectory simulate_truth(const SystemModel& plant, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& input, int horizon, const Zonotope& w_gen,
                               const Zonotope& v_gen, std::uint64_t seed) {
  if (x0.size() != plant.n_x() || input.size() != plant.n_u()) {
    throw DimensionMismatch("initial state or input does not match the model");
  }
  if (w_gen.dim() != plant.n_w() || v_gen.dim() != plant.n_v()) {
    throw DimensionMismatch("noise bounds do not match the model");
  }
  if (horizon < 0) throw DomainError("horizon must be nonnegative");

  UniformRng rng(seed);
  const auto draw = [&rng](const Zonotope& gen) {
    Eigen::VectorXd xi(gen.G.cols());
    for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = rng.in(-1.0, 1.0);
    return Eigen::VectorXd(gen.c + gen.G * xi);
  };

  TruthTrajectory truth;
  truth.states.push_back(x0);
  if (plant.has_measurement()) {
    truth.outputs.push_back(plant.eval_measurement(x0, input, draw(v_gen)));
  } else {
    truth.outputs.push_back(Eigen::VectorXd());
  }
  for (int k = 1; k <= horizon; ++k) {
    const Eigen::VectorXd w = draw(w_gen);
    truth.states.push_back(plant.eval_dynamics(truth.states.back(), input, w));
    if (plant.has_measurement()) {
      truth.outputs.push_back(plant.eval_measurement(truth.states.back(), input, draw(v_gen)));
    } else {
      truth.outputs.push_back(Eigen::VectorXd());
    }
  }
  return truth;
}

}  // namespace czono
