#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "czono/errors.hpp"

namespace czono {

// Linear program
//   minimize cost' x
//   subject to eq_a x = eq_b, ineq_a x <= ineq_b, lower <= x <= upper.
// Bounds may be +-infinity. Row blocks may be empty (0 rows).
struct LpProblem {
  Eigen::VectorXd cost;
  Eigen::MatrixXd eq_a;
  Eigen::VectorXd eq_b;
  Eigen::MatrixXd ineq_a;
  Eigen::VectorXd ineq_b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  // Zero cost, no rows, free bounds.
  static LpProblem with_vars(Eigen::Index n);
  Eigen::Index num_vars() const { return cost.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;      // optimal objective; -inf when unbounded, NaN when infeasible
  Eigen::VectorXd x;       // optimizer in the original variables; empty unless Optimal
};

class LpBackend {
public:
  virtual ~LpBackend() = default;
  virtual LpResult solve(const LpProblem& p) = 0;
};

// Dense two-phase tableau simplex. Pricing is most-negative reduced cost with
// lowest-index ties; after an iteration cap it switches to Bland's rule, and
// after an extended cap it throws NumericalFailure. The feasibility tolerance
// defaults to 1e-8 and can be overridden through the CZONO_LP_TOL environment
// variable (read at construction).
class DenseSimplexBackend : public LpBackend {
public:
  DenseSimplexBackend();
  explicit DenseSimplexBackend(double tol);
  LpResult solve(const LpProblem& p) override;

  static double default_tolerance();

private:
  double tol_;
};

// Solve with a freshly constructed backend from the registered factory
// (DenseSimplexBackend unless replaced). A new instance per call keeps
// concurrent callers isolated.
LpResult lp_solve(const LpProblem& p);
void set_lp_backend_factory(std::function<std::unique_ptr<LpBackend>()> factory);

}  // namespace czono
