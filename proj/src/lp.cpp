#include "czono/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <vector>

namespace czono {

namespace {

constexpr double kPivotTol = 1e-11;

double pos_inf() { return std::numeric_limits<double>::infinity(); }
double neg_inf() { return -std::numeric_limits<double>::infinity(); }

struct Factory {
  std::mutex mutex;
  std::function<std::unique_ptr<LpBackend>()> make;
};

Factory& factory() {
  static Factory f;
  return f;
}

// How each original variable maps into the nonnegative standard variables.
struct VarMap {
  enum Kind { Shifted, Reflected, Split } kind;
  Eigen::Index std_index;  // Split uses std_index (plus part) and std_index+1 (minus part)
  double offset;           // lower bound for Shifted, upper bound for Reflected
};

void validate(const LpProblem& p) {
  const Eigen::Index n = p.num_vars();
  auto check_rows = [&](const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const char* label) {
    if (a.rows() != b.size()) {
      throw DimensionMismatch(std::string(label) + " row count differs from rhs length");
    }
    if (a.rows() > 0 && a.cols() != n) {
      throw DimensionMismatch(std::string(label) + " column count differs from variable count");
    }
  };
  check_rows(p.eq_a, p.eq_b, "equality block");
  check_rows(p.ineq_a, p.ineq_b, "inequality block");
  if (p.lower.size() != n || p.upper.size() != n) {
    throw DimensionMismatch("bound vectors must match variable count");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(p.lower[j]) || std::isnan(p.upper[j])) {
      throw DomainError("variable bound is NaN");
    }
  }
}

class Tableau {
public:
  Tableau(const LpProblem& p, double tol) : tol_(tol) { build(p); }

  LpResult run(const LpProblem& p) {
    if (trivially_infeasible_) return {LpStatus::Infeasible, nan(), {}};
    if (n_std_ == 0) {
      // No variables left: rows decide feasibility outright.
      return rows_consistent_empty_ ? LpResult{LpStatus::Optimal, 0.0, Eigen::VectorXd::Zero(p.num_vars())}
                                    : LpResult{LpStatus::Infeasible, nan(), {}};
    }
    if (!phase_one()) return {LpStatus::Infeasible, nan(), {}};
    const int rc = phase_two();
    if (rc == 1) return {LpStatus::Unbounded, neg_inf(), {}};
    Eigen::VectorXd x = extract(p);
    return {LpStatus::Optimal, p.cost.size() > 0 ? p.cost.dot(x) : 0.0, std::move(x)};
  }

private:
  static double nan() { return std::numeric_limits<double>::quiet_NaN(); }

  void build(const LpProblem& p) {
    const Eigen::Index n = p.num_vars();
    maps_.resize(static_cast<std::size_t>(n));
    Eigen::Index next = 0;
    std::vector<Eigen::Index> bounded_two_sided;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lo = p.lower[j];
      const double hi = p.upper[j];
      if (lo > hi) {
        trivially_infeasible_ = true;
        return;
      }
      VarMap& vm = maps_[static_cast<std::size_t>(j)];
      if (std::isfinite(lo)) {
        vm = {VarMap::Shifted, next++, lo};
        if (std::isfinite(hi)) bounded_two_sided.push_back(j);
      } else if (std::isfinite(hi)) {
        vm = {VarMap::Reflected, next++, hi};
      } else {
        vm = {VarMap::Split, next, 0.0};
        next += 2;
      }
    }
    n_std_ = next;

    const Eigen::Index m_eq = p.eq_a.rows();
    const Eigen::Index m_ineq = p.ineq_a.rows();
    const Eigen::Index m_bnd = static_cast<Eigen::Index>(bounded_two_sided.size());
    const Eigen::Index m = m_eq + m_ineq + m_bnd;
    n_slack_ = m_ineq + m_bnd;

    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, n_std_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    auto emit = [&](Eigen::Index row, const Eigen::RowVectorXd& a, double b) {
      double shift = 0.0;
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double aj = a[j];
        if (aj == 0.0) continue;
        const VarMap& vm = maps_[static_cast<std::size_t>(j)];
        switch (vm.kind) {
          case VarMap::Shifted:
            rows(row, vm.std_index) += aj;
            shift += aj * vm.offset;
            break;
          case VarMap::Reflected:
            rows(row, vm.std_index) -= aj;
            shift += aj * vm.offset;
            break;
          case VarMap::Split:
            rows(row, vm.std_index) += aj;
            rows(row, vm.std_index + 1) -= aj;
            break;
        }
      }
      rhs[row] = b - shift;
    };
    for (Eigen::Index i = 0; i < m_eq; ++i) emit(i, p.eq_a.row(i), p.eq_b[i]);
    for (Eigen::Index i = 0; i < m_ineq; ++i) emit(m_eq + i, p.ineq_a.row(i), p.ineq_b[i]);
    for (Eigen::Index i = 0; i < m_bnd; ++i) {
      const Eigen::Index j = bounded_two_sided[static_cast<std::size_t>(i)];
      const VarMap& vm = maps_[static_cast<std::size_t>(j)];
      rows(m_eq + m_ineq + i, vm.std_index) = 1.0;
      rhs[m_eq + m_ineq + i] = p.upper[j] - p.lower[j];
    }

    if (n_std_ == 0) {
      rows_consistent_empty_ = true;
      for (Eigen::Index i = 0; i < m_eq; ++i) {
        if (std::abs(rhs[i]) > tol_) rows_consistent_empty_ = false;
      }
      for (Eigen::Index i = m_eq; i < m; ++i) {
        if (rhs[i] < -tol_) rows_consistent_empty_ = false;
      }
      return;
    }

    // Slack coefficients, recorded per inequality-type row; sign flips below
    // keep every rhs nonnegative.
    Eigen::VectorXd slack_sign = Eigen::VectorXd::Ones(n_slack_);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (rhs[i] < 0.0) {
        rows.row(i) = -rows.row(i);
        rhs[i] = -rhs[i];
        if (i >= m_eq) slack_sign[i - m_eq] = -1.0;
      }
    }

    // Rows whose slack survived with +1 start basic on the slack; all other
    // rows receive an artificial variable.
    std::vector<Eigen::Index> artificial_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
      const bool has_plus_slack = (i >= m_eq) && slack_sign[i - m_eq] > 0.0;
      if (!has_plus_slack) artificial_rows.push_back(i);
    }
    n_art_ = static_cast<Eigen::Index>(artificial_rows.size());

    const Eigen::Index cols = n_std_ + n_slack_ + n_art_ + 1;
    t_ = Eigen::MatrixXd::Zero(m + 1, cols);
    t_.block(0, 0, m, n_std_) = rows;
    for (Eigen::Index i = m_eq; i < m; ++i) {
      t_(i, n_std_ + (i - m_eq)) = slack_sign[i - m_eq];
    }
    for (Eigen::Index a = 0; a < n_art_; ++a) {
      t_(artificial_rows[static_cast<std::size_t>(a)], n_std_ + n_slack_ + a) = 1.0;
    }
    t_.col(cols - 1).head(m) = rhs;

    basis_.assign(static_cast<std::size_t>(m), -1);
    live_.assign(static_cast<std::size_t>(m), true);
    for (Eigen::Index i = m_eq; i < m; ++i) {
      if (slack_sign[i - m_eq] > 0.0) basis_[static_cast<std::size_t>(i)] = n_std_ + (i - m_eq);
    }
    for (Eigen::Index a = 0; a < n_art_; ++a) {
      basis_[static_cast<std::size_t>(artificial_rows[static_cast<std::size_t>(a)])] =
          n_std_ + n_slack_ + a;
    }
    usable_.assign(static_cast<std::size_t>(cols - 1), true);
    rhs_scale_ = 1.0 + (m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);
  }

  Eigen::Index num_rows() const { return t_.rows() - 1; }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }

  void pivot(Eigen::Index row, Eigen::Index col) {
    const double pv = t_(row, col);
    t_.row(row) /= pv;
    t_(row, col) = 1.0;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f == 0.0) continue;
      t_.row(i) -= f * t_.row(row);
      t_(i, col) = 0.0;
    }
    for (Eigen::Index i = 0; i < num_rows(); ++i) {
      double& v = t_(i, rhs_col());
      if (v < 0.0 && v > -1e-11) v = 0.0;
    }
    basis_[static_cast<std::size_t>(row)] = static_cast<int>(col);
  }

  // Returns 0 on optimal, 1 on unbounded; throws NumericalFailure past the
  // extended iteration cap.
  int optimize() {
    const Eigen::Index m = num_rows();
    const long cap_dantzig = 2000 + 60L * (m + t_.cols());
    const long cap_total = 12L * cap_dantzig;
    const Eigen::Index cost_row = m;
    for (long iter = 0;; ++iter) {
      if (iter > cap_total) {
        throw NumericalFailure("simplex exceeded its extended iteration cap");
      }
      const bool bland = iter > cap_dantzig;
      Eigen::Index enter = -1;
      double best = -tol_;
      for (Eigen::Index j = 0; j + 1 < t_.cols(); ++j) {
        if (!usable_[static_cast<std::size_t>(j)]) continue;
        const double rc = t_(cost_row, j);
        if (bland) {
          if (rc < -tol_) {
            enter = j;
            break;
          }
        } else if (rc < best) {
          best = rc;
          enter = j;
        }
      }
      if (enter < 0) return 0;

      Eigen::Index leave = -1;
      double best_ratio = pos_inf();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!live_[static_cast<std::size_t>(i)]) continue;
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(i, rhs_col()) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        } else if (leave < 0 && std::isfinite(ratio)) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return 1;
      pivot(leave, enter);
    }
  }

  bool phase_one() {
    if (n_art_ == 0) return true;
    const Eigen::Index cost_row = num_rows();
    t_.row(cost_row).setZero();
    for (Eigen::Index a = 0; a < n_art_; ++a) t_(cost_row, n_std_ + n_slack_ + a) = 1.0;
    for (Eigen::Index i = 0; i < num_rows(); ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b >= n_std_ + n_slack_) t_.row(cost_row) -= t_.row(i);
    }
    if (optimize() == 1) {
      throw NumericalFailure("phase-one subproblem reported unbounded");
    }
    const double value = -t_(cost_row, rhs_col());
    if (value > tol_ * rhs_scale_) return false;

    // Evict artificial variables still sitting in the basis.
    for (Eigen::Index i = 0; i < num_rows(); ++i) {
      if (!live_[static_cast<std::size_t>(i)]) continue;
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b < n_std_ + n_slack_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < n_std_ + n_slack_; ++j) {
        if (std::abs(t_(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        live_[static_cast<std::size_t>(i)] = false;  // redundant row
        basis_[static_cast<std::size_t>(i)] = -1;
      }
    }
    for (Eigen::Index a = 0; a < n_art_; ++a) {
      usable_[static_cast<std::size_t>(n_std_ + n_slack_ + a)] = false;
    }
    return true;
  }

  int phase_two() {
    const Eigen::Index cost_row = num_rows();
    t_.row(cost_row).setZero();
    for (Eigen::Index j = 0; j < n_std_; ++j) t_(cost_row, j) = std_cost_[j];
    for (Eigen::Index i = 0; i < num_rows(); ++i) {
      if (!live_[static_cast<std::size_t>(i)]) continue;
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b >= 0 && b < n_std_ && std_cost_[b] != 0.0) {
        t_.row(cost_row) -= std_cost_[b] * t_.row(i);
      }
    }
    return optimize();
  }

  Eigen::VectorXd extract(const LpProblem& p) const {
    Eigen::VectorXd xs = Eigen::VectorXd::Zero(n_std_ + n_slack_);
    for (Eigen::Index i = 0; i < num_rows(); ++i) {
      if (!live_[static_cast<std::size_t>(i)]) continue;
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b >= 0 && b < n_std_ + n_slack_) xs[b] = t_(i, rhs_col());
    }
    Eigen::VectorXd x(p.num_vars());
    for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
      const VarMap& vm = maps_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Shifted:
          x[j] = vm.offset + xs[vm.std_index];
          break;
        case VarMap::Reflected:
          x[j] = vm.offset - xs[vm.std_index];
          break;
        case VarMap::Split:
          x[j] = xs[vm.std_index] - xs[vm.std_index + 1];
          break;
      }
    }
    return x;
  }

public:
  void set_costs(const LpProblem& p) {
    std_cost_ = Eigen::VectorXd::Zero(n_std_);
    if (trivially_infeasible_ || n_std_ == 0) return;
    for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
      const double cj = p.cost[j];
      if (cj == 0.0) continue;
      const VarMap& vm = maps_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Shifted:
          std_cost_[vm.std_index] += cj;
          break;
        case VarMap::Reflected:
          std_cost_[vm.std_index] -= cj;
          break;
        case VarMap::Split:
          std_cost_[vm.std_index] += cj;
          std_cost_[vm.std_index + 1] -= cj;
          break;
      }
    }
  }

private:
  double tol_;
  double rhs_scale_ = 1.0;
  bool trivially_infeasible_ = false;
  bool rows_consistent_empty_ = true;
  Eigen::Index n_std_ = 0, n_slack_ = 0, n_art_ = 0;
  std::vector<VarMap> maps_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd std_cost_;
  std::vector<int> basis_;
  std::vector<bool> live_;
  std::vector<bool> usable_;
};

}  // namespace

LpProblem LpProblem::with_vars(Eigen::Index n) {
  LpProblem p;
  p.cost = Eigen::VectorXd::Zero(n);
  p.eq_a.resize(0, n);
  p.eq_b.resize(0);
  p.ineq_a.resize(0, n);
  p.ineq_b.resize(0);
  p.lower = Eigen::VectorXd::Constant(n, neg_inf());
  p.upper = Eigen::VectorXd::Constant(n, pos_inf());
  return p;
}

double DenseSimplexBackend::default_tolerance() {
  if (const char* env = std::getenv("CZONO_LP_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0.0) return v;
  }
  return 1e-8;
}

DenseSimplexBackend::DenseSimplexBackend() : tol_(default_tolerance()) {}
DenseSimplexBackend::DenseSimplexBackend(double tol) : tol_(tol) {
  if (!(tol > 0.0)) throw DomainError("LP tolerance must be positive");
}

LpResult DenseSimplexBackend::solve(const LpProblem& p) {
  validate(p);
  Tableau tab(p, tol_);
  tab.set_costs(p);
  return tab.run(p);
}

LpResult lp_solve(const LpProblem& p) {
  std::function<std::unique_ptr<LpBackend>()> make;
  {
    std::lock_guard lock(factory().mutex);
    make = factory().make;
  }
  std::unique_ptr<LpBackend> backend = make ? make() : std::make_unique<DenseSimplexBackend>();
  return backend->solve(p);
}

void set_lp_backend_factory(std::function<std::unique_ptr<LpBackend>()> f) {
  std::lock_guard lock(factory().mutex);
  factory().make = std::move(f);
}

}  // namespace czono
