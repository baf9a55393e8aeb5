#include "czono/model.hpp"

#include <set>

namespace czono {

namespace {

std::vector<std::string> concat_names(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c) {
  std::vector<std::string> all = a;
  all.insert(all.end(), b.begin(), b.end());
  all.insert(all.end(), c.begin(), c.end());
  return all;
}

std::vector<double> pack_point(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& w) {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(x.size() + u.size() + w.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) p.push_back(x[i]);
  for (Eigen::Index i = 0; i < u.size(); ++i) p.push_back(u[i]);
  for (Eigen::Index i = 0; i < w.size(); ++i) p.push_back(w[i]);
  return p;
}

Box pack_box(const Box& x, const Eigen::VectorXd& u, const Box& w) {
  Box b = x;
  for (Eigen::Index i = 0; i < u.size(); ++i) b.emplace_back(u[i]);
  b.insert(b.end(), w.begin(), w.end());
  return b;
}

Eigen::VectorXd eval_vector(const std::vector<Expr>& exprs, const std::vector<double>& p) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(exprs.size()));
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = exprs[i].eval(p);
  }
  return out;
}

Eigen::MatrixXd eval_matrix(const std::vector<std::vector<Expr>>& rows,
                            const std::vector<double>& p) {
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n = m > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd out(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(p);
    }
  }
  return out;
}

IntervalMatrix eval_matrix_over(const std::vector<std::vector<Expr>>& rows, const Box& box) {
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n = m > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  IntervalMatrix out(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.set(i, j, rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(box));
    }
  }
  return out;
}

// All second partials within the given column range are structurally zero.
bool affine_in_range(const std::vector<std::vector<Expr>>& jac, int lo, int hi) {
  for (const auto& row : jac) {
    for (int i = lo; i < hi; ++i) {
      for (int j = lo; j < hi; ++j) {
        try {
          if (!row[static_cast<std::size_t>(i)].derivative(j).is_zero()) return false;
        } catch (const NonSmooth&) {
          return false;
        }
      }
    }
  }
  return true;
}

bool jacobian_entries_constant(const std::vector<std::vector<Expr>>& jac, int n_vars) {
  for (const auto& row : jac) {
    for (const Expr& entry : row) {
      for (int j = 0; j < n_vars; ++j) {
        try {
          if (!entry.derivative(j).is_zero()) return false;
        } catch (const NonSmooth&) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

SystemModel SystemModel::from_text(std::vector<std::string> state_names,
                                   std::vector<std::string> input_names,
                                   std::vector<std::string> process_noise_names,
                                   std::vector<std::string> measurement_noise_names,
                                   const std::vector<std::string>& dynamics_text,
                                   const std::vector<std::string>& measurement_text) {
  SystemModel m;
  m.nx_ = static_cast<int>(state_names.size());
  m.nu_ = static_cast<int>(input_names.size());
  m.nw_ = static_cast<int>(process_noise_names.size());
  m.nv_ = static_cast<int>(measurement_noise_names.size());
  m.ny_ = static_cast<int>(measurement_text.size());
  if (m.nx_ == 0) throw DimensionMismatch("a plant needs at least one state");
  if (dynamics_text.size() != state_names.size()) {
    throw DimensionMismatch("one dynamics expression per state is required");
  }

  {
    std::set<std::string> seen;
    for (const auto& list :
         {state_names, input_names, process_noise_names, measurement_noise_names}) {
      for (const std::string& n : list) {
        if (!seen.insert(n).second) {
          throw DomainError("duplicate variable name '" + n + "'");
        }
      }
    }
  }

  m.state_names_ = std::move(state_names);
  m.input_names_ = std::move(input_names);
  m.w_names_ = std::move(process_noise_names);
  m.v_names_ = std::move(measurement_noise_names);

  const std::vector<std::string> f_vars =
      concat_names(m.state_names_, m.input_names_, m.w_names_);
  const std::vector<std::string> g_vars =
      concat_names(m.state_names_, m.input_names_, m.v_names_);
  for (const std::string& t : dynamics_text) m.f_.push_back(parse_expr(t, f_vars));
  for (const std::string& t : measurement_text) m.g_.push_back(parse_expr(t, g_vars));

  const int f_n = m.nx_ + m.nu_ + m.nw_;
  const int g_n = m.nx_ + m.nu_ + m.nv_;
  m.f_jac_ = jacobian(m.f_, f_n);
  m.g_jac_ = jacobian(m.g_, g_n);

  try {
    m.f_hh_ = half_hessian(m.f_, f_n);
  } catch (const NonSmooth&) {
    m.f_hh_.reset();
  }

  const int w_lo = m.nx_ + m.nu_;
  m.f_affine_in_w_ = affine_in_range(m.f_jac_, w_lo, w_lo + m.nw_);
  m.f_constant_dw_ = true;
  for (const auto& row : m.f_jac_) {
    for (int i = w_lo; i < w_lo + m.nw_ && m.f_constant_dw_; ++i) {
      for (int j = 0; j < f_n; ++j) {
        try {
          if (!row[static_cast<std::size_t>(i)].derivative(j).is_zero()) {
            m.f_constant_dw_ = false;
            break;
          }
        } catch (const NonSmooth&) {
          m.f_constant_dw_ = false;
          break;
        }
      }
    }
  }

  const int v_lo = m.nx_ + m.nu_;
  m.g_affine_in_v_ = affine_in_range(m.g_jac_, v_lo, v_lo + m.nv_);
  m.g_linear_ = jacobian_entries_constant(m.g_jac_, g_n);
  if (m.g_linear_ && m.ny_ > 0) {
    const std::vector<double> zeros(static_cast<std::size_t>(g_n), 0.0);
    const Eigen::MatrixXd full = eval_matrix(m.g_jac_, zeros);
    m.c_ = full.leftCols(m.nx_);
    m.du_ = full.middleCols(m.nx_, m.nu_);
    m.dv_ = full.rightCols(m.nv_);
    m.g0_ = eval_vector(m.g_, zeros);
  }
  return m;
}

std::vector<double> SystemModel::pack_dynamics_point(const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& u,
                                                     const Eigen::VectorXd& w) const {
  if (x.size() != nx_ || u.size() != nu_ || w.size() != nw_) {
    throw DimensionMismatch("dynamics argument dimensions do not match the plant");
  }
  return pack_point(x, u, w);
}

Box SystemModel::pack_dynamics_box(const Box& x, const Eigen::VectorXd& u,
                                   const Box& w) const {
  if (static_cast<int>(x.size()) != nx_ || u.size() != nu_ ||
      static_cast<int>(w.size()) != nw_) {
    throw DimensionMismatch("dynamics box dimensions do not match the plant");
  }
  return pack_box(x, u, w);
}

Eigen::VectorXd SystemModel::eval_dynamics(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                           const Eigen::VectorXd& w) const {
  return eval_vector(f_, pack_dynamics_point(x, u, w));
}

Eigen::VectorXd SystemModel::eval_measurement(const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& u,
                                              const Eigen::VectorXd& v) const {
  if (x.size() != nx_ || u.size() != nu_ || v.size() != nv_) {
    throw DimensionMismatch("measurement argument dimensions do not match the plant");
  }
  return eval_vector(g_, pack_point(x, u, v));
}

Eigen::MatrixXd SystemModel::dynamics_jacobian_at(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& u,
                                                  const Eigen::VectorXd& w) const {
  return eval_matrix(f_jac_, pack_dynamics_point(x, u, w));
}

IntervalMatrix SystemModel::dynamics_jacobian_over(const Box& x, const Eigen::VectorXd& u,
                                                   const Box& w) const {
  return eval_matrix_over(f_jac_, pack_dynamics_box(x, u, w));
}

Eigen::MatrixXd SystemModel::measurement_jacobian_at(const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& u,
                                                     const Eigen::VectorXd& v) const {
  if (x.size() != nx_ || u.size() != nu_ || v.size() != nv_) {
    throw DimensionMismatch("measurement argument dimensions do not match the plant");
  }
  return eval_matrix(g_jac_, pack_point(x, u, v));
}

IntervalMatrix SystemModel::dynamics_half_hessian_over(int q, const Box& x,
                                                       const Eigen::VectorXd& u,
                                                       const Box& w) const {
  if (!f_hh_.has_value()) {
    throw NonSmooth("dynamics half-Hessian unavailable (abs in a twice-differentiated path)");
  }
  if (q < 0 || q >= nx_) throw DimensionMismatch("dynamics component out of range");
  return eval_matrix_over((*f_hh_)[static_cast<std::size_t>(q)], pack_dynamics_box(x, u, w));
}

const Eigen::MatrixXd& SystemModel::meas_c() const {
  if (!g_linear_) throw DomainError("measurement map is not linear");
  return c_;
}
const Eigen::MatrixXd& SystemModel::meas_du() const {
  if (!g_linear_) throw DomainError("measurement map is not linear");
  return du_;
}
const Eigen::MatrixXd& SystemModel::meas_dv() const {
  if (!g_linear_) throw DomainError("measurement map is not linear");
  return dv_;
}
const Eigen::VectorXd& SystemModel::meas_g0() const {
  if (!g_linear_) throw DomainError("measurement map is not linear");
  return g0_;
}

Eigen::MatrixXd SystemModel::dynamics_dw_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& w) const {
  return dynamics_jacobian_at(x, u, w).rightCols(nw_);
}

namespace {

std::vector<Expr> close_over_input(const std::vector<Expr>& eqs, int nx, const Eigen::VectorXd& u) {
  std::vector<Expr> out;
  out.reserve(eqs.size());
  for (const Expr& e : eqs) {
    Expr fixed = e;
    for (int j = 0; j < u.size(); ++j) fixed = fixed.substitute(nx + j, u[j]);
    out.push_back(fixed.shift_variables(nx, -static_cast<int>(u.size())));
  }
  return out;
}

}  // namespace

std::vector<Expr> SystemModel::dynamics_in_xw(const Eigen::VectorXd& u) const {
  if (u.size() != nu_) throw DimensionMismatch("input length does not match the model");
  return close_over_input(f_, nx_, u);
}

std::vector<Expr> SystemModel::measurement_in_xv(const Eigen::VectorXd& u) const {
  if (u.size() != nu_) throw DimensionMismatch("input length does not match the model");
  return close_over_input(g_, nx_, u);
}

}  // namespace czono
