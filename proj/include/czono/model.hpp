#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "czono/expr.hpp"
#include "czono/interval.hpp"

namespace czono {

// Discrete-time plant
//   x+ = f(x, u, w),   y = g(x, u, v),
// with expressions over the concatenated variable orders (x, u, w) for f and
// (x, u, v) for g. Jacobians are differentiated once at construction;
// half-Hessians too, unless abs makes a second derivative non-smooth (then
// they are absent and first-order machinery raises NonSmooth on use).
class SystemModel {
public:
  static SystemModel from_text(std::vector<std::string> state_names,
                               std::vector<std::string> input_names,
                               std::vector<std::string> process_noise_names,
                               std::vector<std::string> measurement_noise_names,
                               const std::vector<std::string>& dynamics_text,
                               const std::vector<std::string>& measurement_text);

  int n_x() const { return nx_; }
  int n_u() const { return nu_; }
  int n_w() const { return nw_; }
  int n_v() const { return nv_; }
  int n_y() const { return ny_; }
  bool has_measurement() const { return ny_ > 0; }

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<Expr>& dynamics() const { return f_; }
  const std::vector<Expr>& measurement() const { return g_; }

  bool dynamics_affine_in_w() const { return f_affine_in_w_; }
  bool dynamics_constant_dw() const { return f_constant_dw_; }
  bool measurement_affine_in_v() const { return g_affine_in_v_; }
  bool measurement_linear() const { return g_linear_; }

  Eigen::VectorXd eval_dynamics(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& w) const;
  Eigen::VectorXd eval_measurement(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v) const;

  // Full Jacobians (n rows by nx+nu+nw columns for f; ny by nx+nu+nv for g).
  Eigen::MatrixXd dynamics_jacobian_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& w) const;
  IntervalMatrix dynamics_jacobian_over(const Box& x, const Eigen::VectorXd& u,
                                        const Box& w) const;
  Eigen::MatrixXd measurement_jacobian_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& v) const;

  // Half-Hessian of dynamics component q over (x, u, w), evaluated on a box.
  // NonSmooth when the symbolic half-Hessian could not be formed.
  IntervalMatrix dynamics_half_hessian_over(int q, const Box& x, const Eigen::VectorXd& u,
                                            const Box& w) const;
  bool dynamics_twice_differentiable() const { return f_hh_.has_value(); }

  // Constant measurement pieces y = g0 + C x + Du u + Dv v; DomainError unless
  // measurement_linear().
  const Eigen::MatrixXd& meas_c() const;
  const Eigen::MatrixXd& meas_du() const;
  const Eigen::MatrixXd& meas_dv() const;
  const Eigen::VectorXd& meas_g0() const;

  // Disturbance gain at a point (the w-block of the dynamics Jacobian).
  Eigen::MatrixXd dynamics_dw_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& w) const;

  // Dynamics with the input fixed, as expressions over the stacked vector
  // (x, w): variables 0..nx-1 are states, nx..nx+nw-1 disturbances.
  std::vector<Expr> dynamics_in_xw(const Eigen::VectorXd& u) const;
  // Measurement with the input fixed, over (x, v) stacked the same way.
  std::vector<Expr> measurement_in_xv(const Eigen::VectorXd& u) const;

  // Helpers assembling the concatenated evaluation arguments.
  std::vector<double> pack_dynamics_point(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& w) const;
  Box pack_dynamics_box(const Box& x, const Eigen::VectorXd& u, const Box& w) const;

private:
  SystemModel() = default;

  int nx_ = 0, nu_ = 0, nw_ = 0, nv_ = 0, ny_ = 0;
  std::vector<std::string> state_names_, input_names_, w_names_, v_names_;
  std::vector<Expr> f_, g_;
  std::vector<std::vector<Expr>> f_jac_, g_jac_;
  std::optional<std::vector<std::vector<std::vector<Expr>>>> f_hh_;
  bool f_affine_in_w_ = false, f_constant_dw_ = false;
  bool g_affine_in_v_ = false, g_linear_ = false;
  Eigen::MatrixXd c_, du_, dv_;
  Eigen::VectorXd g0_;
};

}  // namespace czono
