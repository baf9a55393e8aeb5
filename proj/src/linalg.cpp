#include "czono/linalg.hpp"

#include <cmath>
#include <numeric>

namespace czono {

namespace {

GaussJordanResult reduce(const Eigen::MatrixXd& m, const Eigen::VectorXd* rhs,
                         double pivot_tol) {
  GaussJordanResult out;
  out.reduced = m;
  if (rhs != nullptr) {
    if (rhs->size() != m.rows()) {
      throw DimensionMismatch("carried rhs length does not match row count");
    }
    out.rhs = *rhs;
  }
  out.row_perm.resize(static_cast<std::size_t>(m.rows()));
  out.col_perm.resize(static_cast<std::size_t>(m.cols()));
  std::iota(out.row_perm.begin(), out.row_perm.end(), 0);
  std::iota(out.col_perm.begin(), out.col_perm.end(), 0);

  Eigen::MatrixXd& w = out.reduced;
  const Eigen::Index steps = std::min(m.rows(), m.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index s = 0; s < steps; ++s) {
    Eigen::Index pi = s, pj = s;
    double best = 0.0;
    for (Eigen::Index i = s; i < w.rows(); ++i) {
      for (Eigen::Index j = s; j < w.cols(); ++j) {
        const double a = std::abs(w(i, j));
        if (a > best) {
          best = a;
          pi = i;
          pj = j;
        }
      }
    }
    if (best <= pivot_tol) break;

    if (pi != s) {
      w.row(s).swap(w.row(pi));
      std::swap(out.row_perm[static_cast<std::size_t>(s)],
                out.row_perm[static_cast<std::size_t>(pi)]);
      if (out.rhs.size() > 0) std::swap(out.rhs[s], out.rhs[pi]);
    }
    if (pj != s) {
      w.col(s).swap(w.col(pj));
      std::swap(out.col_perm[static_cast<std::size_t>(s)],
                out.col_perm[static_cast<std::size_t>(pj)]);
    }

    const double pivot = w(s, s);
    w.row(s) /= pivot;
    w(s, s) = 1.0;
    if (out.rhs.size() > 0) out.rhs[s] /= pivot;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (i == s) continue;
      const double factor = w(i, s);
      if (factor == 0.0) continue;
      w.row(i) -= factor * w.row(s);
      w(i, s) = 0.0;
      if (out.rhs.size() > 0) out.rhs[i] -= factor * out.rhs[s];
    }
    ++rank;
  }
  out.rank = rank;
  return out;
}

}  // namespace

GaussJordanResult gauss_jordan_full_pivot(const Eigen::MatrixXd& m, double pivot_tol) {
  return reduce(m, nullptr, pivot_tol);
}

GaussJordanResult gauss_jordan_full_pivot(const Eigen::MatrixXd& m,
                                          const Eigen::VectorXd& rhs,
                                          double pivot_tol) {
  return reduce(m, &rhs, pivot_tol);
}

Eigen::Index matrix_rank(const Eigen::MatrixXd& m, double pivot_tol) {
  if (m.size() == 0) return 0;
  return reduce(m, nullptr, pivot_tol).rank;
}

}  // namespace czono
