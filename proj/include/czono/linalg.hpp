#pragma once

#include <Eigen/Dense>
#include <vector>

#include "czono/errors.hpp"

namespace czono {

// Outcome of Gauss-Jordan elimination with full pivoting. The reduced matrix
// has an identity block of size rank in its leading rows/columns (pivot
// entries set exactly to 1, eliminated entries exactly to 0). col_perm maps
// output column position -> input column index, row_perm likewise for rows.
struct GaussJordanResult {
  Eigen::MatrixXd reduced;
  Eigen::VectorXd rhs;  // carried right-hand side after the same row ops; size 0 when none
  std::vector<Eigen::Index> row_perm;
  std::vector<Eigen::Index> col_perm;
  Eigen::Index rank = 0;
};

// Full-pivot Gauss-Jordan reduction. Pivot search scans the remaining block
// row-major and keeps the first entry of maximal magnitude, so results are
// deterministic. Entries at or below pivot_tol never become pivots.
GaussJordanResult gauss_jordan_full_pivot(const Eigen::MatrixXd& m,
                                          double pivot_tol = 1e-11);

// Same reduction, but a right-hand side vector rides along through the row
// operations (it is not eligible for pivoting). Used to precondition
// constraint systems A xi = b.
GaussJordanResult gauss_jordan_full_pivot(const Eigen::MatrixXd& m,
                                          const Eigen::VectorXd& rhs,
                                          double pivot_tol = 1e-11);

Eigen::Index matrix_rank(const Eigen::MatrixXd& m, double pivot_tol = 1e-11);

}  // namespace czono
