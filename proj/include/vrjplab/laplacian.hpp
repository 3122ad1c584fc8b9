#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>

#include "vrjplab/graph.hpp"

namespace vrjp {

// Raised when a determinant that must be positive for a connected graph comes
// out non-positive (or a factorization cannot produce it).
struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The directed out-degree Laplacian for arc weights W_ij e^{u_j - u_i},
// conjugated by diag(e^{u}): off-diagonals become -W_ij and the diagonal is
// d_i = e^{-u_i} sum_j W_ij e^{u_j}. The conjugation leaves every principal
// minor determinant unchanged, and the resulting matrix is symmetric with the
// root minor positive definite; its determinant is the tree polynomial.
Eigen::VectorXd laplacian_diagonal(const Graph& g, std::span<const double> u);

// Root minor of diag(d(u)) - W, over vertices != root in index order.
Eigen::MatrixXd laplacian_minor(const Graph& g, std::span<const double> u);

inline int minor_index(int v, int root) { return v < root ? v : v - 1; }

// log det of a symmetric positive definite matrix; falls back to pivoted LU
// when Cholesky breaks down, throws structural_error if the determinant is not
// positive.
double spd_log_det(const Eigen::MatrixXd& m);

}  // namespace vrjp
