#pragma once

#include <Eigen/Dense>

namespace qng {

// Relative singular-value / eigenvalue cutoff shared by the equilibrium solve
// and the innovation-covariance pseudo-inverse.
inline constexpr double kRankCutoff = 1e-10;

struct LstsqSolution {
  Eigen::VectorXd x;
  int rank = 0;        // effective rank at the cutoff
  bool truncated = false;  // rank < columns: minimum-norm branch was taken
};

// Minimum-Euclidean-norm least-squares solution of A x = b. Singular values
// below rcond * sigma_max are treated as zero. A is consumed.
LstsqSolution min_norm_lstsq(Eigen::MatrixXd A, Eigen::VectorXd b,
                             double rcond = kRankCutoff);

// Same problem restricted to full-row-rank A with rows <= cols, solved through
// the Gram matrix A A^T (Cholesky). Returns false when the Cholesky breaks
// down, in which case the caller should fall back to min_norm_lstsq. The
// result is in the row space of A, so it is the minimum-norm solution whenever
// the system is consistent; callers must verify the residual themselves.
bool gram_min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         Eigen::VectorXd& x);

// Pseudo-inverse of a symmetric PSD matrix via eigendecomposition, zeroing
// eigenvalues below rcond * lambda_max. all_zero reports whether every
// eigenvalue fell below the cutoff (the matrix is numerically null).
Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& S, double rcond = kRankCutoff,
                         bool* all_zero = nullptr);

inline void symmetrize(Eigen::MatrixXd& M) {
  M = ((M + M.transpose()) * 0.5).eval();
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace qng
