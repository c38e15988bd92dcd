#include "qng/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>

namespace qng {

LstsqSolution min_norm_lstsq(Eigen::MatrixXd A, Eigen::VectorXd b,
                             double rcond) {
  const auto rows = static_cast<lapack_int>(A.rows());
  const auto cols = static_cast<lapack_int>(A.cols());
  if (b.size() != A.rows())
    throw std::invalid_argument("min_norm_lstsq: rhs length mismatch");

  Eigen::VectorXd rhs(std::max(rows, cols));
  rhs.head(rows) = b;
  Eigen::VectorXd sv(std::min(rows, cols));
  lapack_int rank = 0;
  lapack_int info = LAPACKE_dgelsd(LAPACK_COL_MAJOR, rows, cols, 1, A.data(),
                                   rows, rhs.data(), std::max(rows, cols),
                                   sv.data(), rcond, &rank);
  if (info != 0)
    throw std::runtime_error("dgelsd failed to converge (info=" +
                             std::to_string(info) + ")");
  LstsqSolution out;
  out.x = rhs.head(cols);
  out.rank = static_cast<int>(rank);
  out.truncated = rank < cols;
  return out;
}

bool gram_min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         Eigen::VectorXd& x) {
  // G = A A^T, y = G^{-1} b, x = A^T y.
  const auto rows = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(rows, rows);
  G.selfadjointView<Eigen::Lower>().rankUpdate(A);
  lapack_int info =
      LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', rows, G.data(), rows);
  if (info != 0) return false;
  Eigen::VectorXd y = b;
  info = LAPACKE_dpotrs(LAPACK_COL_MAJOR, 'L', rows, 1, G.data(), rows,
                        y.data(), rows);
  if (info != 0) return false;
  x.noalias() = A.transpose() * y;
  return true;
}

Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& S, double rcond,
                         bool* all_zero) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const Eigen::VectorXd& w = eig.eigenvalues();
  double wmax = w.size() ? std::max(w.maxCoeff(), 0.0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(w.size());
  bool any = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] > rcond * wmax && w[i] > 0.0) {
      inv[i] = 1.0 / w[i];
      any = true;
    }
  }
  if (all_zero) *all_zero = !any;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace qng
