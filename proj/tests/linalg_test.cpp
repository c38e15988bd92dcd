#include <doctest.h>

#include "qng/linalg.hpp"
#include "qng/rng.hpp"

using namespace qng;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("min_norm_lstsq on nonsingular systems matches direct solve") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + trial % 5;
    Eigen::MatrixXd a =
        random_matrix(rng, n, n) + 5.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = random_matrix(rng, n, 1);
    LstsqSolution sol = min_norm_lstsq(a, b);
    CHECK_FALSE(sol.truncated);
    CHECK(sol.rank == n);
    Eigen::VectorXd direct = a.partialPivLu().solve(b);
    CHECK((sol.x - direct).norm() < 1e-10 * direct.norm());
  }
}

TEST_CASE("min_norm_lstsq picks the minimum-norm solution") {
  // x + y = 1 with a free direction: min-norm solution is (1/2, 1/2).
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 1.0, 0.0, 0.0;
  Eigen::VectorXd b(2);
  b << 1.0, 0.0;
  LstsqSolution sol = min_norm_lstsq(a, b);
  CHECK(sol.truncated);
  CHECK(sol.rank == 1);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("min_norm_lstsq least-squares residual on inconsistent systems") {
  // Rows demand y = 0 and y = 1; best compromise is y = 1/2.
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  Eigen::VectorXd b(2);
  b << 0.0, 1.0;
  LstsqSolution sol = min_norm_lstsq(a, b);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gram solve agrees with dgelsd on consistent underdetermined "
          "systems") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    int rows = 3 + trial % 4, cols = rows + 2 + trial % 3;
    Eigen::MatrixXd a = random_matrix(rng, rows, cols);
    Eigen::VectorXd b = random_matrix(rng, rows, 1);
    Eigen::VectorXd via_gram;
    REQUIRE(gram_min_norm_solve(a, b, via_gram));
    LstsqSolution reference = min_norm_lstsq(a, b);
    CHECK((via_gram - reference.x).norm() < 1e-9 * (1.0 + reference.x.norm()));
  }
}

TEST_CASE("gram solve reports failure on rank-deficient rows") {
  Eigen::MatrixXd a(2, 3);
  a << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0;  // second row is a multiple
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  Eigen::VectorXd x;
  CHECK_FALSE(gram_min_norm_solve(a, b, x));
}

TEST_CASE("pinv_psd basics") {
  Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(4, 4);
  CHECK(pinv_psd(identity).isApprox(identity, 1e-14));

  bool all_zero = false;
  Eigen::MatrixXd zero = pinv_psd(Eigen::MatrixXd::Zero(3, 3), kRankCutoff,
                                  &all_zero);
  CHECK(all_zero);
  CHECK(zero.isZero(0.0));

  // Penrose conditions on a random PSD matrix.
  Rng rng(3);
  Eigen::MatrixXd g = random_matrix(rng, 5, 3);
  Eigen::MatrixXd s = g * g.transpose();  // rank 3 of 5
  Eigen::MatrixXd sp = pinv_psd(s);
  CHECK((s * sp * s - s).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((sp * s * sp - sp).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((s * sp - (s * sp).transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("symmetrize and min_eigenvalue") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.5, 0.1, 1.0;
  symmetrize(m);
  CHECK(m(0, 1) == doctest::Approx(0.3));
  CHECK(m(1, 0) == doctest::Approx(0.3));
  CHECK(min_eigenvalue(m) == doctest::Approx(0.7));
}
