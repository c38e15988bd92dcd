#include <lapacke.h>

#include <cmath>
#include <string>

#include "qng/coefficients.hpp"
#include "qng/errors.hpp"
#include "qng/linalg.hpp"

namespace qng {

namespace {

// vec(U_i^T) with column-major stacking; the coupled equations
//   L_i^T U_i^T = sum_j L_i^T L_j^T U_j^T B_ij^T + Q_i^T D^T
// vectorize into blocks (i,i) = I_m kron L_i^T and
// (i,j) = -B_ij kron (L_i^T L_j^T), rhs_i = vec(Q_i^T D^T).

void place_kron(Eigen::MatrixXd& A, Eigen::Index row0, Eigen::Index col0,
                const Eigen::MatrixXd& small, const Eigen::MatrixXd& big) {
  for (Eigen::Index a = 0; a < small.rows(); ++a)
    for (Eigen::Index b = 0; b < small.cols(); ++b) {
      if (small(a, b) == 0.0) continue;
      A.block(row0 + a * big.rows(), col0 + b * big.cols(), big.rows(),
              big.cols())
          .noalias() = small(a, b) * big;
    }
}

Eigen::VectorXd vec_colmajor(const Eigen::MatrixXd& M) {
  return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

std::vector<Eigen::MatrixXd> unpack_actions(const Eigen::VectorXd& w, int n,
                                            int m) {
  const int nm = n * m;
  std::vector<Eigen::MatrixXd> U;
  U.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Map<const Eigen::MatrixXd> Ut(w.data() + std::ptrdiff_t(i) * nm * m,
                                         nm, m);
    U.push_back(Ut.transpose());
  }
  return U;
}

// Residual of the coupled equations evaluated blockwise on the small
// matrices; independent of which solver produced U.
double block_residual_rel(const std::vector<VectorCoefficientState>& states,
                          const std::vector<Eigen::MatrixXd>& U,
                          const VectorGameSpec& spec) {
  const int n = spec.n_agents;
  double resid_sq = 0.0, rhs_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd rhs = states[i].Q.transpose() * spec.state_gain.transpose();
    Eigen::MatrixXd r = states[i].L.transpose() * U[i].transpose() - rhs;
    for (int j = 0; j < n; ++j) {
      if (j == i || spec.B(i, j).isZero(0.0)) continue;
      r.noalias() -= states[i].L.transpose() *
                     (states[j].L.transpose() *
                      (U[j].transpose() * spec.B(i, j).transpose()));
    }
    resid_sq += r.squaredNorm();
    rhs_sq += rhs.squaredNorm();
  }
  double rhs_norm = std::sqrt(rhs_sq);
  return rhs_norm > 0.0 ? std::sqrt(resid_sq) / rhs_norm : std::sqrt(resid_sq);
}

VectorSolveResult solve_dense(const std::vector<VectorCoefficientState>& states,
                              const VectorGameSpec& spec) {
  const int n = spec.n_agents, m = spec.state_dim;
  const int nm = n * m;
  const Eigen::Index bs = Eigen::Index(nm) * m;  // unknowns per agent
  const Eigen::Index total = bs * n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd rhs(total);
  const Eigen::MatrixXd I_m = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd Lt_i = states[i].L.transpose();
    place_kron(A, i * bs, i * bs, I_m, Lt_i);
    for (int j = 0; j < n; ++j) {
      if (j == i || spec.B(i, j).isZero(0.0)) continue;
      Eigen::MatrixXd prod = Lt_i * states[j].L.transpose();
      place_kron(A, i * bs, j * bs, -spec.B(i, j), prod);
    }
    rhs.segment(i * bs, bs) =
        vec_colmajor(states[i].Q.transpose() * spec.state_gain.transpose());
  }
  LstsqSolution sol = min_norm_lstsq(std::move(A), rhs);
  VectorSolveResult out;
  out.U = unpack_actions(sol.x, n, m);
  out.singular = sol.truncated;
  return out;
}

// Row-compress each agent's block row through the SVD of its L_i^T: with
// L_i^T = W S V^T, the rows with nonzero singular values carry the whole
// least-squares content, so the reduced system has the same solution set.
// Rows dropped at the cutoff contribute a constant residual term accounted
// for by the caller's blockwise residual check.
VectorSolveResult solve_compressed(
    const std::vector<VectorCoefficientState>& states,
    const VectorGameSpec& spec) {
  const int n = spec.n_agents, m = spec.state_dim;
  const int nm = n * m;
  const Eigen::Index bs = Eigen::Index(nm) * m;
  const Eigen::Index total = bs * n;

  std::vector<Eigen::MatrixXd> T(n);       // S_r V_r^T, r_i x nm
  std::vector<Eigen::MatrixXd> W_r(n);     // left singular vectors kept
  std::vector<Eigen::Index> rank(n);
  Eigen::Index reduced_rows = 0;
  for (int i = 0; i < n; ++i) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(
        states[i].L.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? kRankCutoff * sv[0] : 0.0;
    Eigen::Index r = 0;
    while (r < sv.size() && sv[r] > cutoff && sv[r] > 0.0) ++r;
    rank[i] = r;
    T[i] = sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    W_r[i] = svd.matrixU().leftCols(r);
    reduced_rows += m * r;
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(reduced_rows, total);
  Eigen::VectorXd rhs(reduced_rows);
  const Eigen::MatrixXd I_m = Eigen::MatrixXd::Identity(m, m);
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i) {
    place_kron(A, row, i * bs, I_m, T[i]);
    for (int j = 0; j < n; ++j) {
      if (j == i || spec.B(i, j).isZero(0.0)) continue;
      Eigen::MatrixXd prod = T[i] * states[j].L.transpose();
      place_kron(A, row, j * bs, -spec.B(i, j), prod);
    }
    rhs.segment(row, m * rank[i]) = vec_colmajor(
        W_r[i].transpose() * states[i].Q.transpose() *
        spec.state_gain.transpose());
    row += m * rank[i];
  }

  VectorSolveResult out;
  out.singular = reduced_rows < total;
  Eigen::VectorXd w;
  bool solved = false;
  if (reduced_rows < total) {
    // Solution through the Gram matrix lies in the row space, hence is the
    // minimum-norm one whenever it solves the system; the caller's residual
    // check validates it and we fall back to dgelsd when Cholesky breaks.
    solved = gram_min_norm_solve(A, rhs, w);
    if (solved) {
      double rel = (A * w - rhs).norm() / std::max(rhs.norm(), 1e-300);
      if (!(rel < 1e-10)) solved = false;
    }
  } else {
    Eigen::MatrixXd A_lu = A;
    Eigen::VectorXd sol = rhs;
    std::vector<lapack_int> piv(reduced_rows);
    lapack_int info = LAPACKE_dgesv(
        LAPACK_COL_MAJOR, static_cast<lapack_int>(reduced_rows), 1,
        A_lu.data(), static_cast<lapack_int>(reduced_rows), piv.data(),
        sol.data(), static_cast<lapack_int>(reduced_rows));
    if (info == 0) {
      w = std::move(sol);
      double rel = (A * w - rhs).norm() / std::max(rhs.norm(), 1e-300);
      solved = rel < 1e-10;
    }
  }
  if (!solved) {
    LstsqSolution sol = min_norm_lstsq(std::move(A), rhs);
    w = std::move(sol.x);
    out.singular = out.singular || sol.truncated;
  }
  out.U = unpack_actions(w, n, m);
  return out;
}

}  // namespace

std::vector<VectorCoefficientState> init_vector(const VectorGameSpec& spec) {
  const int n = spec.n_agents, m = spec.state_dim;
  const int nm = n * m;
  for (int i = 0; i < n; ++i)
    if (!spec.noise_cov[i].isDiagonal(0.0))
      throw DomainError("init_vector requires diagonal noise covariances");

  std::vector<VectorCoefficientState> states(n);
  for (int i = 0; i < n; ++i) {
    auto& st = states[i];
    st.L = Eigen::MatrixXd::Zero(nm, nm);
    st.Q = Eigen::MatrixXd::Zero(m, nm);
    st.M_xx = Eigen::MatrixXd::Zero(nm, nm);
    st.M_thth = spec.noise_cov[i];
    st.M_thx = Eigen::MatrixXd::Zero(m, nm);
    Eigen::VectorXd ebar = Eigen::VectorXd::Ones(n);
    ebar[i] = 0.0;
    for (int kcomp = 0; kcomp < m; ++kcomp) {
      st.L.block(kcomp * n, kcomp * n, n, n).col(i).setOnes();
      st.Q(kcomp, kcomp * n + i) = 1.0;
      // Per-component stack of the agents' k-th diagonal noise entries.
      Eigen::VectorXd c_k(n);
      for (int j = 0; j < n; ++j) c_k[j] = spec.noise_cov[j](kcomp, kcomp);
      Eigen::MatrixXd blk =
          ebar.asDiagonal() * Eigen::MatrixXd(c_k.asDiagonal());
      blk += spec.noise_cov[i](kcomp, kcomp) * (ebar * ebar.transpose());
      st.M_xx.block(kcomp * n, kcomp * n, n, n) = blk;
      st.M_thx.block(kcomp, kcomp * n, 1, n) =
          spec.noise_cov[i](kcomp, kcomp) * ebar.transpose();
    }
    st.innovation_scale = st.M_xx.trace();
  }
  return states;
}

VectorSolveResult solve_action_coeffs_vector(
    const std::vector<VectorCoefficientState>& states,
    const VectorGameSpec& spec, SolveMethod method) {
  const Eigen::Index total = Eigen::Index(spec.n_agents) * spec.state_dim *
                             spec.n_agents * spec.state_dim;
  if (method == SolveMethod::kAuto)
    method = total <= kDenseSolveLimit ? SolveMethod::kDense
                                       : SolveMethod::kCompressed;
  VectorSolveResult out = method == SolveMethod::kDense
                              ? solve_dense(states, spec)
                              : solve_compressed(states, spec);
  out.residual_rel = block_residual_rel(states, out.U, spec);
  if (out.residual_rel > kEquilibriumResidualGate)
    throw EquilibriumError("no linear equilibrium: relative residual " +
                               std::to_string(out.residual_rel),
                           -1);
  return out;
}

Eigen::MatrixXd build_observation_matrix_vector(
    const NetworkGraph& g, int i,
    const std::vector<VectorCoefficientState>& states, int state_dim) {
  const auto& nbrs = g.neighbors(i);
  const auto nm = states[i].L.rows();
  Eigen::MatrixXd H(nm, state_dim * static_cast<Eigen::Index>(nbrs.size()));
  for (std::size_t c = 0; c < nbrs.size(); ++c)
    H.middleCols(c * state_dim, state_dim).noalias() =
        (states[nbrs[c]].U * states[nbrs[c]].L).transpose();
  return H;
}

VectorGains lmmse_gains_vector(const VectorCoefficientState& state,
                               const Eigen::MatrixXd& H) {
  Eigen::MatrixXd S = H.transpose() * state.M_xx * H;
  symmetrize(S);
  const double zero_gate = kInnovationZeroFactor * state.innovation_scale *
                           std::max(1.0, H.squaredNorm());
  VectorGains gains;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().maxCoeff() <= zero_gate) {
    gains.K_x = Eigen::MatrixXd::Zero(state.M_xx.rows(), H.cols());
    gains.K_th = Eigen::MatrixXd::Zero(state.Q.rows(), H.cols());
    return gains;
  }
  Eigen::MatrixXd S_pinv = pinv_psd(S);
  gains.K_x.noalias() = state.M_xx * H * S_pinv;
  gains.K_th.noalias() = state.M_thx * H * S_pinv;
  return gains;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> propagate_weights_vector(
    const VectorCoefficientState& state, const VectorGains& gains,
    const Eigen::MatrixXd& H) {
  Eigen::MatrixXd innovation_map = H.transpose() - H.transpose() * state.L;
  Eigen::MatrixXd L_next = state.L + gains.K_x * innovation_map;
  Eigen::MatrixXd Q_next = state.Q + gains.K_th * innovation_map;
  return {std::move(L_next), std::move(Q_next)};
}

VectorCovariances propagate_covariances_vector(
    const VectorCoefficientState& state, const VectorGains& gains,
    const Eigen::MatrixXd& H) {
  VectorCovariances next;
  next.M_xx = state.M_xx - gains.K_x * (H.transpose() * state.M_xx);
  symmetrize(next.M_xx);
  next.M_thth =
      state.M_thth - gains.K_th * (H.transpose() * state.M_thx.transpose());
  symmetrize(next.M_thth);
  next.M_thx = state.M_thx - gains.K_th * (H.transpose() * state.M_xx);
  double lambda_min = std::min(min_eigenvalue(next.M_xx),
                               min_eigenvalue(next.M_thth));
  if (lambda_min < kPsdFailureTolerance)
    throw NumericalError("covariance lost positive semidefiniteness (min "
                         "eigenvalue " + std::to_string(lambda_min) + ")",
                         -1, -1);
  return next;
}

VectorCoefficientTable propagate_all_vector(const VectorGameSpec& spec,
                                            const NetworkGraph& g, int horizon,
                                            SolveMethod method) {
  if (g.size() != spec.n_agents)
    throw DomainError("graph and spec disagree on the number of agents");
  if (horizon < 0) throw DomainError("horizon must be nonnegative");

  VectorCoefficientTable table;
  table.n_agents = spec.n_agents;
  table.state_dim = spec.state_dim;
  table.horizon = horizon;
  std::vector<VectorCoefficientState> states = init_vector(spec);

  for (int t = 0; t <= horizon; ++t) {
    VectorSolveResult solve;
    try {
      solve = solve_action_coeffs_vector(states, spec, method);
    } catch (const EquilibriumError& e) {
      throw EquilibriumError(std::string(e.what()) + " (step " +
                                 std::to_string(t) + ")",
                             t);
    }
    for (int i = 0; i < spec.n_agents; ++i) states[i].U = solve.U[i];
    for (int i = 0; i < spec.n_agents; ++i)
      states[i].H =
          build_observation_matrix_vector(g, i, states, spec.state_dim);
    for (int i = 0; i < spec.n_agents; ++i) {
      VectorGains gains = lmmse_gains_vector(states[i], states[i].H);
      states[i].K_x = std::move(gains.K_x);
      states[i].K_th = std::move(gains.K_th);
    }
    table.steps.push_back(states);
    table.singular_step.push_back(solve.singular);
    table.solve_residual.push_back(solve.residual_rel);
    if (t == horizon) break;

    std::vector<VectorCoefficientState> next(spec.n_agents);
    for (int i = 0; i < spec.n_agents; ++i) {
      const auto& st = states[i];
      VectorGains gains{st.K_x, st.K_th};
      auto [L_next, Q_next] = propagate_weights_vector(st, gains, st.H);
      VectorCovariances cov;
      try {
        cov = propagate_covariances_vector(st, gains, st.H);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (agent " +
                                 std::to_string(i) + ", step " +
                                 std::to_string(t) + ")",
                             i, t);
      }
      next[i].L = std::move(L_next);
      next[i].Q = std::move(Q_next);
      next[i].M_xx = std::move(cov.M_xx);
      next[i].M_thth = std::move(cov.M_thth);
      next[i].M_thx = std::move(cov.M_thx);
      next[i].innovation_scale = st.innovation_scale;
    }
    states = std::move(next);
  }
  return table;
}

}  // namespace qng
