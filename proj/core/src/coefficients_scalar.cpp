#include <cmath>
#include <ostream>
#include <string>

#include "qng/coefficients.hpp"
#include "qng/errors.hpp"
#include "qng/linalg.hpp"

namespace qng {

std::vector<ScalarCoefficientState> init_scalar(const GameSpec& spec) {
  const int n = spec.n_agents;
  std::vector<ScalarCoefficientState> states(n);
  for (int i = 0; i < n; ++i) {
    auto& st = states[i];
    // At t = 0 the only information is the own signal: every component of x
    // and theta itself are estimated by x_i.
    st.L = Eigen::MatrixXd::Zero(n, n);
    st.L.col(i).setOnes();
    st.k = Eigen::VectorXd::Unit(n, i);
    Eigen::VectorXd ebar = Eigen::VectorXd::Ones(n);
    ebar[i] = 0.0;
    st.M_xx = ebar.asDiagonal() * Eigen::MatrixXd(spec.noise_var.asDiagonal());
    st.M_xx += spec.noise_var[i] * (ebar * ebar.transpose());
    st.M_thth = spec.noise_var[i];
    st.M_thx = spec.noise_var[i] * ebar.transpose();
    st.innovation_scale = st.M_xx.trace();
  }
  return states;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_system(
    const std::vector<ScalarCoefficientState>& states, const GameSpec& spec) {
  const int n = spec.n_agents;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
  Eigen::VectorXd k_stack(n * n);
  for (int i = 0; i < n; ++i) {
    A.block(i * n, i * n, n, n) = states[i].L.transpose();
    for (int j = 0; j < n; ++j) {
      if (j == i || spec.beta(i, j) == 0.0) continue;
      A.block(i * n, j * n, n, n).noalias() =
          -spec.beta(i, j) * (states[i].L.transpose() * states[j].L.transpose());
    }
    k_stack.segment(i * n, n) = states[i].k;
  }
  return {std::move(A), std::move(k_stack)};
}

ScalarSolveResult solve_action_coeffs(Eigen::MatrixXd system_matrix,
                                      const Eigen::VectorXd& k_stack,
                                      double delta) {
  const auto n_sq = system_matrix.rows();
  const int n = static_cast<int>(std::lround(std::sqrt(double(n_sq))));
  Eigen::VectorXd rhs = delta * k_stack;
  const double rhs_norm = rhs.norm();
  Eigen::MatrixXd system_copy = system_matrix;  // dgelsd destroys its input
  LstsqSolution sol = min_norm_lstsq(std::move(system_matrix), rhs);

  ScalarSolveResult out;
  double resid = (system_copy * sol.x - rhs).norm();
  out.residual_rel = rhs_norm > 0.0 ? resid / rhs_norm : resid;
  if (resid > kEquilibriumResidualGate * rhs_norm)
    throw EquilibriumError(
        "no linear equilibrium: relative residual " +
            std::to_string(out.residual_rel),
        -1);
  out.singular = sol.truncated;
  out.v.reserve(n);
  for (int i = 0; i < n; ++i) out.v.push_back(sol.x.segment(i * n, n));
  return out;
}

Eigen::MatrixXd build_observation_matrix(
    const NetworkGraph& g, int i,
    const std::vector<ScalarCoefficientState>& states) {
  const auto& nbrs = g.neighbors(i);
  const auto n = states[i].L.rows();
  Eigen::MatrixXd H(n, nbrs.size());
  for (std::size_t c = 0; c < nbrs.size(); ++c)
    H.col(c).noalias() = states[nbrs[c]].L.transpose() * states[nbrs[c]].v;
  return H;
}

ScalarGains lmmse_gains(const ScalarCoefficientState& state,
                        const Eigen::MatrixXd& H) {
  const auto d = H.cols();
  Eigen::MatrixXd S = H.transpose() * state.M_xx * H;
  symmetrize(S);
  const double zero_gate = kInnovationZeroFactor * state.innovation_scale *
                           std::max(1.0, H.squaredNorm());
  ScalarGains gains;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().maxCoeff() <= zero_gate) {
    gains.K_x = Eigen::MatrixXd::Zero(state.M_xx.rows(), d);
    gains.K_th = Eigen::RowVectorXd::Zero(d);
    return gains;
  }
  Eigen::MatrixXd S_pinv = pinv_psd(S);
  gains.K_x.noalias() = state.M_xx * H * S_pinv;
  gains.K_th.noalias() = state.M_thx * H * S_pinv;
  return gains;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> propagate_weights(
    const ScalarCoefficientState& state, const ScalarGains& gains,
    const Eigen::MatrixXd& H) {
  Eigen::MatrixXd innovation_map = H.transpose() - H.transpose() * state.L;
  Eigen::MatrixXd L_next = state.L + gains.K_x * innovation_map;
  Eigen::VectorXd k_next =
      state.k + innovation_map.transpose() * gains.K_th.transpose();
  return {std::move(L_next), std::move(k_next)};
}

ScalarCovariances propagate_covariances(const ScalarCoefficientState& state,
                                        const ScalarGains& gains,
                                        const Eigen::MatrixXd& H) {
  ScalarCovariances next;
  next.M_xx = state.M_xx - gains.K_x * (H.transpose() * state.M_xx);
  symmetrize(next.M_xx);
  next.M_thth =
      state.M_thth - gains.K_th * (H.transpose() * state.M_thx.transpose());
  next.M_thx = state.M_thx - gains.K_th * (H.transpose() * state.M_xx);
  double lambda_min = min_eigenvalue(next.M_xx);
  if (lambda_min < kPsdFailureTolerance || next.M_thth < kPsdFailureTolerance)
    throw NumericalError("covariance lost positive semidefiniteness (min "
                         "eigenvalue " + std::to_string(lambda_min) + ")",
                         -1, -1);
  return next;
}

ScalarCoefficientTable propagate_all(const GameSpec& spec,
                                     const NetworkGraph& g, int horizon) {
  if (g.size() != spec.n_agents)
    throw DomainError("graph and spec disagree on the number of agents");
  if (horizon < 0) throw DomainError("horizon must be nonnegative");

  ScalarCoefficientTable table;
  table.n_agents = spec.n_agents;
  table.horizon = horizon;
  std::vector<ScalarCoefficientState> states = init_scalar(spec);

  for (int t = 0; t <= horizon; ++t) {
    auto [system, k_stack] = assemble_system(states, spec);
    ScalarSolveResult solve;
    try {
      solve = solve_action_coeffs(std::move(system), k_stack, spec.delta);
    } catch (const EquilibriumError& e) {
      throw EquilibriumError(std::string(e.what()) + " (step " +
                                 std::to_string(t) + ")",
                             t);
    }
    for (int i = 0; i < spec.n_agents; ++i) states[i].v = solve.v[i];
    for (int i = 0; i < spec.n_agents; ++i)
      states[i].H = build_observation_matrix(g, i, states);
    for (int i = 0; i < spec.n_agents; ++i) {
      ScalarGains gains = lmmse_gains(states[i], states[i].H);
      states[i].K_x = std::move(gains.K_x);
      states[i].K_th = std::move(gains.K_th);
    }
    table.steps.push_back(states);
    table.singular_step.push_back(solve.singular);
    table.solve_residual.push_back(solve.residual_rel);
    if (t == horizon) break;

    std::vector<ScalarCoefficientState> next(spec.n_agents);
    for (int i = 0; i < spec.n_agents; ++i) {
      const auto& st = states[i];
      ScalarGains gains{st.K_x, st.K_th};
      auto [L_next, k_next] = propagate_weights(st, gains, st.H);
      ScalarCovariances cov;
      try {
        cov = propagate_covariances(st, gains, st.H);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (agent " +
                                 std::to_string(i) + ", step " +
                                 std::to_string(t) + ")",
                             i, t);
      }
      next[i].L = std::move(L_next);
      next[i].k = std::move(k_next);
      next[i].M_xx = std::move(cov.M_xx);
      next[i].M_thth = cov.M_thth;
      next[i].M_thx = std::move(cov.M_thx);
      next[i].innovation_scale = st.innovation_scale;
    }
    states = std::move(next);
  }
  return table;
}

namespace {

void dump_matrix(std::ostream& out, const char* name,
                 const Eigen::MatrixXd& mat) {
  out << name << " " << mat.rows() << " " << mat.cols() << "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", mat(r, c));
      out << buf << (c + 1 < mat.cols() ? " " : "");
    }
    out << "\n";
  }
}

}  // namespace

void write_diagnostic_dump(const ScalarCoefficientTable& table,
                           std::ostream& out) {
  out << "qng-coefficient-table scalar agents " << table.n_agents
      << " horizon " << table.horizon << "\n";
  for (int t = 0; t <= table.horizon; ++t) {
    for (int i = 0; i < table.n_agents; ++i) {
      const auto& st = table.steps[t][i];
      out << "record t " << t << " agent " << i << " singular "
          << table.singular_step[t] << "\n";
      dump_matrix(out, "L", st.L);
      dump_matrix(out, "k", st.k);
      dump_matrix(out, "M_xx", st.M_xx);
      dump_matrix(out, "M_thth", Eigen::MatrixXd::Constant(1, 1, st.M_thth));
      dump_matrix(out, "M_thx", st.M_thx);
      dump_matrix(out, "v", st.v);
      dump_matrix(out, "H", st.H);
      dump_matrix(out, "K_x", st.K_x);
      dump_matrix(out, "K_th", st.K_th);
    }
  }
}

void write_diagnostic_dump(const VectorCoefficientTable& table,
                           std::ostream& out) {
  out << "qng-coefficient-table vector agents " << table.n_agents
      << " state_dim " << table.state_dim << " horizon " << table.horizon
      << "\n";
  for (int t = 0; t <= table.horizon; ++t) {
    for (int i = 0; i < table.n_agents; ++i) {
      const auto& st = table.steps[t][i];
      out << "record t " << t << " agent " << i << " singular "
          << table.singular_step[t] << "\n";
      dump_matrix(out, "L", st.L);
      dump_matrix(out, "Q", st.Q);
      dump_matrix(out, "M_xx", st.M_xx);
      dump_matrix(out, "M_thth", st.M_thth);
      dump_matrix(out, "M_thx", st.M_thx);
      dump_matrix(out, "U", st.U);
      dump_matrix(out, "H", st.H);
      dump_matrix(out, "K_x", st.K_x);
      dump_matrix(out, "K_th", st.K_th);
    }
  }
}

}  // namespace qng
