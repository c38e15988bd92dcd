#include "qng/filter.hpp"

#include <cmath>

#include "qng/errors.hpp"

namespace qng {

AgentBelief init_belief(int n_agents, double own_signal) {
  AgentBelief b;
  b.mean_x = Eigen::VectorXd::Constant(n_agents, own_signal);
  b.mean_theta = Eigen::VectorXd::Constant(1, own_signal);
  return b;
}

AgentBelief init_belief(int n_agents, const Eigen::VectorXd& own_signal) {
  const auto m = own_signal.size();
  AgentBelief b;
  b.mean_x.resize(n_agents * m);
  for (Eigen::Index kcomp = 0; kcomp < m; ++kcomp)
    b.mean_x.segment(kcomp * n_agents, n_agents).setConstant(own_signal[kcomp]);
  b.mean_theta = own_signal;
  return b;
}

double select_action(const AgentBelief& belief, const Eigen::VectorXd& v) {
  return v.dot(belief.mean_x);
}

Eigen::VectorXd select_action(const AgentBelief& belief,
                              const Eigen::MatrixXd& U) {
  return U * belief.mean_x;
}

BeliefUpdate update_belief(const AgentBelief& belief,
                           const Eigen::MatrixXd& K_x,
                           const Eigen::MatrixXd& K_th,
                           const Eigen::MatrixXd& H,
                           const Eigen::VectorXd& observed) {
  if (observed.size() != H.cols())
    throw DomainError("observed action vector length does not match the "
                      "observation matrix");
  BeliefUpdate out;
  out.innovation = observed - H.transpose() * belief.mean_x;
  out.belief.mean_x = belief.mean_x + K_x * out.innovation;
  out.belief.mean_theta = belief.mean_theta + K_th * out.innovation;
  return out;
}

namespace {

// Largest per-component action spread across agents.
double action_spread(const Eigen::MatrixXd& actions) {
  double spread = 0.0;
  for (Eigen::Index c = 0; c < actions.cols(); ++c)
    spread = std::max(spread,
                      actions.col(c).maxCoeff() - actions.col(c).minCoeff());
  return spread;
}

template <typename Table, typename ActionOf>
Trajectory run_rounds(const NetworkGraph& g, const Eigen::VectorXd& signals,
                      int horizon, const Table& table, int state_dim,
                      std::vector<AgentBelief> beliefs, ActionOf action_of) {
  const int n = g.size();
  const int m = state_dim;
  Trajectory traj;
  traj.n_agents = n;
  traj.state_dim = m;
  traj.horizon = horizon;
  traj.diameter = g.diameter();

  for (int t = 0; t <= horizon; ++t) {
    const auto& step = table.steps[t];
    Eigen::MatrixXd actions(n, m);
    for (int i = 0; i < n; ++i) actions.row(i) = action_of(step[i], beliefs[i]);

    Eigen::MatrixXd mean_theta(n, m);
    Eigen::MatrixXd mean_x(n, n * m);
    Eigen::VectorXd err(n);
    bool any_negative = false;
    for (int i = 0; i < n; ++i) {
      mean_theta.row(i) = beliefs[i].mean_theta.transpose();
      mean_x.row(i) = beliefs[i].mean_x.transpose();
      err[i] = (signals - beliefs[i].mean_x).squaredNorm();
      any_negative = any_negative || (beliefs[i].mean_theta.minCoeff() < 0.0);
    }
    traj.actions.push_back(actions);
    traj.mean_theta.push_back(std::move(mean_theta));
    traj.mean_x.push_back(std::move(mean_x));
    traj.signal_error.push_back(std::move(err));
    traj.singular_solve.push_back(table.singular_step[t]);
    traj.negative_theta.push_back(any_negative);
    if (!traj.convergence_step && action_spread(actions) < kConsensusTolerance)
      traj.convergence_step = t;
    if (t == horizon) break;

    // All round-t actions are fixed before anyone observes.
    for (int i = 0; i < n; ++i) {
      const auto& nbrs = g.neighbors(i);
      Eigen::VectorXd observed(static_cast<Eigen::Index>(nbrs.size()) * m);
      for (std::size_t c = 0; c < nbrs.size(); ++c)
        observed.segment(static_cast<Eigen::Index>(c) * m, m) =
            actions.row(nbrs[c]).transpose();
      beliefs[i] = update_belief(beliefs[i], step[i].K_x, step[i].K_th,
                                 step[i].H, observed)
                       .belief;
    }
  }
  return traj;
}

}  // namespace

Trajectory run_game(const GameSpec& spec, const NetworkGraph& g,
                    const Eigen::VectorXd& signals, int horizon,
                    const ScalarCoefficientTable& table) {
  if (table.horizon < horizon)
    throw DomainError("coefficient table does not cover the horizon");
  if (signals.size() != spec.n_agents)
    throw DomainError("signal vector length mismatch");
  std::vector<AgentBelief> beliefs;
  beliefs.reserve(spec.n_agents);
  for (int i = 0; i < spec.n_agents; ++i)
    beliefs.push_back(init_belief(spec.n_agents, signals[i]));
  return run_rounds(g, signals, horizon, table, 1, std::move(beliefs),
                    [](const ScalarCoefficientState& st,
                       const AgentBelief& b) -> Eigen::RowVectorXd {
                      return Eigen::RowVectorXd::Constant(
                          1, select_action(b, st.v));
                    });
}

Trajectory run_game(const VectorGameSpec& spec, const NetworkGraph& g,
                    const Eigen::VectorXd& signals, int horizon,
                    const VectorCoefficientTable& table) {
  if (table.horizon < horizon)
    throw DomainError("coefficient table does not cover the horizon");
  if (signals.size() != spec.n_agents * spec.state_dim)
    throw DomainError("signal vector length mismatch");
  std::vector<AgentBelief> beliefs;
  beliefs.reserve(spec.n_agents);
  for (int i = 0; i < spec.n_agents; ++i)
    beliefs.push_back(init_belief(
        spec.n_agents,
        agent_signal(signals, spec.n_agents, spec.state_dim, i)));
  return run_rounds(g, signals, horizon, table, spec.state_dim,
                    std::move(beliefs),
                    [](const VectorCoefficientState& st,
                       const AgentBelief& b) -> Eigen::RowVectorXd {
                      return select_action(b, st.U).transpose();
                    });
}

}  // namespace qng
