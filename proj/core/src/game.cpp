#include "qng/game.hpp"

#include <cmath>
#include <string>

#include "qng/errors.hpp"
#include "qng/rng.hpp"

namespace qng {

GameSpec GameSpec::create(int n_agents, Eigen::MatrixXd beta, double delta,
                          Eigen::VectorXd noise_var, double theta_true) {
  if (n_agents < 1) throw DomainError("spec needs at least one agent");
  if (beta.rows() != n_agents || beta.cols() != n_agents)
    throw DomainError("beta must be N x N");
  if (noise_var.size() != n_agents)
    throw DomainError("noise_var must have one entry per agent");
  for (int i = 0; i < n_agents; ++i) {
    if (beta(i, i) != 0.0)
      throw DomainError("beta diagonal must be zero (agent " +
                        std::to_string(i) + ")");
    if (!(noise_var[i] > 0.0))
      throw DomainError("noise variance must be positive (agent " +
                        std::to_string(i) + ")");
  }
  GameSpec spec;
  spec.n_agents = n_agents;
  spec.beta = std::move(beta);
  spec.delta = delta;
  spec.noise_var = std::move(noise_var);
  spec.theta_true = theta_true;
  spec.diagonally_dominant =
      (spec.beta.cwiseAbs().rowwise().sum().maxCoeff() < 1.0);
  return spec;
}

VectorGameSpec VectorGameSpec::create(int n_agents, int state_dim,
                                      std::vector<Eigen::MatrixXd> coupling,
                                      Eigen::MatrixXd state_gain,
                                      std::vector<Eigen::MatrixXd> noise_cov,
                                      Eigen::VectorXd theta_true) {
  if (n_agents < 1) throw DomainError("spec needs at least one agent");
  if (state_dim < 1) throw DomainError("state dimension must be positive");
  if (coupling.size() != static_cast<std::size_t>(n_agents) * n_agents)
    throw DomainError("coupling must hold N*N blocks");
  if (state_gain.rows() != state_dim || state_gain.cols() != state_dim)
    throw DomainError("state gain D must be m x m");
  if (noise_cov.size() != static_cast<std::size_t>(n_agents))
    throw DomainError("noise_cov must hold one matrix per agent");
  if (theta_true.size() != state_dim)
    throw DomainError("theta_true must have state dimension");
  for (int i = 0; i < n_agents; ++i) {
    for (int j = 0; j < n_agents; ++j) {
      const auto& b = coupling[static_cast<std::size_t>(i) * n_agents + j];
      if (b.rows() != state_dim || b.cols() != state_dim)
        throw DomainError("coupling block must be m x m");
      if (i == j && !b.isZero(0.0))
        throw DomainError("coupling diagonal block must be zero (agent " +
                          std::to_string(i) + ")");
    }
    const auto& c = noise_cov[i];
    if (c.rows() != state_dim || c.cols() != state_dim)
      throw DomainError("noise covariance must be m x m");
    if (!c.isDiagonal(0.0))
      throw DomainError("noise covariance must be diagonal (agent " +
                        std::to_string(i) + ")");
    for (int k = 0; k < state_dim; ++k)
      if (!(c(k, k) > 0.0))
        throw DomainError("noise covariance diagonal must be positive (agent " +
                          std::to_string(i) + ")");
  }
  VectorGameSpec spec;
  spec.n_agents = n_agents;
  spec.state_dim = state_dim;
  spec.coupling = std::move(coupling);
  spec.state_gain = std::move(state_gain);
  spec.noise_cov = std::move(noise_cov);
  spec.theta_true = std::move(theta_true);
  return spec;
}

double utility_scalar(const GameSpec& spec, int i,
                      const Eigen::VectorXd& actions, double theta) {
  double u = -0.5 * actions[i] * actions[i] + spec.delta * actions[i] * theta;
  for (int j = 0; j < spec.n_agents; ++j)
    if (j != i) u += spec.beta(i, j) * actions[i] * actions[j];
  return u;
}

double utility_vector(const VectorGameSpec& spec, int i,
                      const Eigen::MatrixXd& actions,
                      const Eigen::VectorXd& theta) {
  double u = -0.5 * actions.squaredNorm();
  Eigen::VectorXd ai = actions.row(i).transpose();
  for (int j = 0; j < spec.n_agents; ++j)
    if (j != i) u += ai.dot(spec.B(i, j) * actions.row(j).transpose());
  u += ai.dot(spec.state_gain * theta);
  return u;
}

GameSpec cournot_spec(double price, double unit_cost,
                      Eigen::VectorXd noise_var, int n_agents) {
  if (!(price > unit_cost))
    throw DomainError("price must exceed unit cost");
  Eigen::MatrixXd beta =
      Eigen::MatrixXd::Constant(n_agents, n_agents, -0.5);
  beta.diagonal().setZero();
  return GameSpec::create(n_agents, std::move(beta), 0.5, std::move(noise_var),
                          price - unit_cost);
}

VectorGameSpec coordination_spec(double lambda,
                                 std::vector<Eigen::MatrixXd> noise_cov,
                                 int n_agents, Eigen::Vector2d theta_true) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("lambda must lie in (0, 1)");
  if (n_agents < 2) throw DomainError("coordination needs at least two agents");
  constexpr int m = 2;
  std::vector<Eigen::MatrixXd> coupling(
      static_cast<std::size_t>(n_agents) * n_agents,
      Eigen::MatrixXd::Zero(m, m));
  Eigen::MatrixXd off = (lambda / (n_agents - 1)) * Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < n_agents; ++i)
    for (int j = 0; j < n_agents; ++j)
      if (i != j) coupling[static_cast<std::size_t>(i) * n_agents + j] = off;
  Eigen::MatrixXd state_gain = (1.0 - lambda) * Eigen::MatrixXd::Identity(m, m);
  return VectorGameSpec::create(n_agents, m, std::move(coupling),
                                std::move(state_gain), std::move(noise_cov),
                                theta_true);
}

Eigen::VectorXd draw_signals(const GameSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(spec.n_agents);
  for (int i = 0; i < spec.n_agents; ++i)
    x[i] = spec.theta_true + std::sqrt(spec.noise_var[i]) * rng.normal();
  return x;
}

Eigen::VectorXd draw_signals(const VectorGameSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const int n = spec.n_agents, m = spec.state_dim;
  Eigen::VectorXd x(n * m);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k)
      x[k * n + i] =
          spec.theta_true[k] + std::sqrt(spec.noise_cov[i](k, k)) * rng.normal();
  return x;
}

Eigen::VectorXd agent_signal(const Eigen::VectorXd& stacked, int n_agents,
                             int state_dim, int i) {
  Eigen::VectorXd own(state_dim);
  for (int k = 0; k < state_dim; ++k) own[k] = stacked[k * n_agents + i];
  return own;
}

}  // namespace qng
