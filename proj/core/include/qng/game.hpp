#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace qng {

// Scalar-state quadratic game:
//   u_i = -1/2 a_i^2 + sum_{j != i} beta_ij a_i a_j + delta a_i theta,
// private signals x_i = theta + eps_i with eps_i ~ N(0, c_i), independent.
//
// theta_true is simulation ground truth: only draw_signals and the oracle
// layer read it. The coefficient and filter pipelines must not depend on it.
struct GameSpec {
  int n_agents = 0;
  Eigen::MatrixXd beta;       // N x N, zero diagonal
  double delta = 0.0;
  Eigen::VectorXd noise_var;  // c, strictly positive
  double theta_true = 0.0;

  // Sufficient condition for unique linear equilibria:
  // sum_j |beta_ij| < 1 for every row.
  bool diagonally_dominant = false;

  static GameSpec create(int n_agents, Eigen::MatrixXd beta, double delta,
                         Eigen::VectorXd noise_var, double theta_true);
};

// Vector-state game over theta in R^m:
//   u_i = -1/2 sum_j a_j^T a_j + sum_{j != i} a_i^T B_ij a_j + a_i^T D theta,
// signals x_i = theta + eps_i, eps_i ~ N(0, C_i) with each C_i diagonal.
struct VectorGameSpec {
  int n_agents = 0;
  int state_dim = 0;
  std::vector<Eigen::MatrixXd> coupling;  // B_ij at [i * N + j], m x m
  Eigen::MatrixXd state_gain;             // D, m x m
  std::vector<Eigen::MatrixXd> noise_cov; // C_i, m x m diagonal positive
  Eigen::VectorXd theta_true;             // length m

  const Eigen::MatrixXd& B(int i, int j) const {
    return coupling[static_cast<std::size_t>(i) * n_agents + j];
  }

  static VectorGameSpec create(int n_agents, int state_dim,
                               std::vector<Eigen::MatrixXd> coupling,
                               Eigen::MatrixXd state_gain,
                               std::vector<Eigen::MatrixXd> noise_cov,
                               Eigen::VectorXd theta_true);
};

double utility_scalar(const GameSpec& spec, int i,
                      const Eigen::VectorXd& actions, double theta);

// actions holds one row per agent.
double utility_vector(const VectorGameSpec& spec, int i,
                      const Eigen::MatrixXd& actions,
                      const Eigen::VectorXd& theta);

// Cournot market with unit cost c and zero-production price p. Effective unit
// profit theta = p - c; the equilibrium equation gives beta_ij = -1/2,
// delta = 1/2.
GameSpec cournot_spec(double price, double unit_cost, Eigen::VectorXd noise_var,
                      int n_agents);

// Two-component coordination game weighting estimation vs alignment:
// D = (1 - lambda) I, B_ij = lambda / (N - 1) I.
VectorGameSpec coordination_spec(double lambda,
                                 std::vector<Eigen::MatrixXd> noise_cov,
                                 int n_agents, Eigen::Vector2d theta_true);

// Draws x_i = theta + eps_i per agent; deterministic in the seed.
Eigen::VectorXd draw_signals(const GameSpec& spec, std::uint64_t seed);

// Vector signals in the component-major stacking
//   x = [x_1[0..], ..., x_N[0]; x_1[1], ..., x_N[1]; ...],
// i.e. entry (k, i) lives at k * N + i. Agents are drawn in order, components
// within an agent in order.
Eigen::VectorXd draw_signals(const VectorGameSpec& spec, std::uint64_t seed);

// Agent i's own m-vector from a component-major stacked signal vector.
Eigen::VectorXd agent_signal(const Eigen::VectorXd& stacked, int n_agents,
                             int state_dim, int i);

}  // namespace qng
