#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qng/coefficients.hpp"
#include "qng/game.hpp"
#include "qng/graph.hpp"

namespace qng {

// Actions within this spread count as agreeing for convergence detection.
inline constexpr double kConsensusTolerance = 1e-6;

// Runtime mean estimates held by one agent. Scalar case: mean_theta has one
// entry. mean_x is over the full stacked signal vector; only the agent's own
// signal is ever observed directly.
struct AgentBelief {
  Eigen::VectorXd mean_x;
  Eigen::VectorXd mean_theta;
};

// Scalar game: mean_x = x_i * ones(N), mean_theta = x_i.
AgentBelief init_belief(int n_agents, double own_signal);
// Vector game: component-major stacking, every agent's component k estimated
// by the own signal's component k.
AgentBelief init_belief(int n_agents, const Eigen::VectorXd& own_signal);

double select_action(const AgentBelief& belief, const Eigen::VectorXd& v);
Eigen::VectorXd select_action(const AgentBelief& belief,
                              const Eigen::MatrixXd& U);

struct BeliefUpdate {
  AgentBelief belief;
  Eigen::VectorXd innovation;  // observed minus predicted neighbor actions
};

// One observation round for one agent. Deliberately admits only local data:
// the agent's own belief, its gains and observation map for this step, and
// the actions its neighbors just played (ascending neighbor id, one entry
// per neighbor per state component).
BeliefUpdate update_belief(const AgentBelief& belief,
                           const Eigen::MatrixXd& K_x,
                           const Eigen::MatrixXd& K_th,
                           const Eigen::MatrixXd& H,
                           const Eigen::VectorXd& observed);

// Per-run record: one row per step t = 0..horizon.
struct Trajectory {
  int n_agents = 0;
  int state_dim = 1;
  int horizon = 0;
  int diameter = 0;
  std::vector<Eigen::MatrixXd> actions;      // per t: N x m
  std::vector<Eigen::MatrixXd> mean_theta;   // per t: N x m
  std::vector<Eigen::MatrixXd> mean_x;       // per t: N x (N*m), row per agent;
                                             // kept for the oracle layer
  std::vector<Eigen::VectorXd> signal_error; // per t: |x - E_i[x]|^2 per agent
  std::vector<bool> singular_solve;          // copied from the table
  std::vector<bool> negative_theta;          // some E_i[theta] component < 0
  std::optional<int> convergence_step;       // first t with action spread
                                             // below kConsensusTolerance
};

// Synchronous rounds: all agents act on current beliefs, then all observe
// neighbors' actions, then all update. Only agent i's own signal x_i seeds
// its belief; the stacked x is used solely to log estimation errors.
Trajectory run_game(const GameSpec& spec, const NetworkGraph& g,
                    const Eigen::VectorXd& signals, int horizon,
                    const ScalarCoefficientTable& table);

Trajectory run_game(const VectorGameSpec& spec, const NetworkGraph& g,
                    const Eigen::VectorXd& signals, int horizon,
                    const VectorCoefficientTable& table);

}  // namespace qng
