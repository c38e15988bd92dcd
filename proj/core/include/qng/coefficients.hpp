#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "qng/game.hpp"
#include "qng/graph.hpp"

namespace qng {

// Relative residual above which the equilibrium system is declared unsolvable.
inline constexpr double kEquilibriumResidualGate = 1e-6;

// Innovation covariances whose largest eigenvalue falls below
// kInnovationZeroFactor * trace(M_xx(0)) * max(1, |H|_F^2) are treated as
// exactly zero and produce zero gains. Post-convergence observation rounds
// would otherwise amplify rounding noise through near-null pseudo-inverses.
inline constexpr double kInnovationZeroFactor = 1e-12;

// Eigenvalue floor below which covariance propagation is declared failed.
inline constexpr double kPsdFailureTolerance = -1e-6;

// -------------------------------------------------------------------------
// Scalar-state pipeline.
//
// One state per agent per step. Estimates relate to the (unobserved) stacked
// signals x through E_i[x] = L x and E_i[theta] = k^T x; v maps the agent's
// own mean estimate to its action; H maps true signals to the neighbor
// actions observed this step.
// -------------------------------------------------------------------------
struct ScalarCoefficientState {
  Eigen::MatrixXd L;         // N x N
  Eigen::VectorXd k;         // N
  Eigen::MatrixXd M_xx;      // N x N, symmetric PSD
  double M_thth = 0.0;
  Eigen::RowVectorXd M_thx;  // 1 x N
  Eigen::VectorXd v;         // N, filled by the equilibrium solve
  Eigen::MatrixXd H;         // N x d(i)
  Eigen::MatrixXd K_x;       // N x d(i)
  Eigen::RowVectorXd K_th;   // 1 x d(i)
  double innovation_scale = 0.0;  // trace of M_xx at t = 0, zero-gain anchor
};

struct ScalarSolveResult {
  std::vector<Eigen::VectorXd> v;  // per agent
  bool singular = false;           // minimum-norm branch was taken
  double residual_rel = 0.0;       // |L_t v - delta k_t| / |delta k_t|
};

struct ScalarCoefficientTable {
  int n_agents = 0;
  int horizon = 0;
  // steps[t][i] for t = 0..horizon; v/H/K fields are valid at every step.
  std::vector<std::vector<ScalarCoefficientState>> steps;
  std::vector<bool> singular_step;
  std::vector<double> solve_residual;
};

std::vector<ScalarCoefficientState> init_scalar(const GameSpec& spec);

// Block system of the per-agent equilibrium equations: diagonal blocks
// L_i^T, off-diagonal blocks -beta_ij L_i^T L_j^T; rhs stacks the k_i.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_system(
    const std::vector<ScalarCoefficientState>& states, const GameSpec& spec);

// Unique solution when the system is nonsingular at the rank cutoff,
// minimum-norm least-squares otherwise. Throws EquilibriumError when the
// residual exceeds the gate.
ScalarSolveResult solve_action_coeffs(Eigen::MatrixXd system_matrix,
                                      const Eigen::VectorXd& k_stack,
                                      double delta);

// H for agent i: column per neighbor j (ascending), equal to L_j^T v_j.
Eigen::MatrixXd build_observation_matrix(
    const NetworkGraph& g, int i,
    const std::vector<ScalarCoefficientState>& states);

struct ScalarGains {
  Eigen::MatrixXd K_x;
  Eigen::RowVectorXd K_th;
};

ScalarGains lmmse_gains(const ScalarCoefficientState& state,
                        const Eigen::MatrixXd& H);

std::pair<Eigen::MatrixXd, Eigen::VectorXd> propagate_weights(
    const ScalarCoefficientState& state, const ScalarGains& gains,
    const Eigen::MatrixXd& H);

struct ScalarCovariances {
  Eigen::MatrixXd M_xx;
  double M_thth;
  Eigen::RowVectorXd M_thx;
};

// Throws NumericalError when the updated M_xx has an eigenvalue below
// kPsdFailureTolerance.
ScalarCovariances propagate_covariances(const ScalarCoefficientState& state,
                                        const ScalarGains& gains,
                                        const Eigen::MatrixXd& H);

// Full offline recursion: initializers, then per step equilibrium solve,
// observation matrices, gains, weight and covariance propagation. Signal
// realizations never enter; the table is a pure function of (spec, graph, T).
ScalarCoefficientTable propagate_all(const GameSpec& spec,
                                     const NetworkGraph& g, int horizon);

// -------------------------------------------------------------------------
// Vector-state pipeline over the component-major stacking (entry k*N + i is
// component k of agent i's signal). Estimates: E_i[x] = L x (Nm x Nm),
// E_i[theta] = Q x (m x Nm); actions a_i = U_i E_i[x].
// -------------------------------------------------------------------------
struct VectorCoefficientState {
  Eigen::MatrixXd L;       // Nm x Nm
  Eigen::MatrixXd Q;       // m x Nm
  Eigen::MatrixXd M_xx;    // Nm x Nm
  Eigen::MatrixXd M_thth;  // m x m
  Eigen::MatrixXd M_thx;   // m x Nm
  Eigen::MatrixXd U;       // m x Nm
  Eigen::MatrixXd H;       // Nm x (m d(i))
  Eigen::MatrixXd K_x;     // Nm x (m d(i))
  Eigen::MatrixXd K_th;    // m x (m d(i))
  double innovation_scale = 0.0;
};

struct VectorSolveResult {
  std::vector<Eigen::MatrixXd> U;  // per agent, m x Nm
  bool singular = false;
  double residual_rel = 0.0;
};

struct VectorCoefficientTable {
  int n_agents = 0;
  int state_dim = 0;
  int horizon = 0;
  std::vector<std::vector<VectorCoefficientState>> steps;
  std::vector<bool> singular_step;
  std::vector<double> solve_residual;
};

enum class SolveMethod {
  kAuto,        // dense below kDenseSolveLimit unknowns, compressed above
  kDense,       // assemble the full coupled system, one dgelsd call
  kCompressed,  // row-compress each agent block through its L_i^T SVD first
};

inline constexpr int kDenseSolveLimit = 3600;

std::vector<VectorCoefficientState> init_vector(const VectorGameSpec& spec);

VectorSolveResult solve_action_coeffs_vector(
    const std::vector<VectorCoefficientState>& states,
    const VectorGameSpec& spec, SolveMethod method = SolveMethod::kAuto);

Eigen::MatrixXd build_observation_matrix_vector(
    const NetworkGraph& g, int i,
    const std::vector<VectorCoefficientState>& states, int state_dim);

struct VectorGains {
  Eigen::MatrixXd K_x;
  Eigen::MatrixXd K_th;
};

VectorGains lmmse_gains_vector(const VectorCoefficientState& state,
                               const Eigen::MatrixXd& H);

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> propagate_weights_vector(
    const VectorCoefficientState& state, const VectorGains& gains,
    const Eigen::MatrixXd& H);

struct VectorCovariances {
  Eigen::MatrixXd M_xx;
  Eigen::MatrixXd M_thth;
  Eigen::MatrixXd M_thx;
};

VectorCovariances propagate_covariances_vector(
    const VectorCoefficientState& state, const VectorGains& gains,
    const Eigen::MatrixXd& H);

VectorCoefficientTable propagate_all_vector(
    const VectorGameSpec& spec, const NetworkGraph& g, int horizon,
    SolveMethod method = SolveMethod::kAuto);

// Text dump of every per-agent, per-step record for offline inspection.
void write_diagnostic_dump(const ScalarCoefficientTable& table,
                           std::ostream& out);
void write_diagnostic_dump(const VectorCoefficientTable& table,
                           std::ostream& out);

}  // namespace qng
