#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qng/coefficients.hpp"
#include "qng/filter.hpp"
#include "qng/game.hpp"
#include "qng/graph.hpp"

namespace qng {

// Everything an outside observer who knows the realized signals can compute.
// This layer (and draw_signals) are the only consumers of the true signals
// and theta_true.

// a_i(t) = v_i(t)^T L_i(t) x evaluated directly, no belief state.
std::vector<Eigen::MatrixXd> clairvoyant_actions(
    const ScalarCoefficientTable& table, const Eigen::VectorXd& signals);
std::vector<Eigen::MatrixXd> clairvoyant_actions(
    const VectorCoefficientTable& table, const Eigen::VectorXd& signals);

struct BatchPosterior {
  Eigen::MatrixXd L;
  Eigen::MatrixXd Q;       // 1 x N in the scalar case
  Eigen::MatrixXd M_xx;
  Eigen::MatrixXd M_thth;  // 1 x 1 in the scalar case
  Eigen::MatrixXd M_thx;
};

// One-shot Gaussian conditioning of the joint (theta, x) prior on the stacked
// observation rows: assembles the full joint covariance and applies a single
// block update. Independent of the sequential per-step path by construction.
BatchPosterior batch_posterior(const Eigen::MatrixXd& L0,
                               const Eigen::MatrixXd& Q0,
                               const Eigen::MatrixXd& M_xx0,
                               const Eigen::MatrixXd& M_thth0,
                               const Eigen::MatrixXd& M_thx0,
                               const Eigen::MatrixXd& H_stacked);

// Diffuse-prior conditional mean of theta given all signals: the
// precision-weighted signal mean (plain average under equal variances).
double precision_weighted_mean(const Eigen::VectorXd& signals,
                               const Eigen::VectorXd& noise_var);
// Per-component version over component-major stacked signals.
Eigen::VectorXd precision_weighted_mean(
    const Eigen::VectorXd& signals,
    const std::vector<Eigen::MatrixXd>& noise_cov);

// Complete-information Nash actions. Cournot: E[theta|x]/(N+1).
double complete_info_nash_cournot(const Eigen::VectorXd& signals,
                                  const Eigen::VectorXd& noise_var);
// Coordination: E[theta|x] componentwise.
Eigen::VectorXd complete_info_nash_coordination(
    const Eigen::VectorXd& signals,
    const std::vector<Eigen::MatrixXd>& noise_cov);

// General benchmark: the symmetric-information equilibrium solved from
// a_i = sum_j beta_ij a_j + delta E[theta|x] (and its block analog).
Eigen::VectorXd complete_info_nash(const GameSpec& spec,
                                   const Eigen::VectorXd& signals);
Eigen::MatrixXd complete_info_nash(const VectorGameSpec& spec,
                                   const Eigen::VectorXd& signals);

struct OracleReport {
  double max_clairvoyant_action_gap = 0.0;  // local vs v^T L x actions
  double max_clairvoyant_mean_gap = 0.0;    // local means vs L x / k^T x
  double max_batch_weight_gap = 0.0;        // sequential L, k/Q vs batch
  double max_batch_covariance_gap = 0.0;    // sequential M vs batch
  Eigen::VectorXd complete_info_action;     // per-agent Nash actions,
                                            // N x m flattened column-major
  Eigen::VectorXd precision_weighted_theta; // length m
  double final_action_nash_gap = 0.0;
  Eigen::VectorXd final_signal_error;       // per agent, |x - E[x]|^2
  std::optional<int> convergence_step;
  int diameter = 0;
};

OracleReport verify(const Trajectory& traj, const ScalarCoefficientTable& table,
                    const Eigen::VectorXd& signals, const GameSpec& spec,
                    const NetworkGraph& g);
OracleReport verify(const Trajectory& traj, const VectorCoefficientTable& table,
                    const Eigen::VectorXd& signals, const VectorGameSpec& spec,
                    const NetworkGraph& g);

}  // namespace qng
