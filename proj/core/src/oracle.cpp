#include "qng/oracle.hpp"

#include <cmath>

#include "qng/errors.hpp"
#include "qng/linalg.hpp"

namespace qng {

std::vector<Eigen::MatrixXd> clairvoyant_actions(
    const ScalarCoefficientTable& table, const Eigen::VectorXd& signals) {
  std::vector<Eigen::MatrixXd> actions;
  actions.reserve(table.steps.size());
  for (const auto& step : table.steps) {
    Eigen::MatrixXd a(table.n_agents, 1);
    for (int i = 0; i < table.n_agents; ++i)
      a(i, 0) = step[i].v.dot(step[i].L * signals);
    actions.push_back(std::move(a));
  }
  return actions;
}

std::vector<Eigen::MatrixXd> clairvoyant_actions(
    const VectorCoefficientTable& table, const Eigen::VectorXd& signals) {
  std::vector<Eigen::MatrixXd> actions;
  actions.reserve(table.steps.size());
  for (const auto& step : table.steps) {
    Eigen::MatrixXd a(table.n_agents, table.state_dim);
    for (int i = 0; i < table.n_agents; ++i)
      a.row(i) = (step[i].U * (step[i].L * signals)).transpose();
    actions.push_back(std::move(a));
  }
  return actions;
}

BatchPosterior batch_posterior(const Eigen::MatrixXd& L0,
                               const Eigen::MatrixXd& Q0,
                               const Eigen::MatrixXd& M_xx0,
                               const Eigen::MatrixXd& M_thth0,
                               const Eigen::MatrixXd& M_thx0,
                               const Eigen::MatrixXd& H_stacked) {
  const auto n = L0.rows();
  const auto m = Q0.rows();
  BatchPosterior post{L0, Q0, M_xx0, M_thth0, M_thx0};
  if (H_stacked.cols() == 0) return post;

  // Joint z = (theta, x): assemble the full prior covariance and the
  // observation map y = [0 H^T] z, then condition once.
  const auto q0 = m + n;
  Eigen::MatrixXd sigma(q0, q0);
  sigma.topLeftCorner(m, m) = M_thth0;
  sigma.topRightCorner(m, n) = M_thx0;
  sigma.bottomLeftCorner(n, m) = M_thx0.transpose();
  sigma.bottomRightCorner(n, n) = M_xx0;

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(q0, H_stacked.cols());
  G.bottomRows(n) = H_stacked;

  Eigen::MatrixXd S = G.transpose() * sigma * G;
  symmetrize(S);
  Eigen::MatrixXd gain = sigma * G * pinv_psd(S);

  // Weight form of the innovation: y carries H^T as weights on x while the
  // prior predicts H^T L0.
  Eigen::MatrixXd innovation_weights =
      H_stacked.transpose() - H_stacked.transpose() * L0;
  Eigen::MatrixXd W0(q0, n);
  W0.topRows(m) = Q0;
  W0.bottomRows(n) = L0;
  Eigen::MatrixXd W_post = W0 + gain * innovation_weights;

  Eigen::MatrixXd sigma_post = sigma - gain * (G.transpose() * sigma);
  symmetrize(sigma_post);

  post.Q = W_post.topRows(m);
  post.L = W_post.bottomRows(n);
  post.M_thth = sigma_post.topLeftCorner(m, m);
  post.M_thx = sigma_post.topRightCorner(m, n);
  post.M_xx = sigma_post.bottomRightCorner(n, n);
  return post;
}

double precision_weighted_mean(const Eigen::VectorXd& signals,
                               const Eigen::VectorXd& noise_var) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < signals.size(); ++i) {
    num += signals[i] / noise_var[i];
    den += 1.0 / noise_var[i];
  }
  return num / den;
}

Eigen::VectorXd precision_weighted_mean(
    const Eigen::VectorXd& signals,
    const std::vector<Eigen::MatrixXd>& noise_cov) {
  const int n = static_cast<int>(noise_cov.size());
  const int m = static_cast<int>(noise_cov.front().rows());
  Eigen::VectorXd mean(m);
  for (int kcomp = 0; kcomp < m; ++kcomp) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += signals[kcomp * n + i] / noise_cov[i](kcomp, kcomp);
      den += 1.0 / noise_cov[i](kcomp, kcomp);
    }
    mean[kcomp] = num / den;
  }
  return mean;
}

double complete_info_nash_cournot(const Eigen::VectorXd& signals,
                                  const Eigen::VectorXd& noise_var) {
  return precision_weighted_mean(signals, noise_var) /
         (static_cast<double>(signals.size()) + 1.0);
}

Eigen::VectorXd complete_info_nash_coordination(
    const Eigen::VectorXd& signals,
    const std::vector<Eigen::MatrixXd>& noise_cov) {
  return precision_weighted_mean(signals, noise_cov);
}

Eigen::VectorXd complete_info_nash(const GameSpec& spec,
                                   const Eigen::VectorXd& signals) {
  double theta_hat = precision_weighted_mean(signals, spec.noise_var);
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(spec.n_agents, spec.n_agents) - spec.beta;
  return system.partialPivLu().solve(
      Eigen::VectorXd::Constant(spec.n_agents, spec.delta * theta_hat));
}

Eigen::MatrixXd complete_info_nash(const VectorGameSpec& spec,
                                   const Eigen::VectorXd& signals) {
  const int n = spec.n_agents, m = spec.state_dim;
  Eigen::VectorXd theta_hat = precision_weighted_mean(signals, spec.noise_cov);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) system.block(i * m, j * m, m, m) = -spec.B(i, j);
  Eigen::VectorXd rhs(n * m);
  for (int i = 0; i < n; ++i)
    rhs.segment(i * m, m) = spec.state_gain * theta_hat;
  Eigen::VectorXd stacked = system.partialPivLu().solve(rhs);
  Eigen::MatrixXd actions(n, m);
  for (int i = 0; i < n; ++i)
    actions.row(i) = stacked.segment(i * m, m).transpose();
  return actions;
}

namespace {

template <typename Table>
double batch_gaps(const Table& table, double* cov_gap_out) {
  // Stacks each agent's observation rows through t-1 and conditions the t=0
  // prior once, then compares against the sequentially propagated state.
  double weight_gap = 0.0, cov_gap = 0.0;
  const int n = table.n_agents;
  for (int i = 0; i < n; ++i) {
    const auto& init = table.steps[0][i];
    Eigen::MatrixXd Q0 = [&] {
      if constexpr (requires { init.Q; })
        return Eigen::MatrixXd(init.Q);
      else
        return Eigen::MatrixXd(init.k.transpose());
    }();
    Eigen::MatrixXd M_thth0 = [&] {
      if constexpr (requires { init.Q; })
        return Eigen::MatrixXd(init.M_thth);
      else
        return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, init.M_thth));
    }();
    Eigen::Index total_cols = 0;
    for (int t = 0; t <= table.horizon; ++t) {
      if (t > 0) total_cols += table.steps[t - 1][i].H.cols();
      Eigen::MatrixXd H_stacked(init.L.rows(), total_cols);
      Eigen::Index col = 0;
      for (int u = 0; u < t; ++u) {
        const auto& Hu = table.steps[u][i].H;
        H_stacked.middleCols(col, Hu.cols()) = Hu;
        col += Hu.cols();
      }
      BatchPosterior post = batch_posterior(init.L, Q0, init.M_xx, M_thth0,
                                            init.M_thx, H_stacked);
      const auto& seq = table.steps[t][i];
      weight_gap = std::max(weight_gap,
                            (post.L - seq.L).cwiseAbs().maxCoeff());
      cov_gap =
          std::max(cov_gap, (post.M_xx - seq.M_xx).cwiseAbs().maxCoeff());
      if constexpr (requires { seq.Q; }) {
        weight_gap = std::max(weight_gap,
                              (post.Q - seq.Q).cwiseAbs().maxCoeff());
        cov_gap = std::max(cov_gap,
                           (post.M_thth - seq.M_thth).cwiseAbs().maxCoeff());
        cov_gap = std::max(cov_gap,
                           (post.M_thx - seq.M_thx).cwiseAbs().maxCoeff());
      } else {
        weight_gap = std::max(
            weight_gap,
            (post.Q.transpose() - seq.k).cwiseAbs().maxCoeff());
        cov_gap = std::max(cov_gap,
                           std::abs(post.M_thth(0, 0) - seq.M_thth));
        cov_gap = std::max(
            cov_gap, (post.M_thx - seq.M_thx).cwiseAbs().maxCoeff());
      }
    }
  }
  *cov_gap_out = cov_gap;
  return weight_gap;
}

template <typename Table>
OracleReport verify_impl(const Trajectory& traj, const Table& table,
                         const Eigen::VectorXd& signals,
                         const Eigen::VectorXd& nash_actions_flat,
                         const Eigen::VectorXd& theta_hat,
                         const NetworkGraph& g) {
  OracleReport report;
  report.diameter = g.diameter();
  report.convergence_step = traj.convergence_step;
  report.precision_weighted_theta = theta_hat;
  report.complete_info_action = nash_actions_flat;

  auto clair = clairvoyant_actions(table, signals);
  for (int t = 0; t <= traj.horizon; ++t)
    report.max_clairvoyant_action_gap =
        std::max(report.max_clairvoyant_action_gap,
                 (clair[t] - traj.actions[t]).cwiseAbs().maxCoeff());

  for (int t = 0; t <= traj.horizon; ++t) {
    for (int i = 0; i < table.n_agents; ++i) {
      const auto& st = table.steps[t][i];
      Eigen::VectorXd clair_x = st.L * signals;
      report.max_clairvoyant_mean_gap = std::max(
          report.max_clairvoyant_mean_gap,
          (clair_x - traj.mean_x[t].row(i).transpose()).cwiseAbs().maxCoeff());
      Eigen::VectorXd clair_theta = [&] {
        if constexpr (requires { st.Q; })
          return Eigen::VectorXd(st.Q * signals);
        else
          return Eigen::VectorXd(
              Eigen::VectorXd::Constant(1, st.k.dot(signals)));
      }();
      report.max_clairvoyant_mean_gap =
          std::max(report.max_clairvoyant_mean_gap,
                   (clair_theta - traj.mean_theta[t].row(i).transpose())
                       .cwiseAbs()
                       .maxCoeff());
    }
  }

  report.max_batch_weight_gap =
      batch_gaps(table, &report.max_batch_covariance_gap);

  const Eigen::MatrixXd& final_actions = traj.actions.back();
  Eigen::Map<const Eigen::MatrixXd> nash(nash_actions_flat.data(),
                                         final_actions.rows(),
                                         final_actions.cols());
  report.final_action_nash_gap = (final_actions - nash).cwiseAbs().maxCoeff();
  report.final_signal_error = traj.signal_error.back();
  return report;
}

}  // namespace

OracleReport verify(const Trajectory& traj, const ScalarCoefficientTable& table,
                    const Eigen::VectorXd& signals, const GameSpec& spec,
                    const NetworkGraph& g) {
  Eigen::VectorXd nash = complete_info_nash(spec, signals);
  Eigen::VectorXd theta_hat =
      Eigen::VectorXd::Constant(1, precision_weighted_mean(signals,
                                                           spec.noise_var));
  return verify_impl(traj, table, signals, nash, theta_hat, g);
}

OracleReport verify(const Trajectory& traj, const VectorCoefficientTable& table,
                    const Eigen::VectorXd& signals, const VectorGameSpec& spec,
                    const NetworkGraph& g) {
  Eigen::MatrixXd nash = complete_info_nash(spec, signals);
  // Column-major flattening matches the N x m row mapping in verify_impl.
  Eigen::VectorXd nash_flat =
      Eigen::Map<const Eigen::VectorXd>(nash.data(), nash.size());
  Eigen::VectorXd theta_hat = precision_weighted_mean(signals, spec.noise_cov);
  return verify_impl(traj, table, signals, nash_flat, theta_hat, g);
}

}  // namespace qng
