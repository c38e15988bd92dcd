#include <doctest.h>

#include <type_traits>

#include "qng/errors.hpp"
#include "qng/filter.hpp"
#include "qng/oracle.hpp"

using namespace qng;

namespace {

GameSpec cournot_like(int n, double theta = 12.0) {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(n, n, -0.5);
  beta.diagonal().setZero();
  return GameSpec::create(n, beta, 0.5, Eigen::VectorXd::Ones(n), theta);
}

}  // namespace

// The update signature admits only local data: own belief, own gains and
// observation map, observed neighbor actions. No graph, no other beliefs,
// no signal vector.
static_assert(std::is_same_v<decltype(&update_belief),
                             BeliefUpdate (*)(const AgentBelief&,
                                              const Eigen::MatrixXd&,
                                              const Eigen::MatrixXd&,
                                              const Eigen::MatrixXd&,
                                              const Eigen::VectorXd&)>);

TEST_CASE("belief initialization") {
  AgentBelief zero = init_belief(4, 0.0);
  CHECK(zero.mean_x.isZero(0.0));
  CHECK(zero.mean_theta.isZero(0.0));

  AgentBelief b = init_belief(4, 3.0);
  CHECK(b.mean_x == Eigen::VectorXd::Constant(4, 3.0));
  CHECK(b.mean_theta[0] == 3.0);

  AgentBelief v = init_belief(3, Eigen::Vector2d(10.0, 20.0));
  CHECK(v.mean_theta == Eigen::Vector2d(10.0, 20.0));
  CHECK(v.mean_x.head(3) == Eigen::VectorXd::Constant(3, 10.0));
  CHECK(v.mean_x.tail(3) == Eigen::VectorXd::Constant(3, 20.0));
}

TEST_CASE("action selection") {
  AgentBelief b = init_belief(4, 2.0);
  CHECK(select_action(b, Eigen::VectorXd(Eigen::VectorXd::Constant(4, 0.25))) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(select_action(b, Eigen::VectorXd(Eigen::VectorXd::Zero(4))) == 0.0);

  // Two-firm market at t=0: v = (1/6, 1/6) turns x_i into x_i / 3.
  AgentBelief firm = init_belief(2, 9.0);
  CHECK(select_action(firm, Eigen::VectorXd(Eigen::VectorXd::Constant(2, 1.0 / 6))) ==
        doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("belief update") {
  AgentBelief b = init_belief(3, 1.0);
  Eigen::MatrixXd h(3, 1);
  h << 1.0, 0.0, 0.0;
  Eigen::MatrixXd kx = Eigen::MatrixXd::Constant(3, 1, 0.5);
  Eigen::MatrixXd kth = Eigen::MatrixXd::Constant(1, 1, 0.25);

  // Perfect prediction: no movement.
  Eigen::VectorXd predicted = h.transpose() * b.mean_x;
  BeliefUpdate same = update_belief(b, kx, kth, h, predicted);
  CHECK(same.innovation.isZero(0.0));
  CHECK(same.belief.mean_x == b.mean_x);

  // Zero gains: no movement regardless of the innovation.
  BeliefUpdate frozen = update_belief(b, Eigen::MatrixXd::Zero(3, 1),
                                      Eigen::MatrixXd::Zero(1, 1), h,
                                      predicted.array() + 5.0);
  CHECK(frozen.belief.mean_x == b.mean_x);
  CHECK(frozen.innovation[0] == doctest::Approx(5.0));

  CHECK_THROWS_AS(update_belief(b, kx, kth, h, Eigen::VectorXd::Zero(2)),
                  DomainError);
}

TEST_CASE("one observed action reveals the neighbor signal on a pair") {
  GameSpec spec = cournot_like(2);
  NetworkGraph g = line_graph(2);
  ScalarCoefficientTable table = propagate_all(spec, g, 1);
  Eigen::VectorXd x(2);
  x << 11.0, 13.0;
  Trajectory traj = run_game(spec, g, x, 1, table);
  // After observing a_1(0), agent 0's mean of x must match the clairvoyant
  // weights L_{0,1} x.
  Eigen::VectorXd clairvoyant = table.steps[1][0].L * x;
  CHECK((traj.mean_x[1].row(0).transpose() - clairvoyant)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("run_game horizon 0 emits a single row of initial actions") {
  GameSpec spec = cournot_like(3);
  NetworkGraph g = line_graph(3);
  ScalarCoefficientTable table = propagate_all(spec, g, 0);
  Eigen::VectorXd x(3);
  x << 12.0, 11.0, 13.0;
  Trajectory traj = run_game(spec, g, x, 0, table);
  CHECK(traj.actions.size() == 1);
  CHECK(traj.horizon == 0);
}

TEST_CASE("market game reaches consensus at the diameter and stays there") {
  GameSpec spec = cournot_like(5);
  NetworkGraph g = line_graph(5);
  ScalarCoefficientTable table = propagate_all(spec, g, 10);
  Eigen::VectorXd x = draw_signals(spec, 1);
  Trajectory traj = run_game(spec, g, x, 10, table);
  REQUIRE(traj.convergence_step.has_value());
  CHECK(*traj.convergence_step == 4);
  double nash = complete_info_nash_cournot(x, spec.noise_var);
  for (int t = 4; t <= 10; ++t) {
    CHECK((traj.actions[t].array() - nash).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("pure information externalities: actions equal state estimates") {
  GameSpec spec = GameSpec::create(5, Eigen::MatrixXd::Zero(5, 5), 1.0,
                                   Eigen::VectorXd::Ones(5), 12.0);
  NetworkGraph g = line_graph(5);
  ScalarCoefficientTable table = propagate_all(spec, g, 8);
  Eigen::VectorXd x = draw_signals(spec, 3);
  Trajectory traj = run_game(spec, g, x, 8, table);
  for (int t = 0; t <= 8; ++t)
    CHECK((traj.actions[t] - traj.mean_theta[t]).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("negative state estimates are flagged, not clipped") {
  GameSpec spec = cournot_like(3, /*theta=*/0.5);
  NetworkGraph g = line_graph(3);
  ScalarCoefficientTable table = propagate_all(spec, g, 4);
  // A strongly negative signal drives one agent's estimate below zero.
  Eigen::VectorXd x(3);
  x << -4.0, 0.6, 0.7;
  Trajectory traj = run_game(spec, g, x, 4, table);
  CHECK(traj.negative_theta[0]);
  for (const auto& a : traj.actions) CHECK(a.allFinite());
}

TEST_CASE("trajectory length and flags match the horizon") {
  GameSpec spec = cournot_like(4);
  NetworkGraph g = ring_graph(4);
  ScalarCoefficientTable table = propagate_all(spec, g, 6);
  Eigen::VectorXd x = draw_signals(spec, 9);
  Trajectory traj = run_game(spec, g, x, 6, table);
  CHECK(traj.actions.size() == 7);
  CHECK(traj.singular_solve.size() == 7);
  CHECK(traj.signal_error.size() == 7);
  CHECK(traj.diameter == 2);
  CHECK_THROWS_AS(run_game(spec, g, x, 8, table), DomainError);
}
