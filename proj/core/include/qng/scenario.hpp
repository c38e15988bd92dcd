#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qng/game.hpp"
#include "qng/graph.hpp"

namespace qng {

enum class ScenarioKind { kCournot, kCoordination, kCustomScalar, kCustomVector };

struct EdgeListGraph {
  int n_agents = 0;
  // As written in the file: 1-based agent labels.
  std::vector<std::pair<int, int>> edges;
};

struct GeneratedGraph {
  enum class Type { kGeometric, kErdosRenyi } type = Type::kGeometric;
  int n_agents = 0;
  double side = 0.0;    // geometric
  double radius = 0.0;  // geometric
  double p = 0.0;       // erdos_renyi
  std::uint64_t seed = 0;
};

struct CournotParams {
  double price = 0.0;
  double unit_cost = 0.0;
};

struct CoordinationParams {
  double lambda = 0.0;
  Eigen::Vector2d theta_true = Eigen::Vector2d::Zero();
};

struct CustomScalarParams {
  Eigen::MatrixXd beta;
  double delta = 0.0;
  double theta_true = 0.0;
};

struct CustomVectorParams {
  int state_dim = 0;
  std::vector<Eigen::MatrixXd> coupling;  // B_ij blocks, row-major agent pairs
  Eigen::MatrixXd state_gain;
  Eigen::VectorXd theta_true;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kCournot;
  std::variant<EdgeListGraph, GeneratedGraph> graph;
  std::variant<CournotParams, CoordinationParams, CustomScalarParams,
               CustomVectorParams>
      payoff;
  // Scalar scenarios: one variance per agent. Vector scenarios: one row per
  // agent of per-component diagonal covariance entries.
  Eigen::MatrixXd noise;
  std::optional<int> horizon;  // default: 2 * diameter + 2
  std::uint64_t signal_seed = 0;
  std::string output_dir = "out";
};

// Parses and fully validates a scenario file; throws ConfigError carrying
// every issue found (unknown keys are rejected).
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text);

bool is_vector_scenario(const ScenarioConfig& config);

// Materializes the graph section (runs generators as needed).
NetworkGraph build_graph(const ScenarioConfig& config);

// Materializes the payoff section into a validated spec.
GameSpec build_scalar_spec(const ScenarioConfig& config);
VectorGameSpec build_vector_spec(const ScenarioConfig& config);

}  // namespace qng
