#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qng/coefficients.hpp"
#include "qng/filter.hpp"
#include "qng/oracle.hpp"
#include "qng/scenario.hpp"

namespace qng {

struct RunArtifacts {
  NetworkGraph graph;
  int horizon = 0;
  Eigen::VectorXd signals;
  Trajectory trajectory;
  OracleReport report;
  std::optional<GameSpec> scalar_spec;
  std::optional<VectorGameSpec> vector_spec;
  std::optional<ScalarCoefficientTable> scalar_table;
  std::optional<VectorCoefficientTable> vector_table;
};

// Full pipeline for one scenario: graph, coefficient table, signals, game,
// oracle verification. Horizon defaults to 2 * diameter + 2.
RunArtifacts run_scenario(const ScenarioConfig& config);

// Writes actions.csv, errors.csv and summary.json. Output is byte-identical
// for identical (config, seed). Agent labels in the files are 1-based.
void write_run_outputs(const ScenarioConfig& config, const RunArtifacts& run,
                       const std::filesystem::path& dir);

// Rendered summary.json content (also what sweep aggregates).
std::string summary_json(const ScenarioConfig& config, const RunArtifacts& run);

struct SweepEntry {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;    // set when !ok
  std::string summary;  // rendered summary.json content when ok
  std::optional<int> convergence_step;
  double max_clairvoyant_action_gap = 0.0;
  double max_batch_weight_gap = 0.0;
  double max_batch_covariance_gap = 0.0;
  double final_action_nash_gap = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  int failures = 0;
};

// Runs the scenario once per signal seed. The coefficient table is shared
// across seeds (it does not depend on signals). Per-seed failures are
// recorded and do not abort the sweep.
SweepResult sweep_scenario(const ScenarioConfig& config,
                           const std::vector<std::uint64_t>& seeds);

// Per-seed outputs under <dir>/seed_<s>/ plus an aggregate sweep.json.
void write_sweep_outputs(const ScenarioConfig& config, const SweepResult& sweep,
                         const std::filesystem::path& dir);

}  // namespace qng
