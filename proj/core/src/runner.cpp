#include "qng/runner.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "qng/errors.hpp"

namespace qng {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kCournot: return "cournot";
    case ScenarioKind::kCoordination: return "coordination";
    case ScenarioKind::kCustomScalar: return "custom-scalar";
    case ScenarioKind::kCustomVector: return "custom-vector";
  }
  return "?";
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

std::vector<int> flag_steps(const std::vector<bool>& flags) {
  std::vector<int> steps;
  for (std::size_t t = 0; t < flags.size(); ++t)
    if (flags[t]) steps.push_back(static_cast<int>(t));
  return steps;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << text;
}

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& config) {
  NetworkGraph graph = build_graph(config);
  const int horizon =
      config.horizon ? *config.horizon : 2 * graph.diameter() + 2;

  if (is_vector_scenario(config)) {
    VectorGameSpec spec = build_vector_spec(config);
    VectorCoefficientTable table = propagate_all_vector(spec, graph, horizon);
    Eigen::VectorXd signals = draw_signals(spec, config.signal_seed);
    Trajectory traj = run_game(spec, graph, signals, horizon, table);
    OracleReport report = verify(traj, table, signals, spec, graph);
    RunArtifacts run{std::move(graph), horizon,         std::move(signals),
                     std::move(traj),  std::move(report), std::nullopt,
                     std::move(spec),  std::nullopt,      std::move(table)};
    return run;
  }
  GameSpec spec = build_scalar_spec(config);
  ScalarCoefficientTable table = propagate_all(spec, graph, horizon);
  Eigen::VectorXd signals = draw_signals(spec, config.signal_seed);
  Trajectory traj = run_game(spec, graph, signals, horizon, table);
  OracleReport report = verify(traj, table, signals, spec, graph);
  RunArtifacts run{std::move(graph), horizon,           std::move(signals),
                   std::move(traj),  std::move(report), std::move(spec),
                   std::nullopt,     std::move(table),  std::nullopt};
  return run;
}

std::string summary_json(const ScenarioConfig& config, const RunArtifacts& run) {
  const Trajectory& traj = run.trajectory;
  const OracleReport& rep = run.report;
  json j;
  j["scenario"] = kind_name(config.kind);
  j["n_agents"] = traj.n_agents;
  j["state_dim"] = traj.state_dim;
  j["diameter"] = traj.diameter;
  j["horizon"] = traj.horizon;
  j["signal_seed"] = config.signal_seed;
  if (traj.convergence_step)
    j["convergence_step"] = *traj.convergence_step;
  else
    j["convergence_step"] = nullptr;
  if (run.scalar_spec)
    j["diagonally_dominant"] = run.scalar_spec->diagonally_dominant;
  j["flags"]["singular_solve_steps"] = flag_steps(traj.singular_solve);
  j["flags"]["negative_theta_steps"] = flag_steps(traj.negative_theta);

  json oracle;
  oracle["max_clairvoyant_action_gap"] = rep.max_clairvoyant_action_gap;
  oracle["max_clairvoyant_mean_gap"] = rep.max_clairvoyant_mean_gap;
  oracle["max_batch_weight_gap"] = rep.max_batch_weight_gap;
  oracle["max_batch_covariance_gap"] = rep.max_batch_covariance_gap;
  oracle["final_action_nash_gap"] = rep.final_action_nash_gap;
  oracle["complete_info_nash_action"] = vector_to_json(rep.complete_info_action);
  oracle["precision_weighted_mean"] =
      vector_to_json(rep.precision_weighted_theta);
  oracle["final_signal_sq_error"] = vector_to_json(rep.final_signal_error);
  if (rep.convergence_step)
    oracle["convergence_step"] = *rep.convergence_step;
  else
    oracle["convergence_step"] = nullptr;
  oracle["diameter"] = rep.diameter;
  j["oracle"] = std::move(oracle);
  return j.dump(2) + "\n";
}

void write_run_outputs(const ScenarioConfig& config, const RunArtifacts& run,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Trajectory& traj = run.trajectory;

  std::string actions = "t,agent,component,value\n";
  for (int t = 0; t <= traj.horizon; ++t)
    for (int i = 0; i < traj.n_agents; ++i)
      for (int c = 0; c < traj.state_dim; ++c)
        actions += std::to_string(t) + "," + std::to_string(i + 1) + "," +
                   std::to_string(c + 1) + "," +
                   format_double(traj.actions[t](i, c)) + "\n";
  write_file(dir / "actions.csv", actions);

  std::string errors = "t,agent,sq_error\n";
  for (int t = 0; t <= traj.horizon; ++t)
    for (int i = 0; i < traj.n_agents; ++i)
      errors += std::to_string(t) + "," + std::to_string(i + 1) + "," +
                format_double(traj.signal_error[t][i]) + "\n";
  write_file(dir / "errors.csv", errors);

  write_file(dir / "summary.json", summary_json(config, run));
}

SweepResult sweep_scenario(const ScenarioConfig& config,
                           const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw DomainError("sweep needs at least one seed");
  SweepResult result;
  for (std::uint64_t seed : seeds) {
    ScenarioConfig per_seed = config;
    per_seed.signal_seed = seed;
    SweepEntry entry;
    entry.seed = seed;
    try {
      RunArtifacts run = run_scenario(per_seed);
      entry.ok = true;
      entry.summary = summary_json(per_seed, run);
      entry.convergence_step = run.trajectory.convergence_step;
      entry.max_clairvoyant_action_gap = run.report.max_clairvoyant_action_gap;
      entry.max_batch_weight_gap = run.report.max_batch_weight_gap;
      entry.max_batch_covariance_gap = run.report.max_batch_covariance_gap;
      entry.final_action_nash_gap = run.report.final_action_nash_gap;
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
      ++result.failures;
    }
    result.entries.push_back(std::move(entry));
  }
  return result;
}

void write_sweep_outputs(const ScenarioConfig& config, const SweepResult& sweep,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json aggregate;
  aggregate["scenario"] = kind_name(config.kind);
  aggregate["seeds"] = json::array();
  double max_clair = 0.0, max_weight = 0.0, max_cov = 0.0, max_nash = 0.0;
  std::map<std::string, int> histogram;
  json per_seed = json::array();
  for (const auto& entry : sweep.entries) {
    aggregate["seeds"].push_back(entry.seed);
    json e;
    e["seed"] = entry.seed;
    e["ok"] = entry.ok;
    if (!entry.ok) {
      e["error"] = entry.error;
    } else {
      std::filesystem::path seed_dir =
          dir / ("seed_" + std::to_string(entry.seed));
      std::filesystem::create_directories(seed_dir);
      write_file(seed_dir / "summary.json", entry.summary);
      e["convergence_step"] = entry.convergence_step
                                  ? json(*entry.convergence_step)
                                  : json(nullptr);
      max_clair = std::max(max_clair, entry.max_clairvoyant_action_gap);
      max_weight = std::max(max_weight, entry.max_batch_weight_gap);
      max_cov = std::max(max_cov, entry.max_batch_covariance_gap);
      max_nash = std::max(max_nash, entry.final_action_nash_gap);
      histogram[entry.convergence_step
                    ? std::to_string(*entry.convergence_step)
                    : "none"]++;
    }
    per_seed.push_back(std::move(e));
  }
  aggregate["per_seed"] = std::move(per_seed);
  aggregate["failures"] = sweep.failures;
  aggregate["aggregate"]["max_clairvoyant_action_gap"] = max_clair;
  aggregate["aggregate"]["max_batch_weight_gap"] = max_weight;
  aggregate["aggregate"]["max_batch_covariance_gap"] = max_cov;
  aggregate["aggregate"]["max_final_action_nash_gap"] = max_nash;
  aggregate["aggregate"]["convergence_step_histogram"] = histogram;
  write_file(dir / "sweep.json", aggregate.dump(2) + "\n");
}

}  // namespace qng
