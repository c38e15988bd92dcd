// Command-line front end: runs scenario files, sweeps signal seeds, and
// prints graph statistics. Exit codes: 0 ok, 2 configuration problem,
// 3 numerical or equilibrium failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "qng/coefficients.hpp"
#include "qng/errors.hpp"
#include "qng/runner.hpp"
#include "qng/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string resolve_output_dir(const qng::ScenarioConfig& config,
                               const std::string& cli_override) {
  if (!cli_override.empty()) return cli_override;
  if (const char* env = std::getenv("QNG_OUTPUT_DIR"); env && *env)
    return env;
  return config.output_dir;
}

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::string& coeff_dump) {
  qng::ScenarioConfig config = qng::parse_config(config_path);
  qng::RunArtifacts run = qng::run_scenario(config);
  std::string dir = resolve_output_dir(config, out_dir);
  qng::write_run_outputs(config, run, dir);
  if (!coeff_dump.empty()) {
    std::ofstream dump(coeff_dump);
    if (!dump) throw qng::DomainError("cannot write " + coeff_dump);
    if (run.scalar_table)
      qng::write_diagnostic_dump(*run.scalar_table, dump);
    else
      qng::write_diagnostic_dump(*run.vector_table, dump);
  }
  std::cout << "wrote " << dir << "/actions.csv, errors.csv, summary.json\n";
  if (run.trajectory.convergence_step)
    std::cout << "consensus reached at step " << *run.trajectory.convergence_step
              << " (diameter " << run.graph.diameter() << ")\n";
  else
    std::cout << "no consensus within horizon " << run.horizon << "\n";
  return kExitOk;
}

int sweep_command(const std::string& config_path, const std::string& out_dir,
                  const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw qng::DomainError("sweep needs at least one seed");
  qng::ScenarioConfig config = qng::parse_config(config_path);
  qng::SweepResult sweep = qng::sweep_scenario(config, seeds);
  std::string dir = resolve_output_dir(config, out_dir);
  qng::write_sweep_outputs(config, sweep, dir);
  std::cout << "wrote " << dir << "/sweep.json (" << sweep.entries.size()
            << " seeds, " << sweep.failures << " failures)\n";
  return sweep.failures == 0 ? kExitOk : kExitNumerical;
}

int graph_info_command(const std::string& config_path) {
  qng::ScenarioConfig config = qng::parse_config(config_path);
  qng::NetworkGraph g = qng::build_graph(config);
  int min_deg = g.size(), max_deg = 0, total = 0;
  for (int i = 0; i < g.size(); ++i) {
    min_deg = std::min(min_deg, g.degree(i));
    max_deg = std::max(max_deg, g.degree(i));
    total += g.degree(i);
  }
  std::cout << "agents: " << g.size() << "\n"
            << "edges: " << g.edges().size() << "\n"
            << "diameter: " << g.diameter() << "\n"
            << "degree min/mean/max: " << min_deg << "/"
            << (double(total) / g.size()) << "/" << max_deg << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated network-game simulator with equilibrium filtering"};
  app.require_subcommand(1);

  std::string config_path, out_dir, coeff_dump;
  std::vector<std::uint64_t> seeds;

  CLI::App* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("config", config_path, "Scenario JSON file")->required();
  run->add_option("--output-dir", out_dir,
                  "Override the scenario's output directory");
  run->add_option("--coeff-dump", coeff_dump,
                  "Also dump the full coefficient table to this file");

  CLI::App* sweep = app.add_subcommand("sweep", "Run one scenario per seed");
  sweep->add_option("config", config_path, "Scenario JSON file")->required();
  sweep->add_option("--seeds", seeds, "Signal seeds to run")
      ->required()
      ->expected(-1);
  sweep->add_option("--output-dir", out_dir,
                    "Override the scenario's output directory");

  CLI::App* info = app.add_subcommand("graph-info", "Print graph statistics");
  info->add_option("config", config_path, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path, out_dir, coeff_dump);
    if (sweep->parsed()) return sweep_command(config_path, out_dir, seeds);
    return graph_info_command(config_path);
  } catch (const qng::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const qng::EquilibriumError& e) {
    std::cerr << "equilibrium failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qng::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qng::GenerationError& e) {
    std::cerr << "graph generation failure: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qng::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
