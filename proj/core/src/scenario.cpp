#include "qng/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qng/errors.hpp"

namespace qng {

namespace {

using nlohmann::json;

struct Validator {
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& msg) {
    issues.push_back(path + ": " + msg);
  }

  // Rejects keys outside the allowed set.
  void check_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key()))
        fail(path, "unknown key \"" + it.key() + "\"");
  }

  const json* require(const json& obj, const std::string& path,
                      const std::string& key) {
    if (!obj.contains(key)) {
      fail(path, "missing required key \"" + key + "\"");
      return nullptr;
    }
    return &obj.at(key);
  }

  std::optional<double> number(const json& v, const std::string& path) {
    if (!v.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<int> integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    return v.get<int>();
  }
};

std::optional<Eigen::MatrixXd> parse_matrix(Validator& val, const json& v,
                                            const std::string& path) {
  if (!v.is_array() || v.empty() || !v.front().is_array()) {
    val.fail(path, "expected a matrix (array of rows)");
    return std::nullopt;
  }
  const std::size_t cols = v.front().size();
  Eigen::MatrixXd out(v.size(), cols);
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array() || v[r].size() != cols) {
      val.fail(path, "rows must all have length " + std::to_string(cols));
      return std::nullopt;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[r][c].is_number()) {
        val.fail(path, "entries must be numbers");
        return std::nullopt;
      }
      out(r, c) = v[r][c].get<double>();
    }
  }
  return out;
}

std::optional<Eigen::VectorXd> parse_vector(Validator& val, const json& v,
                                            const std::string& path) {
  if (!v.is_array()) {
    val.fail(path, "expected an array of numbers");
    return std::nullopt;
  }
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      val.fail(path, "entries must be numbers");
      return std::nullopt;
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

int graph_agent_count(const ScenarioConfig& config) {
  if (const auto* el = std::get_if<EdgeListGraph>(&config.graph))
    return el->n_agents;
  return std::get<GeneratedGraph>(config.graph).n_agents;
}

void parse_graph(Validator& val, const json& g, ScenarioConfig& config) {
  if (!g.is_object()) {
    val.fail("graph", "expected an object");
    return;
  }
  val.check_keys(g, "graph", {"edges", "n_agents", "generator"});
  if (g.contains("edges") == g.contains("generator")) {
    val.fail("graph", "provide exactly one of \"edges\" or \"generator\"");
    return;
  }
  if (g.contains("edges")) {
    EdgeListGraph el;
    if (const json* n = val.require(g, "graph", "n_agents")) {
      if (auto nn = val.integer(*n, "graph.n_agents")) el.n_agents = *nn;
    }
    const json& edges = g.at("edges");
    if (!edges.is_array()) {
      val.fail("graph.edges", "expected an array of [i, j] pairs");
      return;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const json& pair = edges[e];
      std::string path = "graph.edges[" + std::to_string(e) + "]";
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number_integer()) {
        val.fail(path, "expected [i, j] with integer 1-based labels");
        continue;
      }
      int a = pair[0].get<int>(), b = pair[1].get<int>();
      if (a < 1 || a > el.n_agents || b < 1 || b > el.n_agents)
        val.fail(path, "labels must lie in 1.." + std::to_string(el.n_agents));
      else
        el.edges.emplace_back(a, b);
    }
    config.graph = std::move(el);
    return;
  }
  const json& gen = g.at("generator");
  if (!gen.is_object()) {
    val.fail("graph.generator", "expected an object");
    return;
  }
  GeneratedGraph gg;
  const json* type = val.require(gen, "graph.generator", "type");
  std::string type_name = type && type->is_string() ? type->get<std::string>()
                                                    : "";
  if (type_name == "geometric") {
    gg.type = GeneratedGraph::Type::kGeometric;
    val.check_keys(gen, "graph.generator",
                   {"type", "n_agents", "side", "radius", "seed"});
    if (const json* v = val.require(gen, "graph.generator", "n_agents"))
      if (auto x = val.integer(*v, "graph.generator.n_agents")) gg.n_agents = *x;
    if (const json* v = val.require(gen, "graph.generator", "side"))
      if (auto x = val.number(*v, "graph.generator.side")) gg.side = *x;
    if (const json* v = val.require(gen, "graph.generator", "radius"))
      if (auto x = val.number(*v, "graph.generator.radius")) gg.radius = *x;
    if (gg.side <= 0.0) val.fail("graph.generator.side", "must be positive");
    if (gg.radius <= 0.0) val.fail("graph.generator.radius", "must be positive");
  } else if (type_name == "erdos_renyi") {
    gg.type = GeneratedGraph::Type::kErdosRenyi;
    val.check_keys(gen, "graph.generator", {"type", "n_agents", "p", "seed"});
    if (const json* v = val.require(gen, "graph.generator", "n_agents"))
      if (auto x = val.integer(*v, "graph.generator.n_agents")) gg.n_agents = *x;
    if (const json* v = val.require(gen, "graph.generator", "p"))
      if (auto x = val.number(*v, "graph.generator.p")) gg.p = *x;
    if (gg.p < 0.0 || gg.p > 1.0)
      val.fail("graph.generator.p", "must lie in [0, 1]");
  } else {
    val.fail("graph.generator.type",
             "expected \"geometric\" or \"erdos_renyi\"");
    return;
  }
  if (gg.n_agents < 2) val.fail("graph.generator.n_agents", "must be >= 2");
  if (const json* v = val.require(gen, "graph.generator", "seed")) {
    if (v->is_number_unsigned() || v->is_number_integer())
      gg.seed = v->get<std::uint64_t>();
    else
      val.fail("graph.generator.seed", "expected an integer");
  }
  config.graph = gg;
}

void parse_payoff(Validator& val, const json& p, ScenarioConfig& config) {
  if (!p.is_object()) {
    val.fail("payoff", "expected an object");
    return;
  }
  switch (config.kind) {
    case ScenarioKind::kCournot: {
      val.check_keys(p, "payoff", {"price", "unit_cost"});
      CournotParams cp;
      if (const json* v = val.require(p, "payoff", "price"))
        if (auto x = val.number(*v, "payoff.price")) cp.price = *x;
      if (const json* v = val.require(p, "payoff", "unit_cost"))
        if (auto x = val.number(*v, "payoff.unit_cost")) cp.unit_cost = *x;
      if (!(cp.price > cp.unit_cost))
        val.fail("payoff", "price must exceed unit_cost");
      config.payoff = cp;
      break;
    }
    case ScenarioKind::kCoordination: {
      val.check_keys(p, "payoff", {"lambda", "theta_true"});
      CoordinationParams cp;
      if (const json* v = val.require(p, "payoff", "lambda"))
        if (auto x = val.number(*v, "payoff.lambda")) cp.lambda = *x;
      if (!(cp.lambda > 0.0 && cp.lambda < 1.0))
        val.fail("payoff.lambda", "must lie strictly inside (0, 1)");
      if (const json* v = val.require(p, "payoff", "theta_true")) {
        auto vec = parse_vector(val, *v, "payoff.theta_true");
        if (vec && vec->size() == 2)
          cp.theta_true = *vec;
        else if (vec)
          val.fail("payoff.theta_true", "expected two components");
      }
      config.payoff = cp;
      break;
    }
    case ScenarioKind::kCustomScalar: {
      val.check_keys(p, "payoff", {"beta", "delta", "theta_true"});
      CustomScalarParams cp;
      if (const json* v = val.require(p, "payoff", "beta"))
        if (auto mat = parse_matrix(val, *v, "payoff.beta")) cp.beta = *mat;
      if (const json* v = val.require(p, "payoff", "delta"))
        if (auto x = val.number(*v, "payoff.delta")) cp.delta = *x;
      if (const json* v = val.require(p, "payoff", "theta_true"))
        if (auto x = val.number(*v, "payoff.theta_true")) cp.theta_true = *x;
      const int n = graph_agent_count(config);
      if (cp.beta.size() > 0) {
        if (cp.beta.rows() != n || cp.beta.cols() != n)
          val.fail("payoff.beta", "must be N x N for N = " + std::to_string(n));
        else
          for (int i = 0; i < n; ++i)
            if (cp.beta(i, i) != 0.0)
              val.fail("payoff.beta",
                       "diagonal entry beta[" + std::to_string(i + 1) + "][" +
                           std::to_string(i + 1) + "] must be zero");
      }
      config.payoff = std::move(cp);
      break;
    }
    case ScenarioKind::kCustomVector: {
      val.check_keys(p, "payoff",
                     {"state_dim", "coupling", "state_gain", "theta_true"});
      CustomVectorParams cp;
      if (const json* v = val.require(p, "payoff", "state_dim"))
        if (auto x = val.integer(*v, "payoff.state_dim")) cp.state_dim = *x;
      if (cp.state_dim < 1) {
        val.fail("payoff.state_dim", "must be a positive integer");
        break;
      }
      const int n = graph_agent_count(config);
      const int m = cp.state_dim;
      if (const json* v = val.require(p, "payoff", "state_gain")) {
        if (auto mat = parse_matrix(val, *v, "payoff.state_gain")) {
          if (mat->rows() != m || mat->cols() != m)
            val.fail("payoff.state_gain", "must be m x m");
          else
            cp.state_gain = *mat;
        }
      }
      if (const json* v = val.require(p, "payoff", "theta_true")) {
        if (auto vec = parse_vector(val, *v, "payoff.theta_true")) {
          if (vec->size() != m)
            val.fail("payoff.theta_true", "must have state_dim components");
          else
            cp.theta_true = *vec;
        }
      }
      if (const json* v = val.require(p, "payoff", "coupling")) {
        if (!v->is_array() || v->size() != static_cast<std::size_t>(n)) {
          val.fail("payoff.coupling", "expected N rows of N blocks");
        } else {
          cp.coupling.assign(static_cast<std::size_t>(n) * n,
                             Eigen::MatrixXd::Zero(m, m));
          for (int i = 0; i < n; ++i) {
            const json& row = (*v)[i];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
              val.fail("payoff.coupling[" + std::to_string(i) + "]",
                       "expected N blocks");
              continue;
            }
            for (int j = 0; j < n; ++j) {
              std::string path = "payoff.coupling[" + std::to_string(i) + "][" +
                                 std::to_string(j) + "]";
              if (row[j].is_null()) continue;  // zero block
              auto mat = parse_matrix(val, row[j], path);
              if (!mat) continue;
              if (mat->rows() != m || mat->cols() != m) {
                val.fail(path, "blocks must be m x m");
                continue;
              }
              if (i == j && !mat->isZero(0.0)) {
                val.fail(path, "diagonal blocks must be zero");
                continue;
              }
              cp.coupling[static_cast<std::size_t>(i) * n + j] = *mat;
            }
          }
        }
      }
      config.payoff = std::move(cp);
      break;
    }
  }
}

void parse_noise(Validator& val, const json& noise, ScenarioConfig& config) {
  if (!noise.is_object()) {
    val.fail("noise", "expected an object");
    return;
  }
  const int n = graph_agent_count(config);
  const bool vector_case = is_vector_scenario(config);
  if (!vector_case) {
    val.check_keys(noise, "noise", {"var"});
    const json* v = val.require(noise, "noise", "var");
    if (!v) return;
    Eigen::VectorXd variances;
    if (v->is_number()) {
      variances = Eigen::VectorXd::Constant(n, v->get<double>());
    } else if (auto vec = parse_vector(val, *v, "noise.var")) {
      variances = *vec;
      if (variances.size() != n)
        val.fail("noise.var", "expected one variance per agent");
    } else {
      return;
    }
    for (Eigen::Index i = 0; i < variances.size(); ++i)
      if (!(variances[i] > 0.0)) {
        val.fail("noise.var", "variances must be positive");
        break;
      }
    config.noise = variances;
    return;
  }
  val.check_keys(noise, "noise", {"cov_diag"});
  const json* v = val.require(noise, "noise", "cov_diag");
  if (!v) return;
  int m = 2;
  if (const auto* cp = std::get_if<CustomVectorParams>(&config.payoff))
    m = cp->state_dim;
  Eigen::MatrixXd diags;
  if (v->is_array() && !v->empty() && v->front().is_number()) {
    auto vec = parse_vector(val, *v, "noise.cov_diag");
    if (!vec) return;
    if (vec->size() != m) {
      val.fail("noise.cov_diag", "expected state_dim entries");
      return;
    }
    diags = vec->transpose().replicate(n, 1);
  } else if (auto mat = parse_matrix(val, *v, "noise.cov_diag")) {
    diags = *mat;
    if (diags.rows() != n || diags.cols() != m) {
      val.fail("noise.cov_diag", "expected N rows of state_dim entries");
      return;
    }
  } else {
    return;
  }
  if (!(diags.array() > 0.0).all())
    val.fail("noise.cov_diag", "entries must be positive");
  config.noise = diags;
}

}  // namespace

bool is_vector_scenario(const ScenarioConfig& config) {
  return config.kind == ScenarioKind::kCoordination ||
         config.kind == ScenarioKind::kCustomVector;
}

ScenarioConfig parse_config_text(const std::string& text) {
  Validator val;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"top level must be an object"});

  ScenarioConfig config;
  val.check_keys(root, "$",
                 {"scenario", "graph", "payoff", "noise", "horizon",
                  "signal_seed", "output_dir"});

  if (const json* v = val.require(root, "$", "scenario")) {
    std::string s = v->is_string() ? v->get<std::string>() : "";
    if (s == "cournot")
      config.kind = ScenarioKind::kCournot;
    else if (s == "coordination")
      config.kind = ScenarioKind::kCoordination;
    else if (s == "custom-scalar")
      config.kind = ScenarioKind::kCustomScalar;
    else if (s == "custom-vector")
      config.kind = ScenarioKind::kCustomVector;
    else
      val.fail("scenario",
               "expected one of cournot, coordination, custom-scalar, "
               "custom-vector");
  }

  if (const json* v = val.require(root, "$", "graph"))
    parse_graph(val, *v, config);

  // Payoff and noise need N; only meaningful once the graph section parsed.
  if (val.issues.empty()) {
    if (const json* v = val.require(root, "$", "payoff"))
      parse_payoff(val, *v, config);
    if (const json* v = val.require(root, "$", "noise"))
      parse_noise(val, *v, config);
  }

  if (root.contains("horizon")) {
    if (auto h = val.integer(root.at("horizon"), "horizon")) {
      if (*h < 0)
        val.fail("horizon", "must be nonnegative");
      else
        config.horizon = *h;
    }
  }
  if (const json* v = val.require(root, "$", "signal_seed")) {
    if (v->is_number_unsigned() || v->is_number_integer())
      config.signal_seed = v->get<std::uint64_t>();
    else
      val.fail("signal_seed", "expected an integer");
  }
  if (root.contains("output_dir")) {
    if (root.at("output_dir").is_string())
      config.output_dir = root.at("output_dir").get<std::string>();
    else
      val.fail("output_dir", "expected a string");
  }

  // Edge-list graphs are validated fully here (connectivity included) so a
  // bad file fails before any computation.
  if (val.issues.empty()) {
    if (std::holds_alternative<EdgeListGraph>(config.graph)) {
      try {
        build_graph(config);
      } catch (const DomainError& e) {
        val.fail("graph", e.what());
      }
    }
    if (val.issues.empty()) {
      try {
        if (is_vector_scenario(config))
          build_vector_spec(config);
        else
          build_scalar_spec(config);
      } catch (const DomainError& e) {
        val.fail("payoff", e.what());
      }
    }
  }

  if (!val.issues.empty()) throw ConfigError(std::move(val.issues));
  return config;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open " + path.string()});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

NetworkGraph build_graph(const ScenarioConfig& config) {
  if (const auto* el = std::get_if<EdgeListGraph>(&config.graph)) {
    std::vector<std::pair<int, int>> zero_based;
    zero_based.reserve(el->edges.size());
    for (auto [a, b] : el->edges) zero_based.emplace_back(a - 1, b - 1);
    return {el->n_agents, std::move(zero_based)};
  }
  const auto& gg = std::get<GeneratedGraph>(config.graph);
  if (gg.type == GeneratedGraph::Type::kGeometric)
    return geometric_graph(gg.n_agents, gg.side, gg.radius, gg.seed);
  return erdos_renyi_graph(gg.n_agents, gg.p, gg.seed);
}

GameSpec build_scalar_spec(const ScenarioConfig& config) {
  const int n = graph_agent_count(config);
  Eigen::VectorXd variances = config.noise.col(0);
  if (const auto* cp = std::get_if<CournotParams>(&config.payoff))
    return cournot_spec(cp->price, cp->unit_cost, std::move(variances), n);
  const auto& cp = std::get<CustomScalarParams>(config.payoff);
  return GameSpec::create(n, cp.beta, cp.delta, std::move(variances),
                          cp.theta_true);
}

VectorGameSpec build_vector_spec(const ScenarioConfig& config) {
  const int n = graph_agent_count(config);
  std::vector<Eigen::MatrixXd> covs;
  covs.reserve(n);
  for (int i = 0; i < n; ++i)
    covs.push_back(config.noise.row(i).asDiagonal());
  if (const auto* cp = std::get_if<CoordinationParams>(&config.payoff))
    return coordination_spec(cp->lambda, std::move(covs), n, cp->theta_true);
  const auto& cp = std::get<CustomVectorParams>(config.payoff);
  return VectorGameSpec::create(n, cp.state_dim, cp.coupling, cp.state_gain,
                                std::move(covs), cp.theta_true);
}

}  // namespace qng
