#include "qng/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>

#include "qng/errors.hpp"
#include "qng/rng.hpp"

namespace qng {

namespace {

std::vector<std::vector<int>> build_adjacency(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& lst : adj) std::sort(lst.begin(), lst.end());
  return adj;
}

// Max BFS distance from source; -1 if some node is unreachable.
int eccentricity(const std::vector<std::vector<int>>& adj, int source) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  int furthest = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    furthest = std::max(furthest, dist[u]);
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  for (int d : dist)
    if (d < 0) return -1;
  return furthest;
}

bool is_connected(const std::vector<std::vector<int>>& adj) {
  return adj.empty() || eccentricity(adj, 0) >= 0;
}

}  // namespace

NetworkGraph::NetworkGraph(int n_agents, std::vector<std::pair<int, int>> edges)
    : n_agents_(n_agents) {
  if (n_agents < 1) throw DomainError("graph needs at least one agent");
  std::set<std::pair<int, int>> seen;
  for (auto& [a, b] : edges) {
    if (a < 0 || a >= n_agents || b < 0 || b >= n_agents)
      throw DomainError("edge endpoint out of range: (" + std::to_string(a) +
                        ", " + std::to_string(b) + ")");
    if (a == b)
      throw DomainError("self-loop at agent " + std::to_string(a));
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second)
      throw DomainError("duplicate edge (" + std::to_string(a) + ", " +
                        std::to_string(b) + ")");
  }
  edges_.assign(seen.begin(), seen.end());
  adjacency_ = build_adjacency(n_agents_, edges_);

  diameter_ = 0;
  for (int i = 0; i < n_agents_; ++i) {
    int ecc = eccentricity(adjacency_, i);
    if (ecc < 0) throw DomainError("graph is not connected");
    diameter_ = std::max(diameter_, ecc);
  }
}

const std::vector<int>& NetworkGraph::neighbors(int i) const {
  if (i < 0 || i >= n_agents_)
    throw DomainError("invalid agent id " + std::to_string(i));
  return adjacency_[i];
}

int NetworkGraph::degree(int i) const {
  return static_cast<int>(neighbors(i).size());
}

NetworkGraph line_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return {n, std::move(edges)};
}

NetworkGraph star_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, n - 1);
  return {n, std::move(edges)};
}

NetworkGraph ring_graph(int n) {
  if (n < 3) throw DomainError("ring needs at least 3 agents");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return {n, std::move(edges)};
}

NetworkGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return {n, std::move(edges)};
}

NetworkGraph geometric_graph(int n, double side, double radius,
                             std::uint64_t seed) {
  if (n < 2) throw DomainError("geometric graph needs n >= 2");
  if (side <= 0 || radius <= 0)
    throw DomainError("geometric graph needs positive side and radius");
  Rng rng(seed);
  for (int attempt = 0; attempt < kGenerationRetryBudget; ++attempt) {
    std::vector<double> px(n), py(n);
    for (int i = 0; i < n; ++i) {
      px[i] = rng.uniform() * side;
      py[i] = rng.uniform() * side;
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::hypot(px[i] - px[j], py[i] - py[j]) < radius)
          edges.emplace_back(i, j);
    if (is_connected(build_adjacency(n, edges)))
      return {n, std::move(edges)};
  }
  throw GenerationError("geometric graph: no connected placement in " +
                        std::to_string(kGenerationRetryBudget) + " attempts");
}

NetworkGraph erdos_renyi_graph(int n, double p, std::uint64_t seed) {
  if (n < 2) throw DomainError("random graph needs n >= 2");
  if (p < 0.0 || p > 1.0)
    throw DomainError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  for (int attempt = 0; attempt < kGenerationRetryBudget; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < p) edges.emplace_back(i, j);
    if (is_connected(build_adjacency(n, edges)))
      return {n, std::move(edges)};
  }
  throw GenerationError("random graph: no connected draw in " +
                        std::to_string(kGenerationRetryBudget) + " attempts");
}

}  // namespace qng
