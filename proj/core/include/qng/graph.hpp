#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace qng {

// Undirected connected simple graph over agents 0..N-1.
// Immutable after construction; neighbor lists are sorted ascending.
class NetworkGraph {
 public:
  NetworkGraph(int n_agents, std::vector<std::pair<int, int>> edges);

  int size() const { return n_agents_; }
  const std::vector<int>& neighbors(int i) const;
  int degree(int i) const;
  int diameter() const { return diameter_; }
  // Normalized edge list: each pair (i, j) with i < j, lexicographically sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  int n_agents_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  int diameter_;
};

NetworkGraph line_graph(int n);
// Hub is agent n-1, matching the usual drawing with the center labeled last.
NetworkGraph star_graph(int n);
NetworkGraph ring_graph(int n);
NetworkGraph complete_graph(int n);

// Nodes placed uniformly at random on [0, side]^2; edge iff distance < radius
// (strict). Placement is redrawn until the graph is connected, up to
// kGenerationRetryBudget attempts on one seeded stream.
NetworkGraph geometric_graph(int n, double side, double radius,
                             std::uint64_t seed);

// Each pair is an edge independently with probability p; same retry policy.
NetworkGraph erdos_renyi_graph(int n, double p, std::uint64_t seed);

inline constexpr int kGenerationRetryBudget = 1000;

}  // namespace qng
