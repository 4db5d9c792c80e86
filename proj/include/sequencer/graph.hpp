#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sequencer/metrics.hpp"

namespace sequencer {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 0.0;
  bool operator==(const WeightedEdge&) const = default;
};

// Connected acyclic graph over nodes 0..n-1 with exactly n-1 edges.
class SpanningTree {
 public:
  SpanningTree(int n_nodes, std::vector<WeightedEdge> edges);

  int n_nodes() const { return n_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  // Neighbors of u sorted by (edge weight, node index).
  const std::vector<std::pair<int, double>>& neighbors(int u) const { return adj_[u]; }

  int degree(int u) const { return static_cast<int>(adj_[u].size()); }

 private:
  int n_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

// BFS depths from a start node, grouped into levels.
struct LevelAssignment {
  int start = 0;
  std::vector<int> depth;              // per node, edge counts
  std::vector<std::vector<int>> levels;  // nodes per depth, ascending depth

  std::size_t width(std::size_t q) const { return levels[q].size(); }
};

// Geometry of a tree seen from its least connected node: a is the mean depth
// (major axis), b half the mean level width (minor axis), eta their ratio.
struct ElongationStats {
  double a = 0.0;
  double b = 0.0;
  double eta = 0.0;
};

// Kruskal with deterministic tie-breaking by (weight, min endpoint, max
// endpoint). The dense overload skips infinite entries; both throw
// DegenerateError when the finite-edge graph is disconnected.
SpanningTree minimum_spanning_tree(const DistanceMatrix& d);
SpanningTree minimum_spanning_tree(int n_nodes, std::vector<WeightedEdge> graph_edges);

// The node minimizing Freeman closeness centrality (n-1 over the sum of
// unweighted shortest paths); ties go to the smallest node index.
int least_connected_node(const SpanningTree& tree);

LevelAssignment level_assignment(const SpanningTree& tree, int start);

// start defaults to the least connected node.
ElongationStats elongation(const SpanningTree& tree, std::optional<int> start = std::nullopt);

// Breadth-first visit order from start; children expand in ascending edge
// weight, ties by node index.
std::vector<int> bfs_walk(const SpanningTree& tree, int start);

// Sum of unweighted shortest-path lengths from each node to all others.
// The BFS route runs one search per node; the reroot route is a linear-time
// tree DP. They agree exactly and least_connected_node dispatches on size.
std::vector<std::int64_t> total_node_distances_bfs(const SpanningTree& tree);
std::vector<std::int64_t> total_node_distances_reroot(const SpanningTree& tree);

// One "u v weight" line per edge, for external visualization.
std::string format_edge_list(const SpanningTree& tree);

}  // namespace sequencer
