#include "sequencer/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "sequencer/error.hpp"

namespace sequencer {

namespace {

// Union-find with path compression and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int root(int i) {
    while (i != parent_[i]) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  bool unite(int a, int b) {
    int ra = root(a), rb = root(b);
    if (ra == rb) return false;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace

SpanningTree::SpanningTree(int n_nodes, std::vector<WeightedEdge> edges)
    : n_(n_nodes), edges_(std::move(edges)) {
  if (n_ < 2) throw Error("a spanning tree needs at least 2 nodes");
  if (edges_.size() != static_cast<std::size_t>(n_) - 1)
    throw Error(fmt::format("expected {} edges for {} nodes, got {}", n_ - 1, n_,
                            edges_.size()));
  adj_.resize(n_);
  DisjointSet ds(n_);
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_ || e.u == e.v || e.w < 0.0)
      throw Error("invalid tree edge");
    if (!ds.unite(e.u, e.v)) throw Error("edges contain a cycle");
    adj_[e.u].emplace_back(e.v, e.w);
    adj_[e.v].emplace_back(e.u, e.w);
  }
  for (auto& nbrs : adj_) {
    std::sort(nbrs.begin(), nbrs.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second < b.second;
      return a.first < b.first;
    });
  }
}

SpanningTree minimum_spanning_tree(int n_nodes, std::vector<WeightedEdge> graph_edges) {
  for (auto& e : graph_edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  // Deterministic for tied weights: (weight, min endpoint, max endpoint).
  std::sort(graph_edges.begin(), graph_edges.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              if (a.w != b.w) return a.w < b.w;
              if (a.u != b.u) return a.u < b.u;
              return a.v < b.v;
            });
  DisjointSet ds(n_nodes);
  std::vector<WeightedEdge> tree;
  tree.reserve(static_cast<std::size_t>(n_nodes) - 1);
  for (const auto& e : graph_edges) {
    if (ds.unite(e.u, e.v)) {
      tree.push_back(e);
      if (tree.size() == static_cast<std::size_t>(n_nodes) - 1) break;
    }
  }
  if (tree.size() != static_cast<std::size_t>(n_nodes) - 1)
    throw DegenerateError("distance graph is disconnected; no spanning tree exists");
  return SpanningTree(n_nodes, std::move(tree));
}

SpanningTree minimum_spanning_tree(const DistanceMatrix& d) {
  const int n = static_cast<int>(d.n);
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = d.at(i, j);
      if (std::isinf(w)) continue;  // flagged-absent edge
      if (std::isnan(w) || w < 0.0)
        throw Error(fmt::format("invalid distance at ({}, {})", i, j));
      edges.push_back({i, j, w});
    }
  }
  return minimum_spanning_tree(n, std::move(edges));
}

std::vector<std::int64_t> total_node_distances_bfs(const SpanningTree& tree) {
  const int n = tree.n_nodes();
  std::vector<std::int64_t> totals(n, 0);
  std::vector<int> depth(n);
  std::vector<int> queue(n);
  for (int s = 0; s < n; ++s) {
    std::fill(depth.begin(), depth.end(), -1);
    depth[s] = 0;
    queue[0] = s;
    int head = 0, tail = 1;
    std::int64_t sum = 0;
    while (head < tail) {
      const int u = queue[head++];
      sum += depth[u];
      for (const auto& [v, w] : tree.neighbors(u)) {
        if (depth[v] < 0) {
          depth[v] = depth[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    totals[s] = sum;
  }
  return totals;
}

std::vector<std::int64_t> total_node_distances_reroot(const SpanningTree& tree) {
  const int n = tree.n_nodes();
  // BFS order from node 0 gives parents; children are processed after parents.
  std::vector<int> order, parent(n, -1), depth(n, -1);
  order.reserve(n);
  depth[0] = 0;
  order.push_back(0);
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int u = order[h];
    for (const auto& [v, w] : tree.neighbors(u)) {
      if (depth[v] < 0) {
        depth[v] = depth[u] + 1;
        parent[v] = u;
        order.push_back(v);
      }
    }
  }

  std::vector<std::int64_t> subtree(n, 1), totals(n, 0);
  std::int64_t root_total = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    root_total += depth[u];
    if (parent[u] >= 0) subtree[parent[u]] += subtree[u];
  }
  totals[0] = root_total;
  // Moving the root across an edge changes the total by n - 2 * subtree.
  for (std::size_t h = 1; h < order.size(); ++h) {
    const int u = order[h];
    totals[u] = totals[parent[u]] + n - 2 * subtree[u];
  }
  return totals;
}

int least_connected_node(const SpanningTree& tree) {
  // Closeness (n-1)/sum is minimized where the distance sum is maximal. Both
  // routes are exact in integer arithmetic; the DP route is linear time.
  const auto totals = tree.n_nodes() <= 2000 ? total_node_distances_bfs(tree)
                                             : total_node_distances_reroot(tree);
  int best = 0;
  for (int i = 1; i < tree.n_nodes(); ++i)
    if (totals[i] > totals[best]) best = i;
  return best;
}

LevelAssignment level_assignment(const SpanningTree& tree, int start) {
  const int n = tree.n_nodes();
  if (start < 0 || start >= n) throw Error("start node out of range");
  LevelAssignment la;
  la.start = start;
  la.depth.assign(n, -1);
  la.depth[start] = 0;
  std::vector<int> queue{start};
  queue.reserve(n);
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int u = queue[h];
    for (const auto& [v, w] : tree.neighbors(u)) {
      if (la.depth[v] < 0) {
        la.depth[v] = la.depth[u] + 1;
        queue.push_back(v);
      }
    }
  }
  const int max_depth = *std::max_element(la.depth.begin(), la.depth.end());
  la.levels.resize(max_depth + 1);
  for (int v = 0; v < n; ++v) la.levels[la.depth[v]].push_back(v);
  return la;
}

ElongationStats elongation(const SpanningTree& tree, std::optional<int> start) {
  const int s = start.value_or(least_connected_node(tree));
  const auto la = level_assignment(tree, s);
  std::int64_t depth_sum = 0;
  for (int d : la.depth) depth_sum += d;
  const double n = static_cast<double>(tree.n_nodes());
  ElongationStats stats;
  // Mean depth over all nodes, the start included.
  stats.a = static_cast<double>(depth_sum) / n;
  // Levels partition the nodes, so the mean level width is n / #levels.
  stats.b = 0.5 * n / static_cast<double>(la.levels.size());
  stats.eta = stats.a / stats.b;
  return stats;
}

std::vector<int> bfs_walk(const SpanningTree& tree, int start) {
  const int n = tree.n_nodes();
  if (start < 0 || start >= n) throw Error("start node out of range");
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> visited(n, false);
  visited[start] = true;
  order.push_back(start);
  // neighbors() is already sorted by (weight, index), so nearer objects are
  // enqueued first within a branch.
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int u = order[h];
    for (const auto& [v, w] : tree.neighbors(u)) {
      if (!visited[v]) {
        visited[v] = true;
        order.push_back(v);
      }
    }
  }
  return order;
}

std::string format_edge_list(const SpanningTree& tree) {
  std::ostringstream out;
  for (const auto& e : tree.edges())
    out << e.u << ' ' << e.v << ' ' << fmt::format("{:.17g}", e.w) << '\n';
  return out.str();
}

}  // namespace sequencer
