#pragma once

// Independent brute-force reference implementations used to freeze expected
// values. Nothing here shares code with the library paths under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "sequencer/dataset.hpp"
#include "sequencer/graph.hpp"
#include "sequencer/metrics.hpp"

namespace oracles {

using sequencer::DistanceMatrix;
using sequencer::Matrix;
using sequencer::ObjectSet;
using sequencer::WeightedEdge;

inline Matrix make_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

inline ObjectSet make_objects(const std::vector<std::vector<double>>& rows) {
  return sequencer::load_object_set(make_matrix(rows));
}

// ---------------------------------------------------------------------------
// Labeled-tree enumeration via Pruefer sequences: every labeled tree on n >= 3
// nodes corresponds to exactly one sequence in [0, n)^(n-2).

inline std::vector<std::pair<int, int>> prufer_decode(const std::vector<int>& seq, int n) {
  std::vector<int> degree(n, 1);
  for (int v : seq) ++degree[v];
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  std::vector<int> remaining = seq;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    int leaf = -1;
    for (int u = 0; u < n; ++u) {
      if (degree[u] == 1 && !used[u]) {
        leaf = u;
        break;
      }
    }
    edges.emplace_back(leaf, remaining[i]);
    used[leaf] = true;
    --degree[remaining[i]];
  }
  int a = -1, b = -1;
  for (int u = 0; u < n; ++u) {
    if (degree[u] >= 1 && !used[u]) {
      if (a < 0)
        a = u;
      else
        b = u;
    }
  }
  edges.emplace_back(a, b);
  return edges;
}

template <typename Fn>
void for_each_labeled_tree(int n, Fn&& fn) {
  if (n == 2) {
    fn(std::vector<std::pair<int, int>>{{0, 1}});
    return;
  }
  std::vector<int> seq(n - 2, 0);
  while (true) {
    fn(prufer_decode(seq, n));
    int pos = n - 3;
    while (pos >= 0 && seq[pos] == n - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
}

inline std::vector<std::pair<int, int>> random_labeled_tree(int n, std::mt19937_64& rng) {
  if (n == 2) return {{0, 1}};
  std::uniform_int_distribution<int> node(0, n - 1);
  std::vector<int> seq(n - 2);
  for (int& v : seq) v = node(rng);
  return prufer_decode(seq, n);
}

// Edges sorted by (min endpoint, max endpoint) and summed in that order, so
// two routes producing the same tree compare bit-exactly.
inline double canonical_tree_weight(std::vector<std::pair<int, int>> edges,
                                    const DistanceMatrix& d) {
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());
  double total = 0.0;
  for (const auto& [u, v] : edges) total += d.at(u, v);
  return total;
}

struct BruteForceMst {
  double weight = 0.0;
  std::vector<std::pair<int, int>> edges;  // sorted (min, max) pairs
};

inline BruteForceMst brute_force_mst(const DistanceMatrix& d) {
  const int n = static_cast<int>(d.n);
  BruteForceMst best;
  bool first = true;
  for_each_labeled_tree(n, [&](std::vector<std::pair<int, int>> edges) {
    const double w = canonical_tree_weight(edges, d);
    if (first || w < best.weight) {
      first = false;
      for (auto& [u, v] : edges)
        if (u > v) std::swap(u, v);
      std::sort(edges.begin(), edges.end());
      best.weight = w;
      best.edges = std::move(edges);
    }
  });
  return best;
}

// ---------------------------------------------------------------------------
// Optimal transport on the line, over mass quantized into unit tokens.

// Monotone matching of sorted token positions; optimal for 1-D transport.
inline double transport_sorted_tokens(const std::vector<int>& p_units,
                                      const std::vector<int>& q_units, int units) {
  std::vector<int> a, b;
  for (std::size_t i = 0; i < p_units.size(); ++i) {
    for (int k = 0; k < p_units[i]; ++k) a.push_back(static_cast<int>(i));
    for (int k = 0; k < q_units[i]; ++k) b.push_back(static_cast<int>(i));
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cost += std::abs(a[i] - b[i]);
  return cost / units;
}

// Exhaustive minimum over all token assignments; only viable for tiny unit
// counts but assumes nothing about monotone matchings.
inline double transport_all_assignments(const std::vector<int>& p_units,
                                        const std::vector<int>& q_units, int units) {
  std::vector<int> a, b;
  for (std::size_t i = 0; i < p_units.size(); ++i) {
    for (int k = 0; k < p_units[i]; ++k) a.push_back(static_cast<int>(i));
    for (int k = 0; k < q_units[i]; ++k) b.push_back(static_cast<int>(i));
  }
  std::sort(b.begin(), b.end());
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cost += std::abs(a[i] - b[i]);
    best = std::min(best, cost);
  } while (std::next_permutation(b.begin(), b.end()));
  return best / units;
}

// All length-len vectors of nonnegative ints summing to total.
inline std::vector<std::vector<int>> all_compositions(int total, int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(len, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == len - 1) {
      current[pos] = left;
      out.push_back(current);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      current[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

inline std::vector<double> units_to_vector(const std::vector<int>& units, int total) {
  std::vector<double> v(units.size());
  for (std::size_t i = 0; i < units.size(); ++i)
    v[i] = static_cast<double>(units[i]) / total;
  return v;
}

// ---------------------------------------------------------------------------

// Plain double loop over every ordered pair, no mirroring shortcuts.
inline DistanceMatrix naive_distance_matrix(const sequencer::SegmentView& seg,
                                            const sequencer::Metric& metric) {
  const std::size_t n = seg.data.rows();
  DistanceMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.values[i * n + j] = i == j ? 0.0 : metric.fn(seg.data.row(i), seg.data.row(j));
  return out;
}

// Uniform random symmetric matrix with zero diagonal.
inline DistanceMatrix random_distance_matrix(std::size_t n, std::mt19937_64& rng,
                                             double lo = 0.01, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, dist(rng));
  return d;
}

inline sequencer::SpanningTree path_tree(int n, double w = 1.0) {
  std::vector<WeightedEdge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return sequencer::SpanningTree(n, std::move(edges));
}

inline sequencer::SpanningTree star_tree(int n, int center, double w = 1.0) {
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i)
    if (i != center) edges.push_back({center, i, w});
  return sequencer::SpanningTree(n, std::move(edges));
}

}  // namespace oracles
