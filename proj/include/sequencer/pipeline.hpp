#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sequencer/dataset.hpp"
#include "sequencer/graph.hpp"
#include "sequencer/metrics.hpp"

namespace sequencer {

struct PipelineConfig {
  std::vector<Metric> metrics = default_metrics();
  std::optional<int> max_depth;  // scale grid override
  bool offset_mode = false;
  bool collect_diagnostics = false;  // keep per metric/scale orderings
  unsigned threads = 0;              // 0 = one worker per hardware thread
  // Optional monotone transform of the elongations used as aggregation
  // weights; identity when unset.
  std::function<double(double)> eta_weight;

  double weight(double eta) const { return eta_weight ? eta_weight(eta) : eta; }
};

// Sparse symmetric accumulation of elongation-weighted tree edges. Keys hold
// the upper triangle only; the diagonal is semantically infinite.
struct ProximityMatrix {
  std::size_t n = 0;
  std::unordered_map<std::uint64_t, double> entries;

  explicit ProximityMatrix(std::size_t size = 0) : n(size) {}

  static std::uint64_t key(std::size_t i, std::size_t j, std::size_t n) {
    return (i < j ? i : j) * n + (i < j ? j : i);
  }
  void add(std::size_t i, std::size_t j, double w) { entries[key(i, j, n)] += w; }
  double at(std::size_t i, std::size_t j) const {
    auto it = entries.find(key(i, j, n));
    return it == entries.end() ? 0.0 : it->second;
  }
};

// Everything retained for one (metric, scale) pair.
struct ScaleEntry {
  std::string metric;
  int scale = 0;
  std::vector<double> eta_per_segment;  // eta_klm, segment order
  double eta = 0.0;                     // elongation of MST(D_kl)
  double mean_distance = 0.0;           // mean off-diagonal of D_kl
  std::optional<std::vector<int>> ordering;  // diagnostic BFS walk of MST(D_kl)
};

struct SequencerResult {
  std::vector<int> ordering;  // ordering[s] = object index at sequence position s
  int start_node = 0;
  double eta_combined = 0.0;
  std::vector<ScaleEntry> scales;  // ordered by (metric, scale)
  std::vector<int> grid_scales;
  std::vector<WeightedEdge> tree_edges;  // final combined MST

  // Echo of the configuration that produced the result, enough to re-derive
  // pair distances for later insertions.
  std::vector<std::string> metric_names;
  std::optional<int> max_depth;
  bool offset_mode = false;
  std::size_t n_obj = 0;
  std::size_t n_pix = 0;
};

// Elongation-weighted mean of per-segment distance matrices (fixed metric and
// scale). Weights must be nonnegative with a positive sum.
DistanceMatrix aggregate_segments(const std::vector<DistanceMatrix>& matrices,
                                  const std::vector<double>& etas);

// Accumulates eta-weighted edge indicators of per-(metric, scale) trees,
// normalized by the weight sum. Unpopulated pairs stay zero.
ProximityMatrix build_proximity(const std::vector<SpanningTree>& trees,
                                const std::vector<double>& etas);

// Reciprocal of the populated proximity entries as a sparse edge list;
// unpopulated pairs carry no edge.
std::vector<WeightedEdge> proximity_to_distance(const ProximityMatrix& p);

// The full pipeline: per (metric, scale, segment) distance matrices and tree
// elongations, aggregation into a combined sparse graph, and a breadth-first
// sequence from its least connected node.
SequencerResult run(const ObjectSet& objects, const PipelineConfig& config);

namespace detail {

// run() plus the intermediates the approximate mode grows from.
struct PipelineOutput {
  SequencerResult result;
  ProximityMatrix proximity{0};
  double weight_sum = 0.0;  // normalizer of the proximity accumulation
};

PipelineOutput run_full(const ObjectSet& objects, const PipelineConfig& config);

}  // namespace detail

}  // namespace sequencer
