#include "sequencer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "sequencer/error.hpp"

namespace sequencer {

DistanceMatrix aggregate_segments(const std::vector<DistanceMatrix>& matrices,
                                  const std::vector<double>& etas) {
  if (matrices.empty()) throw ConfigError("no matrices to aggregate");
  if (matrices.size() != etas.size())
    throw ConfigError("weight count does not match matrix count");
  const std::size_t n = matrices.front().n;
  double weight_sum = 0.0;
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    if (matrices[m].n != n) throw ConfigError("matrix size mismatch in aggregation");
    if (etas[m] < 0.0) throw ConfigError("aggregation weights must be nonnegative");
    weight_sum += etas[m];
  }
  if (weight_sum <= 0.0) throw ConfigError("aggregation weights sum to zero");

  DistanceMatrix out(n, MatrixTag{matrices.front().tag.metric, matrices.front().tag.scale, -1});
  for (std::size_t m = 0; m < matrices.size(); ++m) {
    const double w = etas[m];
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += w * matrices[m].values[i];
  }
  for (double& v : out.values) v /= weight_sum;
  return out;
}

ProximityMatrix build_proximity(const std::vector<SpanningTree>& trees,
                                const std::vector<double>& etas) {
  if (trees.empty()) throw ConfigError("no trees to combine");
  if (trees.size() != etas.size()) throw ConfigError("weight count does not match tree count");
  const int n = trees.front().n_nodes();
  double weight_sum = 0.0;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (trees[t].n_nodes() != n) throw ConfigError("tree node-set mismatch");
    if (etas[t] < 0.0) throw ConfigError("proximity weights must be nonnegative");
    weight_sum += etas[t];
  }
  if (weight_sum <= 0.0) throw ConfigError("proximity weights sum to zero");

  ProximityMatrix p(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < trees.size(); ++t)
    for (const auto& e : trees[t].edges()) p.add(e.u, e.v, etas[t]);
  for (auto& [key, value] : p.entries) value /= weight_sum;
  return p;
}

std::vector<WeightedEdge> proximity_to_distance(const ProximityMatrix& p) {
  std::vector<WeightedEdge> edges;
  edges.reserve(p.entries.size());
  for (const auto& [key, value] : p.entries) {
    if (value <= 0.0) continue;
    const int i = static_cast<int>(key / p.n);
    const int j = static_cast<int>(key % p.n);
    edges.push_back({i, j, 1.0 / value});
  }
  // The map iterates in hash order; sort for a deterministic edge list.
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  return edges;
}

namespace detail {

PipelineOutput run_full(const ObjectSet& objects, const PipelineConfig& config) {
  if (config.metrics.empty()) throw ConfigError("at least one metric is required");
  for (const auto& m : config.metrics)
    if (!m.fn) throw ConfigError(fmt::format("metric '{}' has no implementation", m.name));

  const ScaleGrid grid = build_scale_grid(objects.n_pix(), config.max_depth);
  const std::size_t n = objects.n_obj();

  SequencerResult result;
  result.grid_scales = grid.scales;
  for (const auto& m : config.metrics) result.metric_names.push_back(m.name);
  result.max_depth = config.max_depth;
  result.offset_mode = config.offset_mode;
  result.n_obj = n;
  result.n_pix = objects.n_pix();

  std::vector<SpanningTree> trees_kl;
  std::vector<double> weights_kl;
  double max_distance_seen = 0.0;

  // Scales outer so each segment is normalized once and shared by all
  // metrics; entries are reordered to (metric, scale) afterwards.
  struct KlSlot {
    ScaleEntry entry;
    std::vector<WeightedEdge> tree;
  };
  std::vector<std::vector<KlSlot>> slots(config.metrics.size());
  for (auto& s : slots) s.resize(grid.scales.size());

  for (std::size_t li = 0; li < grid.scales.size(); ++li) {
    const int l = grid.scales[li];
    std::vector<SegmentView> segments;
    segments.reserve(grid.segments_at(l));
    for (std::size_t m = 0; m < grid.segments_at(l); ++m)
      segments.push_back(
          segment_and_normalize(objects, grid, l, static_cast<int>(m), config.offset_mode));

    for (std::size_t ki = 0; ki < config.metrics.size(); ++ki) {
      const Metric& metric = config.metrics[ki];
      // Accumulate the weighted mean segment by segment, in segment order, so
      // the result is bit-identical to aggregate_segments without holding
      // every segment matrix at once.
      DistanceMatrix d_kl(n, MatrixTag{metric.name, l, -1});
      std::vector<double> seg_etas;
      double seg_weight_sum = 0.0;
      for (const auto& seg : segments) {
        const DistanceMatrix d = distance_matrix(seg, metric, config.threads);
        for (std::size_t i = 0; i < d.n; ++i)
          for (std::size_t j = i + 1; j < d.n; ++j)
            max_distance_seen = std::max(max_distance_seen, d.at(i, j));
        const SpanningTree tree = minimum_spanning_tree(d);
        const double eta = elongation(tree).eta;
        seg_etas.push_back(eta);
        const double w = config.weight(eta);
        if (w < 0.0) throw ConfigError("aggregation weights must be nonnegative");
        seg_weight_sum += w;
        for (std::size_t i = 0; i < d_kl.values.size(); ++i)
          d_kl.values[i] += w * d.values[i];
      }
      if (seg_weight_sum <= 0.0) throw ConfigError("aggregation weights sum to zero");
      for (double& v : d_kl.values) v /= seg_weight_sum;

      SpanningTree tree_kl = minimum_spanning_tree(d_kl);
      const double eta_kl = elongation(tree_kl).eta;

      KlSlot& slot = slots[ki][li];
      slot.entry.metric = metric.name;
      slot.entry.scale = l;
      slot.entry.eta_per_segment = std::move(seg_etas);
      slot.entry.eta = eta_kl;
      double offdiag_sum = 0.0;
      for (std::size_t i = 0; i < d_kl.n; ++i)
        for (std::size_t j = i + 1; j < d_kl.n; ++j) offdiag_sum += d_kl.at(i, j);
      slot.entry.mean_distance = offdiag_sum / (0.5 * static_cast<double>(n) * (n - 1));
      if (config.collect_diagnostics)
        slot.entry.ordering = bfs_walk(tree_kl, least_connected_node(tree_kl));
      slot.tree = tree_kl.edges();
    }
  }

  if (max_distance_seen <= 0.0)
    throw DegenerateError("all objects are identical; no sequence exists");

  // Canonical (metric, scale) order for aggregation and reporting.
  for (std::size_t ki = 0; ki < slots.size(); ++ki) {
    for (auto& slot : slots[ki]) {
      trees_kl.emplace_back(static_cast<int>(n), std::move(slot.tree));
      weights_kl.push_back(config.weight(slot.entry.eta));
      result.scales.push_back(std::move(slot.entry));
    }
  }

  PipelineOutput out;
  out.proximity = build_proximity(trees_kl, weights_kl);
  for (double w : weights_kl) out.weight_sum += w;

  const SpanningTree combined =
      minimum_spanning_tree(static_cast<int>(n), proximity_to_distance(out.proximity));
  result.start_node = least_connected_node(combined);
  result.ordering = bfs_walk(combined, result.start_node);
  result.eta_combined = elongation(combined, result.start_node).eta;
  result.tree_edges = combined.edges();

  out.result = std::move(result);
  return out;
}

}  // namespace detail

SequencerResult run(const ObjectSet& objects, const PipelineConfig& config) {
  return detail::run_full(objects, config).result;
}

}  // namespace sequencer
