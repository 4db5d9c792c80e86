#include "sequencer/approx.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <random>

#include "sequencer/error.hpp"
#include "sequencer/parallel.hpp"

namespace sequencer {

namespace {

// Recomputes pair distances for objects that were not part of a finished run:
// per (metric, scale) the segment distances are combined with the frozen
// segment elongation weights, mirroring the aggregation used by the pipeline.
class PairDistanceContext {
 public:
  PairDistanceContext(const ObjectSet& objects, const SequencerResult& result,
                      const PipelineConfig& config)
      : objects_(objects),
        grid_(build_scale_grid(result.n_pix, result.max_depth)),
        offset_mode_(result.offset_mode) {
    entries_.reserve(result.scales.size());
    for (const auto& entry : result.scales) {
      KlEntry kl;
      kl.metric = metric_from_name(entry.metric);
      kl.scale_index = entry.scale;
      kl.weight = config.weight(entry.eta);
      kl.scale_factor = entry.mean_distance > 0.0 ? entry.mean_distance : 1.0;
      double sum = 0.0;
      for (double eta : entry.eta_per_segment) {
        kl.segment_weights.push_back(config.weight(eta));
        sum += kl.segment_weights.back();
      }
      if (sum <= 0.0)
        throw ConfigError(fmt::format("segment weights for {}/{} sum to zero",
                                      entry.metric, entry.scale));
      kl.segment_weight_sum = sum;
      entries_.push_back(std::move(kl));
    }
    // Per-scale normalized rows of every existing object, built up front so
    // lookups are safe from parallel workers.
    normalized_.resize(grid_.scales.size());
    for (int l : grid_.scales) {
      Matrix& cache = normalized_[l];
      cache = Matrix(objects_.n_obj(), objects_.n_pix());
      for (std::size_t j = 0; j < objects_.n_obj(); ++j) {
        const auto row = normalize_row(objects_.values.row(j), l, j);
        std::copy(row.begin(), row.end(), cache.row(j).begin());
      }
    }
  }

  std::size_t kl_count() const { return entries_.size(); }
  double weight(std::size_t kl) const { return entries_[kl].weight; }
  double scale_factor(std::size_t kl) const { return entries_[kl].scale_factor; }
  const ScaleGrid& grid() const { return grid_; }

  // Full row normalized segment by segment at scale l.
  std::vector<double> normalize_row(std::span<const double> raw, int l,
                                    std::size_t object_index) const {
    std::vector<double> row(raw.size());
    for (std::size_t m = 0; m < grid_.segments_at(l); ++m) {
      const auto& b = grid_.bounds(l, static_cast<int>(m));
      const auto norm =
          normalize_segment_row(raw.subspan(b.begin, b.size()), offset_mode_, object_index);
      std::copy(norm.begin(), norm.end(), row.begin() + b.begin);
    }
    return row;
  }

  std::span<const double> member_row(int l, std::size_t obj) const {
    return normalized_[l].row(obj);
  }

  // Both rows must already be normalized at this entry's scale.
  double distance(std::size_t kl, std::span<const double> row_a,
                  std::span<const double> row_b) const {
    const KlEntry& e = entries_[kl];
    double sum = 0.0;
    for (std::size_t m = 0; m < e.segment_weights.size(); ++m) {
      const auto& b = grid_.bounds(e.scale_index, static_cast<int>(m));
      sum += e.segment_weights[m] *
             e.metric.fn(row_a.subspan(b.begin, b.size()), row_b.subspan(b.begin, b.size()));
    }
    return sum / e.segment_weight_sum;
  }

  double distance_members(std::size_t kl, std::size_t obj_a, std::size_t obj_b) const {
    const int l = entries_[kl].scale_index;
    return distance(kl, member_row(l, obj_a), member_row(l, obj_b));
  }

  int scale_of(std::size_t kl) const { return entries_[kl].scale_index; }

  // Weight-averaged distance over all (metric, scale) entries, each rescaled
  // by its mean combined-stage distance so units cancel.
  double combined_distance_members(std::size_t obj_a, std::size_t obj_b) const {
    double num = 0.0, den = 0.0;
    for (std::size_t kl = 0; kl < entries_.size(); ++kl) {
      num += entries_[kl].weight * distance_members(kl, obj_a, obj_b) /
             entries_[kl].scale_factor;
      den += entries_[kl].weight;
    }
    if (den <= 0.0) throw ConfigError("combined weights sum to zero");
    return num / den;
  }

 private:
  struct KlEntry {
    Metric metric;
    int scale_index = 0;
    double weight = 0.0;
    double scale_factor = 1.0;
    std::vector<double> segment_weights;
    double segment_weight_sum = 0.0;
  };

  const ObjectSet& objects_;
  ScaleGrid grid_;
  bool offset_mode_;
  std::vector<KlEntry> entries_;
  std::vector<Matrix> normalized_;
};

std::vector<std::size_t> anchor_positions(std::size_t length, std::size_t count) {
  // Uniformly spaced sequence positions, both endpoints included.
  std::vector<std::size_t> positions;
  positions.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t pos =
        count == 1 ? 0
                   : static_cast<std::size_t>(std::llround(
                         static_cast<double>(r) * static_cast<double>(length - 1) /
                         static_cast<double>(count - 1)));
    if (positions.empty() || positions.back() != pos) positions.push_back(pos);
  }
  return positions;
}

void validate_approx(const ApproxConfig& approx, std::size_t n_obj) {
  if (approx.subset_size < 3) throw ConfigError("subset size must be at least 3");
  if (approx.subset_size > n_obj)
    throw ConfigError("subset size exceeds the number of objects");
  if (!(approx.anchor_fraction > 0.0) || approx.anchor_fraction > 1.0)
    throw ConfigError("anchor fraction must be in (0, 1]");
}

std::size_t anchor_count(double fraction, std::size_t length) {
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(length))));
}

}  // namespace

SequencerResult run_approx(const ObjectSet& objects, const ApproxConfig& approx,
                           const PipelineConfig& config,
                           std::vector<ApproxIteration>* trace) {
  validate_approx(approx, objects.n_obj());
  const std::size_t n = objects.n_obj();
  const std::size_t n_s = approx.subset_size;

  std::size_t batch_size = approx.batch_size;
  if (batch_size == 0) batch_size = std::max<std::size_t>(1, anchor_count(approx.anchor_fraction, n_s) / 2);
  // The anchor count only grows with the sequence, so checking the first
  // iteration is enough.
  if (batch_size >= anchor_count(approx.anchor_fraction, n_s))
    throw ConfigError(fmt::format(
        "batch size {} must be smaller than the anchor count {} of the initial sequence",
        batch_size, anchor_count(approx.anchor_fraction, n_s)));

  std::mt19937_64 rng(approx.seed);

  // Seeded uniform subset, kept in input order.
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<std::size_t> subset(ids.begin(), ids.begin() + n_s);
  std::sort(subset.begin(), subset.end());
  std::vector<std::size_t> remaining(ids.begin() + n_s, ids.end());
  std::shuffle(remaining.begin(), remaining.end(), rng);

  ObjectSet skeleton_set;
  skeleton_set.values = Matrix(n_s, objects.n_pix());
  for (std::size_t j = 0; j < n_s; ++j) {
    const auto src = objects.values.row(subset[j]);
    std::copy(src.begin(), src.end(), skeleton_set.values.row(j).begin());
  }
  if (!objects.labels.empty()) {
    skeleton_set.labels.reserve(n_s);
    for (std::size_t j = 0; j < n_s; ++j) skeleton_set.labels.push_back(objects.labels[subset[j]]);
  }

  detail::PipelineOutput skeleton = detail::run_full(skeleton_set, config);

  // Remap the skeleton to global object ids.
  SequencerResult result = std::move(skeleton.result);
  result.n_obj = n;
  auto to_global = [&](int local) { return static_cast<int>(subset[static_cast<std::size_t>(local)]); };
  for (int& v : result.ordering) v = to_global(v);
  result.start_node = to_global(result.start_node);
  for (auto& e : result.tree_edges) {
    e.u = to_global(e.u);
    e.v = to_global(e.v);
  }
  for (auto& entry : result.scales)
    if (entry.ordering)
      for (int& v : *entry.ordering) v = to_global(v);

  ProximityMatrix proximity(n);
  for (const auto& [key, value] : skeleton.proximity.entries) {
    const std::size_t i = subset[key / skeleton.proximity.n];
    const std::size_t j = subset[key % skeleton.proximity.n];
    proximity.add(i, j, value);
  }
  const double weight_sum = skeleton.weight_sum;

  if (remaining.empty()) {
    if (trace) trace->clear();
    return result;
  }

  PairDistanceContext ctx(objects, result, config);
  std::vector<int> sequence = result.ordering;

  std::size_t next = 0;
  while (next < remaining.size()) {
    const std::size_t length = sequence.size();
    const std::size_t n_anchor = anchor_count(approx.anchor_fraction, length);
    const std::size_t batch = std::min(batch_size, remaining.size() - next);
    if (trace) trace->push_back({length, n_anchor, batch});

    const auto anchors = anchor_positions(length, n_anchor);

    // Every new object in the batch votes, per (metric, scale), for its
    // nearest sequence member: coarse pass over the anchors, fine pass over
    // the stretch between the two nearest ones.
    struct Vote {
      std::size_t member;
      double weight;
    };
    std::vector<std::vector<Vote>> votes(batch);

    parallel_for(batch, config.threads, [&](std::size_t b) {
      const std::size_t gx = remaining[next + b];
      std::vector<std::vector<double>> x_rows(ctx.grid().scales.size());
      for (int l : ctx.grid().scales)
        x_rows[l] = ctx.normalize_row(objects.values.row(gx), l, gx);

      for (std::size_t kl = 0; kl < ctx.kl_count(); ++kl) {
        const int l = ctx.scale_of(kl);
        const auto& x_row = x_rows[static_cast<std::size_t>(l)];

        std::size_t best1 = anchors[0], best2 = anchors[0];
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        for (const std::size_t pos : anchors) {
          const double d =
              ctx.distance(kl, x_row, ctx.member_row(l, static_cast<std::size_t>(sequence[pos])));
          if (d < d1) {
            d2 = d1;
            best2 = best1;
            d1 = d;
            best1 = pos;
          } else if (d < d2) {
            d2 = d;
            best2 = pos;
          }
        }

        const std::size_t lo = std::min(best1, best2);
        const std::size_t hi = std::max(best1, best2);
        std::size_t best_member = static_cast<std::size_t>(sequence[lo]);
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t pos = lo; pos <= hi; ++pos) {
          const double d =
              ctx.distance(kl, x_row, ctx.member_row(l, static_cast<std::size_t>(sequence[pos])));
          if (d < best_d) {
            best_d = d;
            best_member = static_cast<std::size_t>(sequence[pos]);
          }
        }
        votes[b].push_back({best_member, ctx.weight(kl)});
      }
    });

    // Commit in batch order so accumulation is independent of worker count.
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t gx = remaining[next + b];
      for (const auto& vote : votes[b]) proximity.add(gx, vote.member, vote.weight / weight_sum);
    }

    // Rebuild the combined tree over the grown node set and re-extract the
    // sequence.
    std::vector<std::size_t> active;
    active.reserve(length + batch);
    for (int v : sequence) active.push_back(static_cast<std::size_t>(v));
    for (std::size_t b = 0; b < batch; ++b) active.push_back(remaining[next + b]);
    std::sort(active.begin(), active.end());

    std::vector<int> compact(n, -1);
    for (std::size_t c = 0; c < active.size(); ++c) compact[active[c]] = static_cast<int>(c);

    std::vector<WeightedEdge> edges;
    edges.reserve(proximity.entries.size());
    for (const auto& [key, value] : proximity.entries) {
      if (value <= 0.0) continue;
      edges.push_back({compact[key / n], compact[key % n], 1.0 / value});
    }
    std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      if (a.u != b.u) return a.u < b.u;
      return a.v < b.v;
    });

    const SpanningTree tree = minimum_spanning_tree(static_cast<int>(active.size()), edges);
    const int start = least_connected_node(tree);
    const auto walk = bfs_walk(tree, start);
    sequence.clear();
    for (int c : walk) sequence.push_back(static_cast<int>(active[static_cast<std::size_t>(c)]));

    next += batch;

    if (next == remaining.size()) {
      result.ordering = sequence;
      result.start_node = static_cast<int>(active[static_cast<std::size_t>(start)]);
      result.eta_combined = elongation(tree, start).eta;
      result.tree_edges.clear();
      for (const auto& e : tree.edges())
        result.tree_edges.push_back({static_cast<int>(active[static_cast<std::size_t>(e.u)]),
                                     static_cast<int>(active[static_cast<std::size_t>(e.v)]),
                                     e.w});
    }
  }

  return result;
}

std::vector<int> insert_object(const SequencerResult& result, const ObjectSet& objects,
                               std::span<const double> new_object,
                               const PipelineConfig& config) {
  if (new_object.size() != objects.n_pix())
    throw InputError(fmt::format("new object has {} pixels, expected {}", new_object.size(),
                                 objects.n_pix()));
  if (result.ordering.size() != objects.n_obj())
    throw InputError("result ordering does not match the object set");
  for (double v : new_object)
    if (!std::isfinite(v)) throw InputError("non-finite value in new object");

  PairDistanceContext ctx(objects, result, config);
  const auto& seq = result.ordering;
  const std::size_t length = seq.size();

  // Normalize the incoming object once per scale.
  std::vector<std::vector<double>> x_rows(ctx.grid().scales.size());
  for (std::size_t li = 0; li < x_rows.size(); ++li)
    x_rows[li] = ctx.normalize_row(new_object, ctx.grid().scales[li], objects.n_obj());

  double weight_total = 0.0;
  for (std::size_t kl = 0; kl < ctx.kl_count(); ++kl) weight_total += ctx.weight(kl);
  if (weight_total <= 0.0) throw ConfigError("combined weights sum to zero");

  // Combined distance from the new object to every sequence member.
  std::vector<double> dist(length);
  parallel_for(length, config.threads, [&](std::size_t pos) {
    const std::size_t member = static_cast<std::size_t>(seq[pos]);
    double num = 0.0;
    for (std::size_t kl = 0; kl < ctx.kl_count(); ++kl) {
      const int l = ctx.scale_of(kl);
      num += ctx.weight(kl) *
             ctx.distance(kl, x_rows[static_cast<std::size_t>(l)], ctx.member_row(l, member)) /
             ctx.scale_factor(kl);
    }
    dist[pos] = num / weight_total;
  });

  std::size_t t = 0;
  for (std::size_t pos = 1; pos < length; ++pos)
    if (dist[pos] < dist[t]) t = pos;

  const auto member_distance = [&](std::size_t pos_a, std::size_t pos_b) {
    return ctx.combined_distance_members(static_cast<std::size_t>(seq[pos_a]),
                                         static_cast<std::size_t>(seq[pos_b]));
  };

  // Added path cost of the two slots adjacent to the nearest neighbor; an end
  // slot only adds the single new edge.
  const double cost_before =
      t == 0 ? dist[0] : dist[t - 1] + dist[t] - member_distance(t - 1, t);
  const double cost_after =
      t == length - 1 ? dist[t] : dist[t] + dist[t + 1] - member_distance(t, t + 1);

  std::vector<int> updated = seq;
  const std::size_t slot = cost_before < cost_after ? t : t + 1;
  updated.insert(updated.begin() + static_cast<std::ptrdiff_t>(slot),
                 static_cast<int>(objects.n_obj()));
  return updated;
}

}  // namespace sequencer
