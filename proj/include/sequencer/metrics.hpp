#pragma once

#include <span>
#include <string>
#include <vector>

#include "sequencer/dataset.hpp"

namespace sequencer {

// L2 norm of the elementwise difference.
double euclidean(std::span<const double> p, std::span<const double> q);

// Jeffreys-symmetrized Kullback-Leibler divergence in nats. Both inputs are
// floored at kKlEpsilon and renormalized so the result stays finite when bins
// are empty.
double kl_symmetrized(std::span<const double> p, std::span<const double> q);
inline constexpr double kKlEpsilon = 1e-12;

// Earth mover / 1-Wasserstein distance with unit index spacing: the L1 norm
// of the difference between cumulative sums.
double emd_1d(std::span<const double> p, std::span<const double> q);

// Energy distance, 1-D form: sqrt(2 * sum((P - Q)^2)) over cumulative sums.
double energy_1d(std::span<const double> p, std::span<const double> q);

using MetricFn = double (*)(std::span<const double>, std::span<const double>);

struct Metric {
  std::string name;
  MetricFn fn = nullptr;
  bool operator==(const Metric& other) const { return name == other.name; }
};

// L2, KL, EMD, energy.
const std::vector<Metric>& default_metrics();

// Looks up a default or registered metric; throws ConfigError for unknown
// names.
Metric metric_from_name(const std::string& name);

// Extension point for user-supplied metrics. The function must map two
// equal-length nonnegative normalized vectors to a finite nonnegative real
// that is zero for identical inputs.
void register_metric(const std::string& name, MetricFn fn);

// Identifies which view of the data a distance matrix describes.
struct MatrixTag {
  std::string metric;
  int scale = -1;
  int segment = -1;  // -1 once segments have been aggregated

  std::string str() const;
};

// Dense symmetric matrix with zero diagonal. Entries are finite and
// nonnegative.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;
  MatrixTag tag;

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t size, MatrixTag t = {})
      : n(size), values(size * size, 0.0), tag(std::move(t)) {}

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values[i * n + j] = v;
    values[j * n + i] = v;
  }
};

// Pairwise distances between the rows of a segment. Only the upper triangle
// is computed and mirrored; the result is identical for any thread count.
DistanceMatrix distance_matrix(const SegmentView& seg, const Metric& metric,
                               unsigned threads = 1);

}  // namespace sequencer
