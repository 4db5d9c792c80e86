#include "sequencer/metrics.hpp"

#include <cmath>
#include <fmt/format.h>
#include <map>
#include <mutex>

#include "sequencer/error.hpp"
#include "sequencer/parallel.hpp"

namespace sequencer {

namespace {

void check_lengths(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw InputError(fmt::format("vector length mismatch: {} vs {}", p.size(), q.size()));
}

}  // namespace

double euclidean(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double kl_symmetrized(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  // Floor and renormalize both inputs so empty bins stay finite.
  double psum = 0.0, qsum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    psum += std::max(p[i], kKlEpsilon);
    qsum += std::max(q[i], kKlEpsilon);
  }
  double forward = 0.0, backward = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = std::max(p[i], kKlEpsilon) / psum;
    const double qi = std::max(q[i], kKlEpsilon) / qsum;
    const double log_ratio = std::log(pi / qi);
    forward += pi * log_ratio;
    backward -= qi * log_ratio;
  }
  // Jeffreys mean keeps the result symmetric and zero only for equal inputs.
  const double d = 0.5 * (forward + backward);
  return d < 0.0 ? 0.0 : d;
}

double emd_1d(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  double cum = 0.0, total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cum += p[i] - q[i];
    total += std::abs(cum);
  }
  return total;
}

double energy_1d(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q);
  double cum = 0.0, total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cum += p[i] - q[i];
    total += cum * cum;
  }
  return std::sqrt(2.0 * total);
}

namespace {

std::map<std::string, MetricFn>& custom_registry() {
  static std::map<std::string, MetricFn> registry;
  return registry;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

const std::vector<Metric>& default_metrics() {
  static const std::vector<Metric> metrics{
      {"L2", &euclidean},
      {"KL", &kl_symmetrized},
      {"EMD", &emd_1d},
      {"energy", &energy_1d},
  };
  return metrics;
}

void register_metric(const std::string& name, MetricFn fn) {
  if (!fn) throw ConfigError("metric function must not be null");
  for (const auto& m : default_metrics())
    if (m.name == name) throw ConfigError(fmt::format("metric '{}' already exists", name));
  std::lock_guard lock(registry_mutex());
  custom_registry()[name] = fn;
}

Metric metric_from_name(const std::string& name) {
  for (const auto& m : default_metrics())
    if (m.name == name) return m;
  {
    std::lock_guard lock(registry_mutex());
    auto it = custom_registry().find(name);
    if (it != custom_registry().end()) return {it->first, it->second};
  }
  throw ConfigError(fmt::format("unknown metric '{}' (expected L2, KL, EMD or energy)", name));
}

std::string MatrixTag::str() const {
  if (metric.empty()) return "combined";
  if (scale < 0) return metric;
  if (segment < 0) return fmt::format("{}/{}", metric, scale);
  return fmt::format("{}/{}/{}", metric, scale, segment);
}

DistanceMatrix distance_matrix(const SegmentView& seg, const Metric& metric,
                               unsigned threads) {
  const std::size_t n = seg.data.rows();
  DistanceMatrix out(n, MatrixTag{metric.name, seg.scale, seg.segment_index});

  parallel_for(n, threads, [&](std::size_t j1) {
    const auto row1 = seg.data.row(j1);
    for (std::size_t j2 = j1 + 1; j2 < n; ++j2) {
      double d;
      try {
        d = metric.fn(row1, seg.data.row(j2));
      } catch (const std::exception& e) {
        throw Error(fmt::format("metric {} failed on objects ({}, {}): {}", metric.name,
                                j1, j2, e.what()));
      }
      if (!std::isfinite(d) || d < 0.0)
        throw Error(fmt::format("metric {} returned invalid distance {} for objects ({}, {})",
                                metric.name, d, j1, j2));
      out.set(j1, j2, d);
    }
  });
  return out;
}

}  // namespace sequencer
