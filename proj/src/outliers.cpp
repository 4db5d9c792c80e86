#include "sequencer/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <vector>

#include "sequencer/error.hpp"
#include "sequencer/parallel.hpp"
#include "sequencer/scoring.hpp"

namespace sequencer {

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

// Quantile with linear interpolation between order statistics.
double quantile_inplace(std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo_idx = static_cast<std::size_t>(pos);
  std::nth_element(v.begin(), v.begin() + lo_idx, v.end());
  const double lo = v[lo_idx];
  if (lo_idx + 1 == v.size()) return lo;
  const double hi = *std::min_element(v.begin() + lo_idx + 1, v.end());
  return lo + (pos - static_cast<double>(lo_idx)) * (hi - lo);
}

}  // namespace

ObjectSet smooth_along_sequence(const ObjectSet& ordered, int window) {
  if (window < 1 || window % 2 == 0) throw ConfigError("window must be odd and positive");
  if (static_cast<std::size_t>(window) > ordered.n_obj())
    throw ConfigError(fmt::format("window {} exceeds the {} objects", window, ordered.n_obj()));

  const std::size_t n = ordered.n_obj();
  const std::size_t n_pix = ordered.n_pix();
  const int half = window / 2;

  ObjectSet smoothed;
  smoothed.values = Matrix(n, n_pix);
  smoothed.labels = ordered.labels;

  // Columns are independent.
  parallel_for(n_pix, 0, [&](std::size_t c) {
    std::vector<double> win;
    win.reserve(static_cast<std::size_t>(window));
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t lo = t >= static_cast<std::size_t>(half) ? t - half : 0;
      const std::size_t hi = std::min(n - 1, t + half);
      win.clear();
      for (std::size_t s = lo; s <= hi; ++s) win.push_back(ordered.values(s, c));
      smoothed.values(t, c) = median_inplace(win);
    }
  });
  return smoothed;
}

ResidualReport compute_residuals(const ObjectSet& ordered, const ObjectSet& smoothed) {
  if (ordered.n_obj() != smoothed.n_obj() || ordered.n_pix() != smoothed.n_pix())
    throw InputError("ordered and smoothed shapes differ");

  ResidualReport report;
  report.residual = Matrix(ordered.n_obj(), ordered.n_pix());
  report.object_score.resize(ordered.n_obj());
  std::vector<double> abs_row(ordered.n_pix());
  for (std::size_t j = 0; j < ordered.n_obj(); ++j) {
    for (std::size_t i = 0; i < ordered.n_pix(); ++i) {
      const double r = ordered.values(j, i) - smoothed.values(j, i);
      report.residual(j, i) = r;
      abs_row[i] = std::abs(r);
    }
    report.object_score[j] = quantile_inplace(abs_row, kScoreQuantile);
  }
  return report;
}

std::vector<int> flag_outliers(const ResidualReport& report, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("threshold must be positive");
  if (std::isinf(threshold)) return {};  // limit case
  std::vector<double> scores = report.object_score;
  const double med = median_inplace(scores);
  std::vector<int> flagged;
  for (std::size_t j = 0; j < report.object_score.size(); ++j)
    if (report.object_score[j] > threshold * med) flagged.push_back(static_cast<int>(j));
  return flagged;
}

double end_position_score_correlation(const ResidualReport& report) {
  const std::size_t n = report.object_score.size();
  if (n < 3) return 0.0;
  // Rank scores and distances from the nearer sequence end, then correlate.
  std::vector<int> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  std::vector<int> score_rank(n), end_rank(n);

  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return report.object_score[static_cast<std::size_t>(a)] <
           report.object_score[static_cast<std::size_t>(b)];
  });
  for (std::size_t r = 0; r < n; ++r) score_rank[static_cast<std::size_t>(idx[r])] = static_cast<int>(r);

  auto end_distance = [n](std::size_t t) { return std::min(t, n - 1 - t); };
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return end_distance(static_cast<std::size_t>(a)) < end_distance(static_cast<std::size_t>(b));
  });
  for (std::size_t r = 0; r < n; ++r) end_rank[static_cast<std::size_t>(idx[r])] = static_cast<int>(r);

  return spearman_rank_correlation(score_rank, end_rank);
}

}  // namespace sequencer
