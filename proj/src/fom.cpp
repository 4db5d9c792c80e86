#include "sequencer/fom.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "sequencer/error.hpp"
#include "sequencer/metrics.hpp"

namespace sequencer {

FigureOfMerit normalized_elongation(const SpanningTree& tree) {
  FigureOfMerit fom;
  fom.n = static_cast<std::size_t>(tree.n_nodes());
  fom.eta = elongation(tree).eta;
  fom.eta_normalized = fom.eta / static_cast<double>(fom.n);
  int max_degree = 0;
  for (int u = 0; u < tree.n_nodes(); ++u) max_degree = std::max(max_degree, tree.degree(u));
  fom.clustering_warning = 4 * max_degree >= tree.n_nodes();
  return fom;
}

FigureOfMerit score_embedding(const EmbeddingCandidate& candidate) {
  const std::size_t n = candidate.points.rows();
  const std::size_t d = candidate.points.cols();
  if (n < 3) throw InputError("need at least 3 embedded points");
  if (d == 1)
    throw InputError(
        "1-D embeddings are trivially a perfect sequence (eta' is always one); "
        "supply 2-D coordinates");
  if (d != 2) throw InputError(fmt::format("expected 1 or 2 coordinates, got {}", d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c)
      if (!std::isfinite(candidate.points(i, c)))
        throw InputError(fmt::format("non-finite coordinate at point {}", i));

  DistanceMatrix dist(n, MatrixTag{"L2", -1, -1});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist.set(i, j, euclidean(candidate.points.row(i), candidate.points.row(j)));
  return normalized_elongation(minimum_spanning_tree(dist));
}

SelectionResult select_best(const std::vector<EmbeddingCandidate>& candidates) {
  if (candidates.empty()) throw ConfigError("no candidates to score");
  const std::size_t n = candidates.front().points.rows();
  for (const auto& c : candidates)
    if (c.points.rows() != n)
      throw InputError(fmt::format("candidate '{}' has {} points, expected {}",
                                   c.params_label, c.points.rows(), n));

  SelectionResult selection;
  selection.ranking.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    selection.ranking.push_back({candidates[i].params_label, score_embedding(candidates[i]), i});

  // Descending eta'; stable so ties keep first occurrence first.
  std::stable_sort(selection.ranking.begin(), selection.ranking.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.fom.eta_normalized > b.fom.eta_normalized;
                   });
  selection.best_label = selection.ranking.front().label;
  selection.best = selection.ranking.front().fom;
  return selection;
}

}  // namespace sequencer
