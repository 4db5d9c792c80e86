#pragma once

#include <string>
#include <vector>

#include "sequencer/graph.hpp"
#include "sequencer/matrix.hpp"

namespace sequencer {

// Points produced by an external embedding, one row per object, 1 or 2
// columns.
struct EmbeddingCandidate {
  Matrix points;
  std::string params_label;
};

struct FigureOfMerit {
  double eta = 0.0;
  double eta_normalized = 0.0;  // eta / N; approaches 1 when the tree is a path
  std::size_t n = 0;
  // Set when the tree has a hub of degree >= N/4, i.e. the embedding clusters
  // rather than stretches; elongation may not reflect sequence quality then.
  bool clustering_warning = false;
};

FigureOfMerit normalized_elongation(const SpanningTree& tree);

// Euclidean distances on the embedded points -> MST -> normalized elongation.
// 1-D candidates are rejected: a 1-D embedding is trivially a perfect
// sequence, so its elongation carries no information.
FigureOfMerit score_embedding(const EmbeddingCandidate& candidate);

struct RankedCandidate {
  std::string label;
  FigureOfMerit fom;
  std::size_t input_index = 0;
};

struct SelectionResult {
  std::string best_label;
  FigureOfMerit best;
  std::vector<RankedCandidate> ranking;  // descending eta', ties keep input order
};

SelectionResult select_best(const std::vector<EmbeddingCandidate>& candidates);

}  // namespace sequencer
