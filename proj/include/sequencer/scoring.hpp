#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sequencer/error.hpp"

namespace sequencer {

// Spearman rank correlation for tie-free rankings (both arguments must be
// permutations of 0..n-1 over the same objects).
inline double spearman_rank_correlation(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("rank vectors differ in length");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) throw Error("need at least two ranks");
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// Rank agreement between a discovered ordering and per-object ground-truth
// ranks: correlates sequence position with the true rank of the object found
// there. 1 is perfect recovery, -1 a perfect reversal.
inline double sequence_recovery_score(std::span<const int> ordering,
                                      std::span<const int> true_rank) {
  std::vector<int> positions(ordering.size());
  std::vector<int> truth(ordering.size());
  for (std::size_t s = 0; s < ordering.size(); ++s) {
    positions[s] = static_cast<int>(s);
    truth[s] = true_rank[static_cast<std::size_t>(ordering[s])];
  }
  return spearman_rank_correlation(positions, truth);
}

inline std::vector<int> invert_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

}  // namespace sequencer
