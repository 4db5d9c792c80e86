#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sequencer/pipeline.hpp"

namespace sequencer {

// Settings for the subset-then-populate mode used on large datasets.
struct ApproxConfig {
  std::size_t subset_size = 0;   // N_s, objects in the skeleton run
  double anchor_fraction = 0.2;  // f_A in (0, 1]
  std::size_t batch_size = 0;    // objects placed per iteration; 0 = anchors/2
  std::uint64_t seed = 0;
};

struct ApproxIteration {
  std::size_t sequence_length = 0;  // before the batch was committed
  std::size_t anchor_count = 0;
  std::size_t batch = 0;
};

// Runs the full pipeline on a seeded uniform subset, then grows the sequence:
// each remaining object is placed by a coarse search against anchor nodes
// followed by a fine search between its two nearest anchors, its best edge per
// (metric, scale) is accumulated into the proximity matrix with the skeleton's
// elongation weights, and the tree and sequence are rebuilt per batch.
SequencerResult run_approx(const ObjectSet& objects, const ApproxConfig& approx,
                           const PipelineConfig& config,
                           std::vector<ApproxIteration>* trace = nullptr);

// Places one new object next to its nearest neighbor in combined-distance
// terms, on the side that adds the least path cost. Returns the updated
// ordering; the new object has index n_obj. No global recomputation.
std::vector<int> insert_object(const SequencerResult& result, const ObjectSet& objects,
                               std::span<const double> new_object,
                               const PipelineConfig& config);

}  // namespace sequencer
