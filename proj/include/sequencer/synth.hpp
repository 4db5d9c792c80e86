#pragma once

#include <cstdint>
#include <vector>

#include "sequencer/dataset.hpp"

namespace sequencer {

// Validation dataset: narrow Gaussian pulses drifting across the pixel range
// on top of a smooth random background riding a positive baseline.
//
// The background is a Gaussian process with a squared-exponential kernel plus
// a small white nugget. Without the nugget every deep-scale segment of the
// smooth component is just a straight slope, and after normalization those
// segments collapse onto a one-parameter family that reads as a strong fake
// trend. The baseline keeps the data positive so no bin is empty and the
// probability metrics stay informative.
struct PulseDatasetSpec {
  std::size_t n_obj = 200;
  std::size_t n_pix = 400;
  std::size_t n_pulses = 4;
  double pulse_sigma = 2.0;            // pixels; 0 collapses pulses to deltas
  double background_amplitude = 0.5;   // GP std relative to unit pulse height
  double background_corr_length = 50.0;  // pixels
  double background_nugget = 0.05;     // white component std
  double baseline = 3.0;               // constant offset, keeps values positive
  std::uint64_t seed = 0;
};

struct PulseDataset {
  ObjectSet objects;           // rows in seeded-shuffled order
  std::vector<int> true_rank;  // true_rank[row] = position along the trend
};

PulseDataset generate_pulse_dataset(const PulseDatasetSpec& spec);

struct ShuffledRows {
  ObjectSet objects;
  std::vector<int> permutation;  // objects.row(r) == input.row(permutation[r])
};

ShuffledRows shuffle_rows(const ObjectSet& input, std::uint64_t seed);

}  // namespace sequencer
