#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sequencer/matrix.hpp"

namespace sequencer {

// A collection of 1-D objects: one row per object, one column per pixel.
struct ObjectSet {
  Matrix values;
  std::vector<std::string> labels;  // empty, or one label per object

  std::size_t n_obj() const { return values.rows(); }
  std::size_t n_pix() const { return values.cols(); }
};

// Half-open pixel range of one segment.
struct SegmentBounds {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Binary decomposition of the pixel axis: scale l splits [0, n_pix) into 2^l
// contiguous segments whose sizes differ by at most one pixel.
struct ScaleGrid {
  std::size_t n_pix = 0;
  std::vector<int> scales;  // 0 .. max_scale
  std::vector<std::vector<SegmentBounds>> segment_bounds;  // indexed by scale

  int max_scale() const { return scales.empty() ? -1 : scales.back(); }
  std::size_t segments_at(int l) const { return segment_bounds[l].size(); }
  const SegmentBounds& bounds(int l, int m) const { return segment_bounds[l][m]; }
};

// One (scale, segment) slice of the dataset with every row normalized to unit
// sum.
struct SegmentView {
  int scale = 0;
  int segment_index = 0;
  Matrix data;  // n_obj x segment length, rows sum to 1
};

// Validates dimensions and finiteness. Input row order is preserved.
ObjectSet load_object_set(Matrix values, std::vector<std::string> labels = {});

// Builds scales 0..l_max where l_max is the smallest l for which segments
// shrink to about twenty pixels; max_depth overrides the automatic choice.
ScaleGrid build_scale_grid(std::size_t n_pix, std::optional<int> max_depth = std::nullopt);

// Extracts segment (l, m) and normalizes each row to unit sum. With
// offset_mode every row is first shifted by its own minimum, which makes
// negative-valued data usable with the probability-based metrics.
SegmentView segment_and_normalize(const ObjectSet& objects, const ScaleGrid& grid, int l,
                                  int m, bool offset_mode = false);

// The row-level normalization used by segment_and_normalize, for objects that
// are not part of the original set. object_index is used in error messages.
std::vector<double> normalize_segment_row(std::span<const double> raw, bool offset_mode,
                                          std::size_t object_index);

}  // namespace sequencer
