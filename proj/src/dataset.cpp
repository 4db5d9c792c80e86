#include "sequencer/dataset.hpp"

#include <cmath>
#include <fmt/format.h>

#include "sequencer/error.hpp"

namespace sequencer {

ObjectSet load_object_set(Matrix values, std::vector<std::string> labels) {
  if (values.rows() < 3) throw InputError("need at least 3 objects");
  if (values.cols() < 2) throw InputError("need at least 2 pixels per object");
  for (std::size_t j = 0; j < values.rows(); ++j) {
    for (std::size_t i = 0; i < values.cols(); ++i) {
      if (!std::isfinite(values(j, i)))
        throw InputError(fmt::format("non-finite value at ({}, {})", j, i));
    }
  }
  if (!labels.empty() && labels.size() != values.rows())
    throw InputError("label count does not match object count");
  return ObjectSet{std::move(values), std::move(labels)};
}

ScaleGrid build_scale_grid(std::size_t n_pix, std::optional<int> max_depth) {
  if (n_pix < 2) throw ConfigError("need at least 2 pixels");

  int l_max = 0;
  if (max_depth) {
    l_max = *max_depth;
    if (l_max < 0) throw ConfigError("max depth must be nonnegative");
  } else {
    // Smallest l with segments of about twenty pixels: 2^l * 20 >= n_pix.
    while ((std::size_t{20} << l_max) < n_pix) ++l_max;
  }

  ScaleGrid grid;
  grid.n_pix = n_pix;
  for (int l = 0; l <= l_max; ++l) {
    const std::size_t n_seg = std::size_t{1} << l;
    if (n_pix / n_seg < 2)
      throw ConfigError(
          fmt::format("scale {} would produce segments shorter than 2 pixels", l));
    std::vector<SegmentBounds> bounds;
    bounds.reserve(n_seg);
    // As even as possible; the first n_pix % n_seg segments take the extra
    // pixel.
    const std::size_t base = n_pix / n_seg;
    const std::size_t extra = n_pix % n_seg;
    std::size_t begin = 0;
    for (std::size_t m = 0; m < n_seg; ++m) {
      const std::size_t len = base + (m < extra ? 1 : 0);
      bounds.push_back({begin, begin + len});
      begin += len;
    }
    grid.scales.push_back(l);
    grid.segment_bounds.push_back(std::move(bounds));
  }
  return grid;
}

std::vector<double> normalize_segment_row(std::span<const double> raw, bool offset_mode,
                                          std::size_t object_index) {
  std::vector<double> row(raw.begin(), raw.end());
  if (offset_mode) {
    double min = row[0];
    for (double v : row) min = std::min(min, v);
    for (double& v : row) v -= min;
  } else {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] < 0.0)
        throw InputError(fmt::format(
            "negative value for object {} (segment position {}); enable offset mode "
            "or rescale the data",
            object_index, i));
    }
  }
  double sum = 0.0;
  for (double v : row) sum += v;
  if (sum <= 0.0)
    throw DegenerateError(fmt::format("degenerate segment for object {}", object_index));
  for (double& v : row) v /= sum;
  return row;
}

SegmentView segment_and_normalize(const ObjectSet& objects, const ScaleGrid& grid, int l,
                                  int m, bool offset_mode) {
  if (l < 0 || l > grid.max_scale()) throw ConfigError("scale out of range");
  if (m < 0 || static_cast<std::size_t>(m) >= grid.segments_at(l))
    throw ConfigError("segment index out of range");

  const auto& b = grid.bounds(l, m);
  SegmentView seg{l, m, Matrix(objects.n_obj(), b.size())};
  for (std::size_t j = 0; j < objects.n_obj(); ++j) {
    const auto raw = objects.values.row(j).subspan(b.begin, b.size());
    const auto norm = normalize_segment_row(raw, offset_mode, j);
    for (std::size_t i = 0; i < norm.size(); ++i) seg.data(j, i) = norm[i];
  }
  return seg;
}

}  // namespace sequencer
