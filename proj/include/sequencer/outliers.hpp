#pragma once

#include <vector>

#include "sequencer/dataset.hpp"

namespace sequencer {

// Pixel-level residuals of an ordered dataset against its smoothed trend.
struct ResidualReport {
  Matrix residual;  // ordered minus smoothed, data units
  // Robust upper scale of each residual row: the kScoreQuantile quantile of
  // the absolute residuals (linear interpolation). A constant-offset row
  // scores exactly the offset, and corruption confined to a few percent of
  // the pixels still registers, which a median-based scale cannot do.
  std::vector<double> object_score;
};

inline constexpr double kScoreQuantile = 0.99;

// Per-pixel running median over a window sliding along the ordered object
// axis; edge windows are truncated. window must be odd and <= n_obj.
ObjectSet smooth_along_sequence(const ObjectSet& ordered, int window);

ResidualReport compute_residuals(const ObjectSet& ordered, const ObjectSet& smoothed);

// Objects whose score exceeds threshold times the median score.
std::vector<int> flag_outliers(const ResidualReport& report, double threshold);

// Spearman correlation between object score and distance from the nearer end
// of the sequence. Outliers gathering at the ends push this negative; it is a
// diagnostic only and plays no role in flagging.
double end_position_score_correlation(const ResidualReport& report);

}  // namespace sequencer
