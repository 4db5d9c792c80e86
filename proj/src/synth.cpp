#include "sequencer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <random>

#include "sequencer/error.hpp"

namespace sequencer {

namespace {

// Stationary Gaussian process with squared-exponential covariance, drawn by
// convolving white noise with a Gaussian kernel of width corr_length/sqrt(2)
// and rescaling to unit variance. The noise is padded so edge pixels keep the
// same marginal variance.
std::vector<double> smooth_background(std::size_t n_pix, double corr_length,
                                      std::mt19937_64& rng) {
  const double kernel_sigma = corr_length / std::sqrt(2.0);
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * kernel_sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double norm2 = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * (k / kernel_sigma) * (k / kernel_sigma));
    kernel[k + radius] = v;
    norm2 += v * v;
  }
  const double scale = 1.0 / std::sqrt(norm2);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(n_pix + 2 * static_cast<std::size_t>(radius));
  for (double& v : noise) v = gauss(rng);

  std::vector<double> out(n_pix, 0.0);
  for (std::size_t i = 0; i < n_pix; ++i) {
    double sum = 0.0;
    for (int k = 0; k <= 2 * radius; ++k) sum += kernel[k] * noise[i + k];
    out[i] = sum * scale;
  }
  return out;
}

}  // namespace

PulseDataset generate_pulse_dataset(const PulseDatasetSpec& spec) {
  if (spec.n_obj < 3) throw ConfigError("need at least 3 objects");
  if (spec.n_pix < 2) throw ConfigError("need at least 2 pixels");
  if (spec.n_pulses < 1) throw ConfigError("need at least one pulse");

  const double n_pix = static_cast<double>(spec.n_pix);
  // Pulse tracks drift by a tenth of the pixel range across the sequence and
  // are spread so they stay strictly inside [0, n_pix) at both ends.
  const double drift = n_pix / 10.0;
  const double margin = 4.0 * std::max(spec.pulse_sigma, 1.0);
  const double usable = n_pix - 2.0 * margin - drift;
  if (usable <= 0.0) throw ConfigError("pulses would overflow the pixel range");

  std::vector<double> base(spec.n_pulses);
  for (std::size_t p = 0; p < spec.n_pulses; ++p)
    base[p] = margin + (spec.n_pulses == 1
                            ? usable / 2.0
                            : usable * static_cast<double>(p) /
                                  static_cast<double>(spec.n_pulses - 1));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> white(0.0, 1.0);
  Matrix values(spec.n_obj, spec.n_pix);
  for (std::size_t t = 0; t < spec.n_obj; ++t) {
    const double frac = static_cast<double>(t) / static_cast<double>(spec.n_obj - 1);
    auto row = values.row(t);

    if (spec.background_amplitude > 0.0) {
      const auto bg = smooth_background(spec.n_pix, spec.background_corr_length, rng);
      for (std::size_t i = 0; i < spec.n_pix; ++i) row[i] = spec.background_amplitude * bg[i];
    }
    if (spec.background_nugget > 0.0)
      for (std::size_t i = 0; i < spec.n_pix; ++i) row[i] += spec.background_nugget * white(rng);
    if (spec.baseline != 0.0)
      for (std::size_t i = 0; i < spec.n_pix; ++i)
        row[i] = std::max(row[i] + spec.baseline, 1e-6);

    for (std::size_t p = 0; p < spec.n_pulses; ++p) {
      const double center = base[p] + drift * frac;
      if (center < 0.0 || center >= n_pix)
        throw ConfigError(fmt::format("pulse {} overflows the pixel range", p));
      if (spec.pulse_sigma > 0.0) {
        for (std::size_t i = 0; i < spec.n_pix; ++i) {
          const double d = (static_cast<double>(i) - center) / spec.pulse_sigma;
          row[i] += std::exp(-0.5 * d * d);
        }
      } else {
        // Zero width collapses the pulse to a delta at the nearest pixel.
        const auto idx = static_cast<std::size_t>(std::llround(center));
        row[std::min(idx, spec.n_pix - 1)] += 1.0;
      }
    }
  }

  ObjectSet in_order{std::move(values), {}};
  ShuffledRows shuffled = shuffle_rows(in_order, spec.seed);

  PulseDataset out;
  out.objects = std::move(shuffled.objects);
  // Row r of the output is the object at trend position permutation[r].
  out.true_rank = std::move(shuffled.permutation);
  return out;
}

ShuffledRows shuffle_rows(const ObjectSet& input, std::uint64_t seed) {
  const std::size_t n = input.n_obj();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(perm.begin(), perm.end(), rng);

  ShuffledRows out;
  out.objects.values = Matrix(n, input.n_pix());
  for (std::size_t r = 0; r < n; ++r) {
    const auto src = input.values.row(static_cast<std::size_t>(perm[r]));
    std::copy(src.begin(), src.end(), out.objects.values.row(r).begin());
  }
  if (!input.labels.empty()) {
    out.objects.labels.reserve(n);
    for (std::size_t r = 0; r < n; ++r)
      out.objects.labels.push_back(input.labels[static_cast<std::size_t>(perm[r])]);
  }
  out.permutation = std::move(perm);
  return out;
}

}  // namespace sequencer
