#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tcmap/image.hpp"

namespace tcmap {

// 256-bin intensity histogram of an 8-bit image.
struct Histogram256 {
    std::array<std::uint64_t, 256> bins{};
    std::uint64_t total = 0;
};

// Normalized histogram: 256 probabilities summing to 1.
using HistogramDist = std::array<double, 256>;

Histogram256 histogram_of(const ToneMapped8& img);
HistogramDist normalize(const Histogram256& hist);

// Per-pixel channel mean quantized to 8 bits; the scalar image the entropy
// and histogram metrics operate on for 3-channel outputs.
ToneMapped8 luminance_of(const ToneMappedImage& img);

// Shannon entropy in bits over the 256-bin normalized histogram, with
// 0*log(0) := 0. Bounded by [0, 8].
double entropy_bits(const HistogramDist& dist);
double image_entropy(const ToneMapped8& img);
double image_entropy(const ToneMappedImage& img);

// Uniform average of per-image normalized histograms.
HistogramDist average_histogram(const std::vector<HistogramDist>& dists);
HistogramDist average_histogram_of(const std::vector<ToneMapped8>& imgs);

// KL(p || q) in nats with additive smoothing then renormalization; the
// smoothing handles empty bins. Asymmetric: callers fix the direction as
// KL(task-A-average || task-B-average).
double histogram_kl(const HistogramDist& p, const HistogramDist& q, double smoothing = 1e-9);

} // namespace tcmap
