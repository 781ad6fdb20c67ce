#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tcmap/image.hpp"

namespace tcmap {

// Ordered temperature periods D_1..D_N; each D is the Celsius scale of one
// half-cycle of the sinusoidal embedding. Small D sharpens edges but wraps
// (aliasing artifacts), large D saturates.
struct PeriodSet {
    std::vector<double> periods;
    std::optional<std::uint64_t> seed;  // provenance when sampled

    int size() const { return static_cast<int>(periods.size()); }
    void validate() const;
};

// N independent uniform samples in [lo, hi], reproducible from the seed.
// The default range is the one that generalizes across outdoor scenes.
PeriodSet sample_periods(int n, std::uint64_t seed, double lo = 4.5, double hi = 45.0);

// N-channel sinusoidal embedding of a temperature map, channel-major
// (N x H x W), values in [0, 255]. Periods travel with the data so any
// derived tone-mapped output stays auditable.
struct ThermalEmbedding {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;
    PeriodSet periods;

    const float* channel(int c) const {
        return data.data() + static_cast<std::size_t>(c) * width * height;
    }
};

// Channel i, pixel p: 127.5 * sin(pi * I_C(p) / D_i) + 127.5, evaluated in
// double and stored as float. The ratio I_C/D is formed first so the half-
// and full-period anchor points land exactly.
ThermalEmbedding embed(const TemperatureMap& temp, const PeriodSet& periods);

// Per-channel 8-bit renderings for inspection/export.
std::vector<ToneMapped8> embedding_to_images(const ThermalEmbedding& emb);

} // namespace tcmap
