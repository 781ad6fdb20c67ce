#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tcmap/error.hpp"

namespace tcmap {

// Quantization rule used for every float -> 8-bit conversion in the toolkit:
// round half away from zero (127.5 -> 128), then clamp to [0, 255].
inline std::uint8_t round_u8(double v) {
    double r = std::round(v);
    if (r <= 0.0) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

// Single-channel frame of raw sensor counts, row-major. Counts are stored
// widened to 32 bits so frames beyond 16-bit sensors stay representable.
struct RadiometricFrame {
    int width = 0;
    int height = 0;
    int bit_depth = 14;
    std::vector<std::uint32_t> counts;

    std::uint32_t max_count() const { return (1u << bit_depth) - 1u; }
    std::size_t pixel_count() const { return counts.size(); }

    void validate() const {
        if (width <= 0 || height <= 0)
            throw ValidationError("frame dimensions must be positive, got " +
                                  std::to_string(width) + "x" + std::to_string(height));
        if (bit_depth < 1 || bit_depth > 30)
            throw ValidationError("bit_depth out of range [1,30]: " + std::to_string(bit_depth));
        if (counts.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw ValidationError("count buffer length " + std::to_string(counts.size()) +
                                  " does not match " + std::to_string(width) + "x" +
                                  std::to_string(height));
        const std::uint32_t mc = max_count();
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > mc)
                throw ValidationError("count " + std::to_string(counts[i]) + " at pixel " +
                                      std::to_string(i) + " exceeds " +
                                      std::to_string(bit_depth) + "-bit range");
        }
    }
};

// Per-pixel absolute temperature in degrees Celsius, row-major.
struct TemperatureMap {
    int width = 0;
    int height = 0;
    std::vector<float> celsius;
};

// 8-bit tone-mapped grayscale image, row-major.
struct ToneMapped8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> gray;
};

// 3-channel float image, channel-major (3 x H x W), values in [0, 255].
struct ToneMappedImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    const float* channel(int c) const {
        return data.data() + static_cast<std::size_t>(c) * width * height;
    }
    float* channel(int c) {
        return data.data() + static_cast<std::size_t>(c) * width * height;
    }
};

} // namespace tcmap
