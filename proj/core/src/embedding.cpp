#include "tcmap/embedding.hpp"

#include <cmath>
#include <string>

#include "tcmap/error.hpp"
#include "tcmap/rng.hpp"

namespace tcmap {

void PeriodSet::validate() const {
    if (periods.empty()) throw ValidationError("period set must hold at least one period");
    for (std::size_t i = 0; i < periods.size(); ++i)
        if (!(periods[i] > 0.0))
            throw ValidationError("period D_" + std::to_string(i + 1) + " = " +
                                  std::to_string(periods[i]) + " must be positive");
}

PeriodSet sample_periods(int n, std::uint64_t seed, double lo, double hi) {
    if (n < 1) throw ValidationError("period count must be >= 1");
    if (!(lo > 0.0) || !(hi >= lo))
        throw ValidationError("period range must satisfy 0 < lo <= hi, got [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    Rng rng(seed);
    PeriodSet set;
    set.seed = seed;
    set.periods.resize(n);
    for (int i = 0; i < n; ++i) set.periods[i] = rng.uniform(lo, hi);
    return set;
}

ThermalEmbedding embed(const TemperatureMap& temp, const PeriodSet& periods) {
    periods.validate();
    if (temp.width <= 0 || temp.height <= 0 ||
        temp.celsius.size() != static_cast<std::size_t>(temp.width) * temp.height)
        throw ValidationError("temperature map has inconsistent dimensions");

    ThermalEmbedding emb;
    emb.width = temp.width;
    emb.height = temp.height;
    emb.channels = periods.size();
    emb.periods = periods;
    const std::size_t plane = temp.celsius.size();
    emb.data.resize(plane * emb.channels);

    for (int k = 0; k < emb.channels; ++k) {
        const double inv_d = 1.0 / periods.periods[k];
        float* out = emb.data.data() + static_cast<std::size_t>(k) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            double ratio = static_cast<double>(temp.celsius[i]) * inv_d;
            out[i] = static_cast<float>(127.5 * std::sin(M_PI * ratio) + 127.5);
        }
    }
    return emb;
}

std::vector<ToneMapped8> embedding_to_images(const ThermalEmbedding& emb) {
    std::vector<ToneMapped8> out;
    out.reserve(emb.channels);
    const std::size_t plane = static_cast<std::size_t>(emb.width) * emb.height;
    for (int k = 0; k < emb.channels; ++k) {
        ToneMapped8 img{emb.width, emb.height, std::vector<std::uint8_t>(plane)};
        const float* src = emb.channel(k);
        for (std::size_t i = 0; i < plane; ++i) img.gray[i] = round_u8(src[i]);
        out.push_back(std::move(img));
    }
    return out;
}

} // namespace tcmap
