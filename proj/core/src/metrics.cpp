#include "tcmap/metrics.hpp"

#include <cmath>

#include "tcmap/error.hpp"

namespace tcmap {

Histogram256 histogram_of(const ToneMapped8& img) {
    if (img.gray.empty()) throw ValidationError("histogram of empty image");
    Histogram256 h;
    for (std::uint8_t v : img.gray) ++h.bins[v];
    h.total = img.gray.size();
    return h;
}

HistogramDist normalize(const Histogram256& hist) {
    if (hist.total == 0) throw ValidationError("cannot normalize an empty histogram");
    HistogramDist d;
    for (int i = 0; i < 256; ++i)
        d[i] = static_cast<double>(hist.bins[i]) / static_cast<double>(hist.total);
    return d;
}

ToneMapped8 luminance_of(const ToneMappedImage& img) {
    const std::size_t plane = static_cast<std::size_t>(img.width) * img.height;
    if (plane == 0 || img.data.size() != plane * 3)
        throw ValidationError("tone-mapped image has inconsistent dimensions");
    ToneMapped8 out{img.width, img.height, std::vector<std::uint8_t>(plane)};
    for (std::size_t p = 0; p < plane; ++p) {
        double mean = (static_cast<double>(img.data[p]) + img.data[plane + p] +
                       img.data[2 * plane + p]) / 3.0;
        out.gray[p] = round_u8(mean);
    }
    return out;
}

double entropy_bits(const HistogramDist& dist) {
    double h = 0.0;
    for (double p : dist)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double image_entropy(const ToneMapped8& img) { return entropy_bits(normalize(histogram_of(img))); }

double image_entropy(const ToneMappedImage& img) { return image_entropy(luminance_of(img)); }

HistogramDist average_histogram(const std::vector<HistogramDist>& dists) {
    if (dists.empty()) throw ValidationError("average of zero histograms");
    HistogramDist avg{};
    for (const auto& d : dists)
        for (int i = 0; i < 256; ++i) avg[i] += d[i];
    for (double& v : avg) v /= static_cast<double>(dists.size());
    return avg;
}

HistogramDist average_histogram_of(const std::vector<ToneMapped8>& imgs) {
    if (imgs.empty()) throw ValidationError("average histogram of zero images");
    std::vector<HistogramDist> dists;
    dists.reserve(imgs.size());
    for (const auto& img : imgs) dists.push_back(normalize(histogram_of(img)));
    return average_histogram(dists);
}

double histogram_kl(const HistogramDist& p, const HistogramDist& q, double smoothing) {
    auto check_normalized = [](const HistogramDist& d, const char* name) {
        double sum = 0.0;
        for (double v : d) {
            if (v < 0.0) throw ValidationError(std::string(name) + ": negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ValidationError(std::string(name) + ": histogram not normalized (sum = " +
                                  std::to_string(sum) + ")");
    };
    check_normalized(p, "p");
    check_normalized(q, "q");

    double psum = 1.0 + 256.0 * smoothing;
    double qsum = psum;
    double kl = 0.0;
    for (int i = 0; i < 256; ++i) {
        double ps = (p[i] + smoothing) / psum;
        double qs = (q[i] + smoothing) / qsum;
        kl += ps * std::log(ps / qs);
    }
    return kl;
}

} // namespace tcmap
