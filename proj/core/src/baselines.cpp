#include "tcmap/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tcmap/error.hpp"

namespace tcmap {

namespace {

std::pair<std::uint32_t, std::uint32_t> count_range(const RadiometricFrame& frame) {
    auto [lo, hi] = std::minmax_element(frame.counts.begin(), frame.counts.end());
    return {*lo, *hi};
}

ToneMapped8 blank_like(const RadiometricFrame& frame) {
    return ToneMapped8{frame.width, frame.height,
                       std::vector<std::uint8_t>(frame.pixel_count(), 0)};
}

// Linear map of counts clamped to [lo, hi] onto [0, 255]; lo == hi maps
// everything to 0.
ToneMapped8 rescale_window(const RadiometricFrame& frame, double lo, double hi) {
    ToneMapped8 out = blank_like(frame);
    if (!(hi > lo)) return out;
    double scale = 255.0 / (hi - lo);
    for (std::size_t i = 0; i < frame.counts.size(); ++i) {
        double c = std::clamp(static_cast<double>(frame.counts[i]), lo, hi);
        out.gray[i] = round_u8((c - lo) * scale);
    }
    return out;
}

// Nearest-rank percentile: the value at rank ceil(p*n) (1-indexed); p = 0
// picks the minimum.
std::uint32_t nearest_rank_percentile(const std::vector<std::uint32_t>& sorted, double p) {
    std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

} // namespace

ToneMapped8 tonemap_raw(const RadiometricFrame& frame) {
    frame.validate();
    ToneMapped8 out = blank_like(frame);
    constexpr double kScale = 255.0 / 16383.0;
    for (std::size_t i = 0; i < frame.counts.size(); ++i)
        out.gray[i] = round_u8(frame.counts[i] * kScale);
    return out;
}

ToneMapped8 tonemap_minmax(const RadiometricFrame& frame) {
    frame.validate();
    auto [lo, hi] = count_range(frame);
    return rescale_window(frame, lo, hi);
}

ToneMapped8 tonemap_clip(const RadiometricFrame& frame, double lo_pct, double hi_pct) {
    frame.validate();
    if (!(lo_pct >= 0.0 && lo_pct < hi_pct && hi_pct <= 1.0))
        throw ValidationError("clip percentiles must satisfy 0 <= lo < hi <= 1, got lo=" +
                              std::to_string(lo_pct) + " hi=" + std::to_string(hi_pct));
    std::vector<std::uint32_t> sorted(frame.counts.begin(), frame.counts.end());
    std::sort(sorted.begin(), sorted.end());
    double p_lo = nearest_rank_percentile(sorted, lo_pct);
    double p_hi = nearest_rank_percentile(sorted, hi_pct);
    return rescale_window(frame, p_lo, p_hi);
}

ToneMapped8 tonemap_he(const RadiometricFrame& frame, int bin_param, HeBinning binning) {
    frame.validate();
    if (bin_param < 1) throw ValidationError("bin parameter must be >= 1");
    auto [lo, hi] = count_range(frame);

    std::uint64_t span = static_cast<std::uint64_t>(hi) - lo + 1;
    std::uint64_t bin_width, n_bins;
    if (binning == HeBinning::Width) {
        bin_width = static_cast<std::uint64_t>(bin_param);
        n_bins = (span + bin_width - 1) / bin_width;
    } else {
        n_bins = std::min<std::uint64_t>(static_cast<std::uint64_t>(bin_param), span);
        bin_width = (span + n_bins - 1) / n_bins;
        n_bins = (span + bin_width - 1) / bin_width;
    }

    std::vector<std::uint64_t> hist(n_bins, 0);
    for (std::uint32_t c : frame.counts) ++hist[(c - lo) / bin_width];

    // Normalized cumulative histogram of bins; monotone nondecreasing map.
    std::vector<double> cdf(n_bins);
    std::uint64_t acc = 0;
    double total = static_cast<double>(frame.counts.size());
    for (std::size_t b = 0; b < n_bins; ++b) {
        acc += hist[b];
        cdf[b] = static_cast<double>(acc) / total;
    }

    ToneMapped8 out = blank_like(frame);
    for (std::size_t i = 0; i < frame.counts.size(); ++i)
        out.gray[i] = round_u8(255.0 * cdf[(frame.counts[i] - lo) / bin_width]);
    return out;
}

ToneMapped8 tonemap_fieldscale_lite(const RadiometricFrame& frame, int grid_rows, int grid_cols) {
    frame.validate();
    if (grid_rows < 1 || grid_cols < 1)
        throw ValidationError("grid dimensions must be >= 1");
    if (grid_rows > frame.height || grid_cols > frame.width)
        throw ValidationError("grid " + std::to_string(grid_rows) + "x" + std::to_string(grid_cols) +
                              " exceeds image " + std::to_string(frame.height) + "x" +
                              std::to_string(frame.width));

    const int H = frame.height, W = frame.width;
    const int R = grid_rows, C = grid_cols;

    // Per-cell min/max over an even tiling (integer cell edges).
    std::vector<double> min_field(static_cast<std::size_t>(R) * C);
    std::vector<double> max_field(static_cast<std::size_t>(R) * C);
    std::vector<double> cy(R), cx(C);
    for (int r = 0; r < R; ++r) {
        int y0 = static_cast<int>(static_cast<std::int64_t>(r) * H / R);
        int y1 = static_cast<int>(static_cast<std::int64_t>(r + 1) * H / R);
        cy[r] = 0.5 * (y0 + y1 - 1);  // pixel-center coordinate of the cell center
        for (int c = 0; c < C; ++c) {
            int x0 = static_cast<int>(static_cast<std::int64_t>(c) * W / C);
            int x1 = static_cast<int>(static_cast<std::int64_t>(c + 1) * W / C);
            if (r == 0) cx[c] = 0.5 * (x0 + x1 - 1);
            std::uint32_t mn = frame.counts[static_cast<std::size_t>(y0) * W + x0];
            std::uint32_t mx = mn;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    std::uint32_t v = frame.counts[static_cast<std::size_t>(y) * W + x];
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                }
            min_field[static_cast<std::size_t>(r) * C + c] = mn;
            max_field[static_cast<std::size_t>(r) * C + c] = mx;
        }
    }

    // Bracketing cell index and weight along one axis; constant beyond the
    // outer cell centers.
    auto bracket = [](const std::vector<double>& centers, double pos, int& i0, double& w1) {
        int n = static_cast<int>(centers.size());
        if (pos <= centers.front() || n == 1) { i0 = 0; w1 = 0.0; return; }
        if (pos >= centers.back()) { i0 = n - 2; w1 = 1.0; return; }
        int i = 0;
        while (i + 1 < n && centers[i + 1] < pos) ++i;
        i0 = i;
        w1 = (pos - centers[i]) / (centers[i + 1] - centers[i]);
    };

    ToneMapped8 out = blank_like(frame);
    for (int y = 0; y < H; ++y) {
        int r0;
        double wy;
        bracket(cy, y, r0, wy);
        int r1 = std::min(r0 + 1, R - 1);
        for (int x = 0; x < W; ++x) {
            int c0;
            double wx;
            bracket(cx, x, c0, wx);
            int c1 = std::min(c0 + 1, C - 1);
            auto lerp2 = [&](const std::vector<double>& f) {
                double top = f[static_cast<std::size_t>(r0) * C + c0] * (1 - wx) +
                             f[static_cast<std::size_t>(r0) * C + c1] * wx;
                double bot = f[static_cast<std::size_t>(r1) * C + c0] * (1 - wx) +
                             f[static_cast<std::size_t>(r1) * C + c1] * wx;
                return top * (1 - wy) + bot * wy;
            };
            double minf = lerp2(min_field);
            double maxf = lerp2(max_field);
            std::size_t idx = static_cast<std::size_t>(y) * W + x;
            if (!(maxf > minf)) {
                out.gray[idx] = 0;
                continue;
            }
            double v = (frame.counts[idx] - minf) / (maxf - minf) * 255.0;
            out.gray[idx] = round_u8(std::clamp(v, 0.0, 255.0));
        }
    }
    return out;
}

} // namespace tcmap
