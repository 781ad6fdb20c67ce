#pragma once

#include "tcmap/image.hpp"

namespace tcmap {

// Classical 14-bit -> 8-bit rescaling operators. All are pure, deterministic
// and dimension-preserving; outputs use the round_u8 quantization rule.

// Fixed linear rescale by the full 14-bit range: round(c * 255 / 16383),
// clamped (counts from deeper frames saturate at 255).
ToneMapped8 tonemap_raw(const RadiometricFrame& frame);

// Linear rescale by the frame's own min/max; constant frames map to all
// zeros (degenerate rule shared by the linear operators).
ToneMapped8 tonemap_minmax(const RadiometricFrame& frame);

// Percentile clipping: nearest-rank percentiles p_lo/p_hi over all pixels,
// clamp, then linear rescale. (0, 1) reduces exactly to tonemap_minmax.
ToneMapped8 tonemap_clip(const RadiometricFrame& frame, double lo_pct = 0.01,
                         double hi_pct = 0.99);

enum class HeBinning {
    Width,  // bin_param is the bin width in counts over [min, max]
    Count,  // bin_param is the total number of bins
};

// Bin-based histogram equalization: quantize the occupied count range into
// bins, map each pixel through the normalized cumulative bin histogram.
// Constant frames land in a single bin with CDF 1, hence map to 255.
ToneMapped8 tonemap_he(const RadiometricFrame& frame, int bin_param = 30,
                       HeBinning binning = HeBinning::Width);

// Grid-local min/max rescale: per-cell min and max over a rows x cols
// tiling, both fields bilinearly interpolated back to full resolution from
// the cell centers, then a per-pixel linear rescale. Grid (1,1) reduces
// exactly to tonemap_minmax. The cited field-based method's refinement
// passes are out of scope, hence "lite".
ToneMapped8 tonemap_fieldscale_lite(const RadiometricFrame& frame, int grid_rows = 8,
                                    int grid_cols = 8);

} // namespace tcmap
