#pragma once

#include <cstdint>
#include <vector>

#include "tcmap/image.hpp"
#include "tcmap/radiometry.hpp"

namespace tcmap {

struct SceneParams {
    int width = 64;
    int height = 64;
    double ambient_lo = 5.0;   // ambient field range, degC
    double ambient_hi = 30.0;
    int n_objects = 3;
    double noise_std = 1.0;    // Gaussian count noise
    double blob_dt_min = 5.0;  // |object offset| range, degC
    double blob_dt_max = 40.0;
};

// A frame with known ground truth: smooth ambient temperature field plus
// disjoint elliptical hot/cold blobs, inverted through the profile into
// counts with optional Gaussian count noise.
struct SyntheticScene {
    RadiometricFrame frame;
    TemperatureMap temp;                              // noise-free ground truth
    std::vector<std::vector<std::uint8_t>> object_masks;  // 0/1 per blob, row-major
    std::vector<std::uint8_t> edge_map;               // inner boundary of the blob union

    std::size_t pixel_count() const { return temp.celsius.size(); }
};

// The profile used by scene generation and tests. Not calibration data for
// any real camera; its constants just exercise the conversion in a
// realistic count range.
CameraProfile default_scene_profile();

// Deterministic in (seed, params, profile). With noise_std == 0 the frame
// decodes back to the ground-truth field within 0.1 degC (count
// quantization only); with noise the decoded temperature additionally
// deviates by noise_std times the per-count temperature step.
SyntheticScene generate_scene(std::uint64_t seed, const SceneParams& params,
                              const CameraProfile& profile);

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count,
                                            const SceneParams& params,
                                            const CameraProfile& profile);

} // namespace tcmap
