#pragma once

#include <cstdint>
#include <vector>

#include "tcmap/checkpoint.hpp"
#include "tcmap/compression.hpp"
#include "tcmap/losses.hpp"
#include "tcmap/scene.hpp"

namespace tcmap {

struct TrainConfig {
    int n_channels = 3;
    double period_lo = 4.5;
    double period_hi = 45.0;
    // Periods are redrawn every step by default (train-time augmentation);
    // freezing keeps the set sampled at initialization.
    bool resample_periods_per_step = true;
    int epochs = 30;
    int batch_size = 16;
    double lr = 1e-3;
    std::uint64_t seed = 1;  // mandatory; fully determines the run
    TaskLossKind loss = TaskLossKind::ObjectContrast;
    // Opt-in: parallel per-scene embedding into disjoint batch slices.
    // Bit-identical to the serial path.
    bool parallel_embed = false;

    void validate() const;
};

struct TrainStepRecord {
    int epoch = 0;
    int step = 0;  // within the epoch
    double loss = 0.0;
    std::vector<double> periods;
};

struct TrainEpochRecord {
    int epoch = 0;
    double mean_loss = 0.0;
    CompressionWeights omega_probe;  // weights on scene 0 at the eval periods
};

struct TrainResult {
    CompressionNet net;
    PeriodSet eval_periods;  // frozen for evaluation; stored in checkpoints
    std::vector<TrainStepRecord> steps;
    std::vector<TrainEpochRecord> epochs;

    CompressionCheckpoint checkpoint() const { return {net, eval_periods}; }
};

// End-to-end training of the compression network against a surrogate task
// loss. Network initialization depends only on the seed (not the loss), so
// runs that differ only in the task start from identical parameters.
// Single-threaded by default; (seed, config, scenes) determines the result
// bit-exactly. Throws TrainingDiverged when the loss stops being finite.
TrainResult train(const TrainConfig& config, const std::vector<SyntheticScene>& scenes,
                  const CameraProfile& profile);

// Runs the net on every scene at the given periods (one of which is chosen
// pathologically small to wrap) and reports per-embedding average weights;
// the artifact channel should receive the minimum.
WeightReport artifact_rejection_probe(const CompressionNet& net, const PeriodSet& periods,
                                      const std::vector<SyntheticScene>& scenes,
                                      const CameraProfile& profile);

} // namespace tcmap
