#pragma once

#include <string>
#include <vector>

#include "tcmap/compression.hpp"

namespace tcmap {

// "TCNW" container, little-endian: magic, u16 version, u32 block count,
// then per block u32 ndims + u32 dims; payloads follow as contiguous f32
// in block order. Save/load round-trips byte-exactly.
struct TensorBlock {
    std::vector<int> shape;
    std::vector<float> data;
};

void write_tcnw(const std::vector<TensorBlock>& blocks, const std::string& path);
std::vector<TensorBlock> read_tcnw(const std::string& path);

// A compression checkpoint is the network parameters in their fixed order
// followed by one extra [N] block holding the evaluation periods (stored
// as f32 like every other block).
struct CompressionCheckpoint {
    CompressionNet net;
    PeriodSet eval_periods;
};

void save_checkpoint(const CompressionCheckpoint& ckpt, const std::string& path);
CompressionCheckpoint load_checkpoint(const std::string& path);

} // namespace tcmap
