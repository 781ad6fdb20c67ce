#pragma once

#include <array>
#include <string>
#include <vector>

#include "tcmap/adam.hpp"
#include "tcmap/embedding.hpp"
#include "tcmap/layers.hpp"
#include "tcmap/rng.hpp"

namespace tcmap {

// 3 x N mixing weights; row i is the convex combination producing output
// channel i, so every row sums to 1 and all entries are positive.
struct CompressionWeights {
    int n = 0;
    std::vector<float> omega;  // row-major 3 x N

    float at(int row, int col) const { return omega[static_cast<std::size_t>(row) * n + col]; }

    // Column means: the average weight each embedding receives across the
    // three output channels.
    std::vector<double> per_embedding_average() const;
};

// Adaptive channel compression:
//   1. embeddings scaled by 1/255 (the weighted sum later uses the raw scale)
//   2. shared conv1 -> ReLU -> conv2 -> ReLU applied to each embedding as a
//      single-channel image, giving a 3-channel feature map per embedding
//   3. per-channel layer norm over the spatial extent, then global average
//      pooling -> 3 values per embedding
//   4. concatenation to 3N, then mlp1 -> ReLU -> mlp2 -> ReLU -> head
//   5. head output reshaped to 3 x N, softmax over the N embeddings within
//      each output row -> mixing weights
//   6. output channel i = sum_n w[i,n] * embedding_n on the raw [0,255] data
template <typename S>
struct CompressionNetT {
    int n_embeddings = 0;  // N
    diff::ConvLayerT<S> conv1, conv2;
    diff::TensorT<S> ln_gain, ln_bias;      // [3]
    diff::DenseLayerT<S> mlp1, mlp2, head;  // 3N -> 64 -> 64 -> 3N

    // Fixed parameter order; also the checkpoint block order.
    std::vector<diff::TensorT<S>*> parameters() {
        return {&conv1.weight, &conv1.bias, &conv2.weight, &conv2.bias, &ln_gain, &ln_bias,
                &mlp1.weight,  &mlp1.bias,  &mlp2.weight,  &mlp2.bias,  &head.weight, &head.bias};
    }

    void zero_grad() {
        for (auto* p : parameters()) {
            p->ensure_grad();
            p->zero_grad();
        }
    }

    template <typename T>
    CompressionNetT<T> cast() const {
        CompressionNetT<T> net;
        net.n_embeddings = n_embeddings;
        net.conv1 = conv1.template cast<T>();
        net.conv2 = conv2.template cast<T>();
        net.ln_gain = ln_gain.template cast<T>();
        net.ln_bias = ln_bias.template cast<T>();
        net.mlp1 = mlp1.template cast<T>();
        net.mlp2 = mlp2.template cast<T>();
        net.head = head.template cast<T>();
        net.ln_gain.ensure_grad();
        net.ln_bias.ensure_grad();
        return net;
    }

    // He-normal weights, zero biases, unit layer-norm gain. The conv widths
    // (1 -> mid -> 3, kernel 3, stride 2) keep the stack cheap at full
    // resolution and runnable at 8x8 test size.
    static CompressionNetT random_init(int n_embeddings, std::uint64_t seed, int conv_mid = 16,
                                       int kernel = 3, int hidden = 64) {
        if (n_embeddings < 1) throw ValidationError("compression net needs N >= 1");
        Rng rng(seed);
        CompressionNetT net;
        net.n_embeddings = n_embeddings;
        net.conv1 = diff::ConvLayerT<S>::make(1, conv_mid, kernel, 2);
        net.conv2 = diff::ConvLayerT<S>::make(conv_mid, 3, kernel, 2);
        net.ln_gain = diff::TensorT<S>({3});
        net.ln_bias = diff::TensorT<S>({3});
        std::fill(net.ln_gain.data.begin(), net.ln_gain.data.end(), S(1));
        net.ln_gain.ensure_grad();
        net.ln_bias.ensure_grad();
        net.mlp1 = diff::DenseLayerT<S>::make(3 * n_embeddings, hidden);
        net.mlp2 = diff::DenseLayerT<S>::make(hidden, hidden);
        net.head = diff::DenseLayerT<S>::make(hidden, 3 * n_embeddings);
        auto he_fill = [&rng](diff::TensorT<S>& w, int fan_in) {
            const double std = std::sqrt(2.0 / fan_in);
            for (auto& v : w.data) v = static_cast<S>(rng.normal(0.0, std));
        };
        he_fill(net.conv1.weight, 1 * kernel * kernel);
        he_fill(net.conv2.weight, conv_mid * kernel * kernel);
        he_fill(net.mlp1.weight, net.mlp1.in_dim);
        he_fill(net.mlp2.weight, net.mlp2.in_dim);
        he_fill(net.head.weight, net.head.in_dim);
        return net;
    }
};

using CompressionNet = CompressionNetT<float>;

template <typename S>
struct CompressCacheT {
    diff::TensorT<S> embeddings;  // [B, N, H, W], raw [0,255] scale
    diff::TensorT<S> scaled;      // [B*N, 1, H, W]
    diff::TensorT<S> a1, r1;      // conv1 pre/post ReLU
    diff::TensorT<S> a2, r2;      // conv2 pre/post ReLU
    diff::LayerNormCache<S> ln;
    diff::TensorT<S> feat;        // [B, 3N]
    diff::TensorT<S> d1, h1;      // mlp1 pre/post ReLU
    diff::TensorT<S> d2, h2;      // mlp2 pre/post ReLU
    diff::TensorT<S> weights;     // [B, 3, N]
    diff::TensorT<S> row_sums;    // [B, 3] softmax row sums (double-renormalized mix)
    diff::TensorT<S> output;      // [B, 3, H, W]
};

template <typename S>
struct CompressOutputT {
    diff::TensorT<S> tonemapped;  // [B, 3, H, W]
    diff::TensorT<S> weights;     // [B, 3, N]
    CompressCacheT<S> cache;
};

// Forward pass over a batch of embeddings, shape [B, N, H, W] in raw
// [0,255] scale. The weighted sum accumulates in double with the softmax
// row renormalized, which pins the output inside the per-pixel embedding
// envelope even under float rounding.
template <typename S>
CompressOutputT<S> compress_forward(const diff::TensorT<S>& embeddings,
                                    const CompressionNetT<S>& net);

// Returns the gradient with respect to the raw embeddings (both the mixing
// path and the scaled CNN path); parameter gradients accumulate in the net.
template <typename S>
diff::TensorT<S> compress_backward(const diff::TensorT<S>& grad_out, CompressionNetT<S>& net,
                                   const CompressCacheT<S>& cache);

// ---- float-side conveniences ----

// Stacks same-shape embeddings into a [B, N, H, W] batch tensor.
diff::TensorT<float> make_embedding_batch(const std::vector<ThermalEmbedding>& embs);

// Single-image inference.
struct CompressResult {
    ToneMappedImage image;
    CompressionWeights weights;
};
CompressResult compress_image(const ThermalEmbedding& emb, const CompressionNetT<float>& net);

CompressionWeights weights_from_tensor(const diff::TensorT<float>& weights, int batch_index);

// ---- weight inspection ----

// Per-channel weight table ordered by ascending period, with the
// per-embedding average row.
struct WeightReport {
    std::vector<double> periods;                    // ascending
    std::array<std::vector<double>, 3> omega_rows;  // [channel][embedding]
    std::vector<double> embedding_average;          // column means

    int min_average_index() const;
};

WeightReport inspect_weights(const CompressionWeights& weights, const PeriodSet& periods);

// CSV with columns channel,D,omega; averages appear as channel "avg".
std::string weight_report_csv(const WeightReport& report);
std::string weight_report_table(const WeightReport& report);

// Parses the CSV layout written by weight_report_csv (avg rows optional).
std::pair<CompressionWeights, PeriodSet> weights_from_csv(const std::string& csv_text);

// compress_forward / compress_backward are defined in compression.cpp and
// explicitly instantiated for float (training/inference) and double
// (finite-difference verification).

} // namespace tcmap
