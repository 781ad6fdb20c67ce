#pragma once

#include <cmath>
#include <vector>

#include "tcmap/tensor.hpp"

namespace tcmap::diff {

// The layer set is exactly what the channel-compression network needs: a
// fixed pipeline with hand-chained analytic backward passes, no tape. Every
// backward routine accumulates parameter gradients in place (call
// zero_grad first) and returns the gradient with respect to its input.

template <typename S>
struct ConvLayerT {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    TensorT<S> weight;  // [out, in, k, k]
    TensorT<S> bias;    // [out]

    static ConvLayerT make(int in_ch, int out_ch, int kernel, int stride) {
        ConvLayerT l;
        l.in_channels = in_ch;
        l.out_channels = out_ch;
        l.kernel = kernel;
        l.stride = stride;
        l.weight = TensorT<S>({out_ch, in_ch, kernel, kernel});
        l.bias = TensorT<S>({out_ch});
        l.weight.ensure_grad();
        l.bias.ensure_grad();
        return l;
    }

    template <typename T>
    ConvLayerT<T> cast() const {
        ConvLayerT<T> l;
        l.in_channels = in_channels;
        l.out_channels = out_channels;
        l.kernel = kernel;
        l.stride = stride;
        l.weight = weight.template cast<T>();
        l.bias = bias.template cast<T>();
        l.weight.ensure_grad();
        l.bias.ensure_grad();
        return l;
    }
};

template <typename S>
struct DenseLayerT {
    int in_dim = 0;
    int out_dim = 0;
    TensorT<S> weight;  // [out, in]
    TensorT<S> bias;    // [out]

    static DenseLayerT make(int in_dim, int out_dim) {
        DenseLayerT l;
        l.in_dim = in_dim;
        l.out_dim = out_dim;
        l.weight = TensorT<S>({out_dim, in_dim});
        l.bias = TensorT<S>({out_dim});
        l.weight.ensure_grad();
        l.bias.ensure_grad();
        return l;
    }

    template <typename T>
    DenseLayerT<T> cast() const {
        DenseLayerT<T> l;
        l.in_dim = in_dim;
        l.out_dim = out_dim;
        l.weight = weight.template cast<T>();
        l.bias = bias.template cast<T>();
        l.weight.ensure_grad();
        l.bias.ensure_grad();
        return l;
    }
};

// Zero padding chosen so the output spatial size is ceil(in/stride).
inline std::pair<int, int> same_padding(int in, int kernel, int stride) {
    int out = (in + stride - 1) / stride;
    int total = std::max((out - 1) * stride + kernel - in, 0);
    return {total / 2, total - total / 2};  // {leading, trailing}
}

// Cross-correlation with zero padding, bias per output channel.
// x: [B, C, H, W] -> [B, C', ceil(H/s), ceil(W/s)].
template <typename S>
TensorT<S> conv2d_forward(const TensorT<S>& x, const ConvLayerT<S>& layer) {
    if (x.shape.size() != 4 || x.dim(1) != layer.in_channels)
        throw ValidationError("conv2d: input shape mismatch");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int k = layer.kernel, s = layer.stride, O = layer.out_channels;
    if (H < 1 || W < 1 || k < 1 || s < 1) throw ValidationError("conv2d: degenerate geometry");
    auto [pt, pb] = same_padding(H, k, s);
    auto [pl, pr] = same_padding(W, k, s);
    (void)pb;
    (void)pr;
    const int Ho = (H + s - 1) / s, Wo = (W + s - 1) / s;

    TensorT<S> y({B, O, Ho, Wo});
    const S* xd = x.data.data();
    const S* wd = layer.weight.data.data();
    S* yd = y.data.data();

    for (int b = 0; b < B; ++b)
        for (int o = 0; o < O; ++o) {
            const S bias = layer.bias.data[o];
            for (int oy = 0; oy < Ho; ++oy)
                for (int ox = 0; ox < Wo; ++ox) {
                    S acc = bias;
                    const int iy0 = oy * s - pt, ix0 = ox * s - pl;
                    for (int c = 0; c < C; ++c) {
                        const S* xplane = xd + ((static_cast<std::size_t>(b) * C + c) * H) * W;
                        const S* wplane = wd + ((static_cast<std::size_t>(o) * C + c) * k) * k;
                        for (int u = 0; u < k; ++u) {
                            const int iy = iy0 + u;
                            if (iy < 0 || iy >= H) continue;
                            for (int v = 0; v < k; ++v) {
                                const int ix = ix0 + v;
                                if (ix < 0 || ix >= W) continue;
                                acc += wplane[u * k + v] * xplane[iy * W + ix];
                            }
                        }
                    }
                    yd[((static_cast<std::size_t>(b) * O + o) * Ho + oy) * Wo + ox] = acc;
                }
        }
    TCMAP_CHECK_FINITE(y, "conv2d_forward");
    return y;
}

// Accumulates weight/bias gradients into the layer, returns grad wrt x.
template <typename S>
TensorT<S> conv2d_backward(const TensorT<S>& x, ConvLayerT<S>& layer, const TensorT<S>& grad_y) {
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int k = layer.kernel, s = layer.stride, O = layer.out_channels;
    auto [pt, pb] = same_padding(H, k, s);
    auto [pl, pr] = same_padding(W, k, s);
    (void)pb;
    (void)pr;
    const int Ho = (H + s - 1) / s, Wo = (W + s - 1) / s;
    grad_y.require_shape({B, O, Ho, Wo}, "conv2d_backward grad_y");
    layer.weight.ensure_grad();
    layer.bias.ensure_grad();

    TensorT<S> grad_x(x.shape);
    const S* xd = x.data.data();
    const S* wd = layer.weight.data.data();
    const S* gyd = grad_y.data.data();
    S* gw = layer.weight.grad.data();
    S* gb = layer.bias.grad.data();
    S* gx = grad_x.data.data();

    for (int b = 0; b < B; ++b)
        for (int o = 0; o < O; ++o)
            for (int oy = 0; oy < Ho; ++oy)
                for (int ox = 0; ox < Wo; ++ox) {
                    const S g = gyd[((static_cast<std::size_t>(b) * O + o) * Ho + oy) * Wo + ox];
                    gb[o] += g;
                    const int iy0 = oy * s - pt, ix0 = ox * s - pl;
                    for (int c = 0; c < C; ++c) {
                        const std::size_t xoff = ((static_cast<std::size_t>(b) * C + c) * H) * W;
                        const std::size_t woff = ((static_cast<std::size_t>(o) * C + c) * k) * k;
                        for (int u = 0; u < k; ++u) {
                            const int iy = iy0 + u;
                            if (iy < 0 || iy >= H) continue;
                            for (int v = 0; v < k; ++v) {
                                const int ix = ix0 + v;
                                if (ix < 0 || ix >= W) continue;
                                gw[woff + u * k + v] += g * xd[xoff + iy * W + ix];
                                gx[xoff + iy * W + ix] += g * wd[woff + u * k + v];
                            }
                        }
                    }
                }
    return grad_x;
}

template <typename S>
TensorT<S> relu(const TensorT<S>& x) {
    TensorT<S> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > S(0) ? x.data[i] : S(0);
    return y;
}

// Subgradient at 0 is 0.
template <typename S>
TensorT<S> relu_backward(const TensorT<S>& x, const TensorT<S>& grad_y) {
    grad_y.require_shape(x.shape, "relu_backward grad_y");
    TensorT<S> gx(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        gx.data[i] = x.data[i] > S(0) ? grad_y.data[i] : S(0);
    return gx;
}

// Layer norm over each channel's spatial extent: group (b, c) over H*W,
// learnable per-channel gain/bias. Keeps the cached normalized values and
// inverse stddev for backward.
template <typename S>
struct LayerNormCache {
    TensorT<S> xhat;            // normalized input, same shape as x
    std::vector<S> inv_std;     // per (b, c) group
};

template <typename S>
TensorT<S> layer_norm(const TensorT<S>& x, const TensorT<S>& gain, const TensorT<S>& bias,
                      LayerNormCache<S>* cache, S eps = S(1e-5)) {
    if (x.shape.size() != 4) throw ValidationError("layer_norm expects [B,C,H,W]");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    gain.require_shape({C}, "layer_norm gain");
    bias.require_shape({C}, "layer_norm bias");

    TensorT<S> y(x.shape);
    if (cache) {
        cache->xhat = TensorT<S>(x.shape);
        cache->inv_std.assign(static_cast<std::size_t>(B) * C, S(0));
    }
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c) {
            const std::size_t off = (static_cast<std::size_t>(b) * C + c) * plane;
            S mean = S(0);
            for (std::size_t i = 0; i < plane; ++i) mean += x.data[off + i];
            mean /= static_cast<S>(plane);
            S var = S(0);
            for (std::size_t i = 0; i < plane; ++i) {
                S d = x.data[off + i] - mean;
                var += d * d;
            }
            var /= static_cast<S>(plane);
            const S inv = S(1) / std::sqrt(var + eps);
            for (std::size_t i = 0; i < plane; ++i) {
                S xh = (x.data[off + i] - mean) * inv;
                if (cache) cache->xhat.data[off + i] = xh;
                y.data[off + i] = gain.data[c] * xh + bias.data[c];
            }
            if (cache) cache->inv_std[static_cast<std::size_t>(b) * C + c] = inv;
        }
    TCMAP_CHECK_FINITE(y, "layer_norm");
    return y;
}

template <typename S>
TensorT<S> layer_norm_backward(const LayerNormCache<S>& cache, TensorT<S>& gain, TensorT<S>& bias,
                               const TensorT<S>& grad_y) {
    const auto& xhat = cache.xhat;
    grad_y.require_shape(xhat.shape, "layer_norm_backward grad_y");
    const int B = xhat.dim(0), C = xhat.dim(1), H = xhat.dim(2), W = xhat.dim(3);
    gain.ensure_grad();
    bias.ensure_grad();

    TensorT<S> gx(xhat.shape);
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c) {
            const std::size_t off = (static_cast<std::size_t>(b) * C + c) * plane;
            const S inv = cache.inv_std[static_cast<std::size_t>(b) * C + c];
            S sum_g = S(0), sum_gx = S(0);
            for (std::size_t i = 0; i < plane; ++i) {
                const S g = grad_y.data[off + i];
                sum_g += g;
                sum_gx += g * xhat.data[off + i];
                bias.grad[c] += g;
                gain.grad[c] += g * xhat.data[off + i];
            }
            const S mean_g = sum_g / static_cast<S>(plane);
            const S mean_gx = sum_gx / static_cast<S>(plane);
            const S scale = gain.data[c] * inv;
            for (std::size_t i = 0; i < plane; ++i)
                gx.data[off + i] =
                    scale * (grad_y.data[off + i] - mean_g - xhat.data[off + i] * mean_gx);
        }
    return gx;
}

// [B, C, H, W] -> [B, C]
template <typename S>
TensorT<S> global_avg_pool(const TensorT<S>& x) {
    if (x.shape.size() != 4) throw ValidationError("global_avg_pool expects [B,C,H,W]");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    TensorT<S> y({B, C});
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c) {
            const std::size_t off = (static_cast<std::size_t>(b) * C + c) * plane;
            S acc = S(0);
            for (std::size_t i = 0; i < plane; ++i) acc += x.data[off + i];
            y.data[static_cast<std::size_t>(b) * C + c] = acc / static_cast<S>(plane);
        }
    return y;
}

template <typename S>
TensorT<S> gap_backward(const TensorT<S>& grad_y, int H, int W) {
    if (grad_y.shape.size() != 2) throw ValidationError("gap_backward expects [B,C]");
    const int B = grad_y.dim(0), C = grad_y.dim(1);
    TensorT<S> gx({B, C, H, W});
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    const S norm = S(1) / static_cast<S>(plane);
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c) {
            const S g = grad_y.data[static_cast<std::size_t>(b) * C + c] * norm;
            const std::size_t off = (static_cast<std::size_t>(b) * C + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) gx.data[off + i] = g;
        }
    return gx;
}

// x: [B, in] -> [B, out]
template <typename S>
TensorT<S> dense_forward(const TensorT<S>& x, const DenseLayerT<S>& layer) {
    if (x.shape.size() != 2 || x.dim(1) != layer.in_dim)
        throw ValidationError("dense: input shape mismatch");
    const int B = x.dim(0), In = layer.in_dim, Out = layer.out_dim;
    TensorT<S> y({B, Out});
    for (int b = 0; b < B; ++b)
        for (int o = 0; o < Out; ++o) {
            S acc = layer.bias.data[o];
            const S* wrow = layer.weight.data.data() + static_cast<std::size_t>(o) * In;
            const S* xrow = x.data.data() + static_cast<std::size_t>(b) * In;
            for (int i = 0; i < In; ++i) acc += wrow[i] * xrow[i];
            y.data[static_cast<std::size_t>(b) * Out + o] = acc;
        }
    TCMAP_CHECK_FINITE(y, "dense_forward");
    return y;
}

template <typename S>
TensorT<S> dense_backward(const TensorT<S>& x, DenseLayerT<S>& layer, const TensorT<S>& grad_y) {
    const int B = x.dim(0), In = layer.in_dim, Out = layer.out_dim;
    grad_y.require_shape({B, Out}, "dense_backward grad_y");
    layer.weight.ensure_grad();
    layer.bias.ensure_grad();

    TensorT<S> gx({B, In});
    for (int b = 0; b < B; ++b) {
        const S* xrow = x.data.data() + static_cast<std::size_t>(b) * In;
        S* gxrow = gx.data.data() + static_cast<std::size_t>(b) * In;
        for (int o = 0; o < Out; ++o) {
            const S g = grad_y.data[static_cast<std::size_t>(b) * Out + o];
            layer.bias.grad[o] += g;
            const S* wrow = layer.weight.data.data() + static_cast<std::size_t>(o) * In;
            S* gwrow = layer.weight.grad.data() + static_cast<std::size_t>(o) * In;
            for (int i = 0; i < In; ++i) {
                gwrow[i] += g * xrow[i];
                gxrow[i] += g * wrow[i];
            }
        }
    }
    return gx;
}

// Numerically stable softmax along the given axis.
template <typename S>
TensorT<S> softmax(const TensorT<S>& x, int axis) {
    const int nd = static_cast<int>(x.shape.size());
    if (axis < 0 || axis >= nd) throw ValidationError("softmax: axis out of range");
    std::int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= x.dim(i);
    for (int i = axis + 1; i < nd; ++i) inner *= x.dim(i);
    const std::int64_t n = x.dim(axis);

    TensorT<S> y(x.shape);
    for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t in = 0; in < inner; ++in) {
            const std::size_t base = static_cast<std::size_t>(o * n * inner + in);
            S mx = x.data[base];
            for (std::int64_t i = 1; i < n; ++i)
                mx = std::max(mx, x.data[base + static_cast<std::size_t>(i * inner)]);
            S sum = S(0);
            for (std::int64_t i = 0; i < n; ++i) {
                const std::size_t idx = base + static_cast<std::size_t>(i * inner);
                S e = std::exp(x.data[idx] - mx);
                y.data[idx] = e;
                sum += e;
            }
            const S invsum = S(1) / sum;
            for (std::int64_t i = 0; i < n; ++i)
                y.data[base + static_cast<std::size_t>(i * inner)] *= invsum;
        }
    TCMAP_CHECK_FINITE(y, "softmax");
    return y;
}

// grad_x_i = y_i * (grad_y_i - sum_j grad_y_j * y_j) along the axis.
template <typename S>
TensorT<S> softmax_backward(const TensorT<S>& y, const TensorT<S>& grad_y, int axis) {
    grad_y.require_shape(y.shape, "softmax_backward grad_y");
    const int nd = static_cast<int>(y.shape.size());
    if (axis < 0 || axis >= nd) throw ValidationError("softmax_backward: axis out of range");
    std::int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= y.dim(i);
    for (int i = axis + 1; i < nd; ++i) inner *= y.dim(i);
    const std::int64_t n = y.dim(axis);

    TensorT<S> gx(y.shape);
    for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t in = 0; in < inner; ++in) {
            const std::size_t base = static_cast<std::size_t>(o * n * inner + in);
            S dot = S(0);
            for (std::int64_t i = 0; i < n; ++i) {
                const std::size_t idx = base + static_cast<std::size_t>(i * inner);
                dot += grad_y.data[idx] * y.data[idx];
            }
            for (std::int64_t i = 0; i < n; ++i) {
                const std::size_t idx = base + static_cast<std::size_t>(i * inner);
                gx.data[idx] = y.data[idx] * (grad_y.data[idx] - dot);
            }
        }
    return gx;
}

} // namespace tcmap::diff
