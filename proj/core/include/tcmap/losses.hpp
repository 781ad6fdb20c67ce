#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tcmap/baselines.hpp"
#include "tcmap/scene.hpp"
#include "tcmap/tensor.hpp"

namespace tcmap {

enum class TaskLossKind { ObjectContrast, EdgeFidelity, Reconstruction };

TaskLossKind task_loss_from_name(const std::string& name);
std::string task_loss_name(TaskLossKind kind);

template <typename S>
struct LossResult {
    S value = S(0);
    diff::TensorT<S> grad;  // wrt the image, same [3, H, W] shape
};

namespace detail {

template <typename S>
void require_image_shape(const diff::TensorT<S>& img, const SyntheticScene& scene,
                         const char* what) {
    img.require_shape({3, scene.temp.height, scene.temp.width}, what);
}

} // namespace detail

// Separation score between blob interiors and the background, summed over
// blobs and averaged over channels:
//   loss = -(1/3) sum_c sum_i (mu_in,i - mu_out)^2 / (var_in,i + var_out + eps)
// Means/variances are population statistics over mask interior vs the
// pixels outside every mask. Maximal separation drives the loss down;
// constant images score exactly 0.
template <typename S>
LossResult<S> loss_object_contrast(const diff::TensorT<S>& img, const SyntheticScene& scene,
                                   S epsilon = S(1)) {
    detail::require_image_shape(img, scene, "loss_object_contrast image");
    if (scene.object_masks.empty())
        throw ValidationError("object_contrast loss needs a nonempty mask set");

    const int H = scene.temp.height, W = scene.temp.width;
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    const std::size_t n_masks = scene.object_masks.size();

    // Background = complement of the mask union.
    std::vector<std::uint8_t> in_any(plane, 0);
    for (const auto& m : scene.object_masks)
        for (std::size_t p = 0; p < plane; ++p)
            if (m[p]) in_any[p] = 1;
    std::size_t n_bg = 0;
    for (std::size_t p = 0; p < plane; ++p)
        if (!in_any[p]) ++n_bg;
    if (n_bg == 0) throw ValidationError("object masks cover the whole frame");

    std::vector<std::size_t> mask_n(n_masks, 0);
    for (std::size_t i = 0; i < n_masks; ++i) {
        for (std::size_t p = 0; p < plane; ++p)
            if (scene.object_masks[i][p]) ++mask_n[i];
        if (mask_n[i] == 0) throw ValidationError("object mask " + std::to_string(i) + " is empty");
    }

    LossResult<S> res;
    res.grad = diff::TensorT<S>({3, H, W});
    double loss = 0.0;

    for (int c = 0; c < 3; ++c) {
        const S* x = img.data.data() + static_cast<std::size_t>(c) * plane;
        S* g = res.grad.data.data() + static_cast<std::size_t>(c) * plane;

        double mu_out = 0.0, var_out = 0.0;
        for (std::size_t p = 0; p < plane; ++p)
            if (!in_any[p]) mu_out += static_cast<double>(x[p]);
        mu_out /= static_cast<double>(n_bg);
        for (std::size_t p = 0; p < plane; ++p)
            if (!in_any[p]) {
                double d = static_cast<double>(x[p]) - mu_out;
                var_out += d * d;
            }
        var_out /= static_cast<double>(n_bg);

        std::vector<double> mu_in(n_masks, 0.0), var_in(n_masks, 0.0);
        std::vector<double> a_coeff(n_masks), b_coeff(n_masks);
        double a_sum = 0.0, b_sum = 0.0;
        for (std::size_t i = 0; i < n_masks; ++i) {
            const auto& m = scene.object_masks[i];
            for (std::size_t p = 0; p < plane; ++p)
                if (m[p]) mu_in[i] += static_cast<double>(x[p]);
            mu_in[i] /= static_cast<double>(mask_n[i]);
            for (std::size_t p = 0; p < plane; ++p)
                if (m[p]) {
                    double d = static_cast<double>(x[p]) - mu_in[i];
                    var_in[i] += d * d;
                }
            var_in[i] /= static_cast<double>(mask_n[i]);

            const double md = mu_in[i] - mu_out;
            const double denom = var_in[i] + var_out + static_cast<double>(epsilon);
            loss -= (md * md / denom) / 3.0;
            a_coeff[i] = 2.0 * md / denom;            // d(term)/d(mu_in - mu_out)
            b_coeff[i] = md * md / (denom * denom);   // -d(term)/d(denom)
            a_sum += a_coeff[i];
            b_sum += b_coeff[i];
        }

        // term = md^2/denom; loss contribution is -(1/3) * term.
        for (std::size_t i = 0; i < n_masks; ++i) {
            const auto& m = scene.object_masks[i];
            const double inv_n = 1.0 / static_cast<double>(mask_n[i]);
            for (std::size_t p = 0; p < plane; ++p)
                if (m[p]) {
                    const double dvar = 2.0 * (static_cast<double>(x[p]) - mu_in[i]) * inv_n;
                    g[p] = static_cast<S>(-(a_coeff[i] * inv_n - b_coeff[i] * dvar) / 3.0);
                }
        }
        const double inv_nbg = 1.0 / static_cast<double>(n_bg);
        for (std::size_t p = 0; p < plane; ++p)
            if (!in_any[p]) {
                const double dvar = 2.0 * (static_cast<double>(x[p]) - mu_out) * inv_nbg;
                g[p] = static_cast<S>(-(-a_sum * inv_nbg - b_sum * dvar) / 3.0);
            }
    }
    res.value = static_cast<S>(loss);
    return res;
}

// Sobel edge response on vs off the true boundaries:
//   loss = -(mean magnitude on edge_map) + lambda * (mean magnitude elsewhere)
// Magnitudes use replicate padding and are smoothed as
// sqrt(gx^2 + gy^2 + eps) - sqrt(eps), so flat images score exactly 0 and
// the gradient is defined everywhere. Means run over channels and pixels.
template <typename S>
LossResult<S> loss_edge_fidelity(const diff::TensorT<S>& img, const SyntheticScene& scene,
                                 S lambda = S(0.5), S eps = S(1e-6)) {
    detail::require_image_shape(img, scene, "loss_edge_fidelity image");
    const int H = scene.temp.height, W = scene.temp.width;
    const std::size_t plane = static_cast<std::size_t>(H) * W;

    std::size_t n_edge = 0;
    for (std::uint8_t e : scene.edge_map)
        if (e) ++n_edge;
    if (n_edge == 0) throw ValidationError("edge_fidelity loss needs a nonempty edge map");
    const std::size_t n_off = plane - n_edge;

    static const double kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static const double ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

    LossResult<S> res;
    res.grad = diff::TensorT<S>({3, H, W});
    const double sqrt_eps = std::sqrt(static_cast<double>(eps));
    const double w_edge = -1.0 / (3.0 * static_cast<double>(n_edge));
    const double w_off = n_off > 0
                             ? static_cast<double>(lambda) / (3.0 * static_cast<double>(n_off))
                             : 0.0;

    double loss = 0.0;
    for (int c = 0; c < 3; ++c) {
        const S* x = img.data.data() + static_cast<std::size_t>(c) * plane;
        S* g = res.grad.data.data() + static_cast<std::size_t>(c) * plane;
        for (int y = 0; y < H; ++y)
            for (int xp = 0; xp < W; ++xp) {
                double gx = 0.0, gy = 0.0;
                for (int u = 0; u < 3; ++u) {
                    const int yy = clampi(y + u - 1, H - 1);
                    for (int v = 0; v < 3; ++v) {
                        const int xx = clampi(xp + v - 1, W - 1);
                        const double val = static_cast<double>(x[static_cast<std::size_t>(yy) * W + xx]);
                        gx += kx[u][v] * val;
                        gy += ky[u][v] * val;
                    }
                }
                const double mag = std::sqrt(gx * gx + gy * gy + static_cast<double>(eps));
                const std::size_t p = static_cast<std::size_t>(y) * W + xp;
                const double w = scene.edge_map[p] ? w_edge : w_off;
                loss += w * (mag - sqrt_eps);
                // d(loss)/d(gx) = w * gx / mag, scattered back through the
                // same clamped taps.
                const double dgx = w * gx / mag;
                const double dgy = w * gy / mag;
                for (int u = 0; u < 3; ++u) {
                    const int yy = clampi(y + u - 1, H - 1);
                    for (int v = 0; v < 3; ++v) {
                        const int xx = clampi(xp + v - 1, W - 1);
                        g[static_cast<std::size_t>(yy) * W + xx] +=
                            static_cast<S>(dgx * kx[u][v] + dgy * ky[u][v]);
                    }
                }
            }
    }
    res.value = static_cast<S>(loss);
    return res;
}

// Mean squared error against the min-max rendering of the frame,
// normalized to unit scale:
//   loss = mean(((img - target) / 255)^2)
template <typename S>
LossResult<S> loss_reconstruction(const diff::TensorT<S>& img, const SyntheticScene& scene) {
    detail::require_image_shape(img, scene, "loss_reconstruction image");
    const std::size_t plane = scene.pixel_count();
    ToneMapped8 target = tonemap_minmax(scene.frame);

    LossResult<S> res;
    res.grad = diff::TensorT<S>(img.shape);
    double loss = 0.0;
    const double inv_n = 1.0 / (3.0 * static_cast<double>(plane));
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < plane; ++p) {
            const std::size_t idx = static_cast<std::size_t>(c) * plane + p;
            const double d = (static_cast<double>(img.data[idx]) - target.gray[p]) / 255.0;
            loss += d * d * inv_n;
            res.grad.data[idx] = static_cast<S>(2.0 * d * inv_n / 255.0);
        }
    res.value = static_cast<S>(loss);
    return res;
}

template <typename S>
LossResult<S> evaluate_task_loss(TaskLossKind kind, const diff::TensorT<S>& img,
                                 const SyntheticScene& scene) {
    switch (kind) {
        case TaskLossKind::ObjectContrast: return loss_object_contrast(img, scene);
        case TaskLossKind::EdgeFidelity: return loss_edge_fidelity(img, scene);
        case TaskLossKind::Reconstruction: return loss_reconstruction(img, scene);
    }
    throw ValidationError("unknown task loss kind");
}

} // namespace tcmap
