#include "tcmap/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "tcmap/adam.hpp"
#include "tcmap/error.hpp"
#include "tcmap/radiometry.hpp"
#include "tcmap/rng.hpp"

namespace tcmap {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;     // network init stream
constexpr std::uint64_t kShuffleTag = 0x73687566;  // epoch shuffle stream
constexpr std::uint64_t kPeriodTag = 0x70657269;   // per-step period stream
constexpr std::uint64_t kEvalTag = 0x6576616c;     // frozen evaluation periods

diff::TensorT<float> embed_batch(const std::vector<const TemperatureMap*>& temps,
                                 const PeriodSet& periods, bool parallel) {
    const int B = static_cast<int>(temps.size());
    const int N = periods.size();
    const int H = temps[0]->height, W = temps[0]->width;
    diff::TensorT<float> batch({B, N, H, W});
    const std::size_t per = static_cast<std::size_t>(N) * H * W;

    auto fill = [&](int b) {
        ThermalEmbedding emb = embed(*temps[b], periods);
        std::copy(emb.data.begin(), emb.data.end(), batch.data.begin() + b * per);
    };
    if (parallel && B > 1) {
        const int workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                            static_cast<unsigned>(B)));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int b = w; b < B; b += workers) fill(b);
            });
        for (auto& t : pool) t.join();
    } else {
        for (int b = 0; b < B; ++b) fill(b);
    }
    return batch;
}

diff::TensorT<float> slice_image(const diff::TensorT<float>& batch_out, int b, int H, int W) {
    diff::TensorT<float> img({3, H, W});
    const std::size_t per = static_cast<std::size_t>(3) * H * W;
    std::copy(batch_out.data.begin() + b * per, batch_out.data.begin() + (b + 1) * per,
              img.data.begin());
    return img;
}

} // namespace

TaskLossKind task_loss_from_name(const std::string& name) {
    if (name == "object_contrast") return TaskLossKind::ObjectContrast;
    if (name == "edge_fidelity") return TaskLossKind::EdgeFidelity;
    if (name == "reconstruction") return TaskLossKind::Reconstruction;
    throw ValidationError("unknown task loss '" + name +
                          "' (expected object_contrast, edge_fidelity or reconstruction)");
}

std::string task_loss_name(TaskLossKind kind) {
    switch (kind) {
        case TaskLossKind::ObjectContrast: return "object_contrast";
        case TaskLossKind::EdgeFidelity: return "edge_fidelity";
        case TaskLossKind::Reconstruction: return "reconstruction";
    }
    return "unknown";
}

void TrainConfig::validate() const {
    if (n_channels < 1) throw ValidationError("n_channels must be >= 1");
    if (!(period_lo > 0.0) || !(period_hi >= period_lo))
        throw ValidationError("period range must satisfy 0 < lo <= hi");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (!(lr >= 0.0)) throw ValidationError("lr must be >= 0");
}

TrainResult train(const TrainConfig& config, const std::vector<SyntheticScene>& scenes,
                  const CameraProfile& profile) {
    config.validate();
    if (scenes.empty()) throw ValidationError("training needs a nonempty scene set");

    const int N = config.n_channels;
    const int H = scenes[0].temp.height, W = scenes[0].temp.width;
    for (const auto& s : scenes)
        if (s.temp.height != H || s.temp.width != W)
            throw ValidationError("training scenes disagree on dimensions");

    // The network sees the full pipeline: counts -> temperature -> embedding.
    std::vector<TemperatureMap> temps;
    temps.reserve(scenes.size());
    for (const auto& s : scenes) temps.push_back(counts_to_celsius(s.frame, profile));

    TrainResult result;
    result.net = CompressionNet::random_init(N, splitmix64(config.seed ^ kInitTag));
    const PeriodSet frozen_periods =
        sample_periods(N, splitmix64(config.seed ^ kPeriodTag), config.period_lo, config.period_hi);
    result.eval_periods = config.resample_periods_per_step
                              ? sample_periods(N, splitmix64(config.seed ^ kEvalTag),
                                               config.period_lo, config.period_hi)
                              : frozen_periods;

    diff::AdamT<float> adam(static_cast<float>(config.lr));
    auto params = result.net.parameters();
    Rng shuffle_rng(splitmix64(config.seed ^ kShuffleTag));

    std::vector<int> order(scenes.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t global_step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);

        double loss_sum = 0.0;
        int steps_in_epoch = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            const int B = static_cast<int>(end - begin);

            PeriodSet periods =
                config.resample_periods_per_step
                    ? sample_periods(N,
                                     splitmix64(splitmix64(config.seed ^ kPeriodTag) + global_step + 1),
                                     config.period_lo, config.period_hi)
                    : frozen_periods;

            std::vector<const TemperatureMap*> batch_temps(B);
            for (int b = 0; b < B; ++b) batch_temps[b] = &temps[order[begin + b]];
            auto batch = embed_batch(batch_temps, periods, config.parallel_embed);

            auto fwd = compress_forward(batch, result.net);

            double batch_loss = 0.0;
            diff::TensorT<float> grad_out({B, 3, H, W});
            const std::size_t per = static_cast<std::size_t>(3) * H * W;
            for (int b = 0; b < B; ++b) {
                auto img = slice_image(fwd.tonemapped, b, H, W);
                auto lr_res = evaluate_task_loss(config.loss, img, scenes[order[begin + b]]);
                batch_loss += static_cast<double>(lr_res.value) / B;
                for (std::size_t j = 0; j < per; ++j)
                    grad_out.data[b * per + j] = lr_res.grad.data[j] / static_cast<float>(B);
            }
            if (!std::isfinite(batch_loss))
                throw TrainingDiverged(epoch, static_cast<int>(steps_in_epoch),
                                       "loss became non-finite at epoch " + std::to_string(epoch) +
                                           ", step " + std::to_string(steps_in_epoch));

            result.net.zero_grad();
            compress_backward(grad_out, result.net, fwd.cache);
            if (config.lr > 0.0) adam.step(params);

            result.steps.push_back({epoch, steps_in_epoch, batch_loss, periods.periods});
            loss_sum += batch_loss;
            ++steps_in_epoch;
            ++global_step;
        }

        TrainEpochRecord rec;
        rec.epoch = epoch;
        rec.mean_loss = loss_sum / steps_in_epoch;
        ThermalEmbedding probe = embed(temps[0], result.eval_periods);
        rec.omega_probe = compress_image(probe, result.net).weights;
        result.epochs.push_back(std::move(rec));
    }
    return result;
}

WeightReport artifact_rejection_probe(const CompressionNet& net, const PeriodSet& periods,
                                      const std::vector<SyntheticScene>& scenes,
                                      const CameraProfile& profile) {
    periods.validate();
    if (scenes.empty()) throw ValidationError("probe needs at least one scene");
    if (periods.size() != net.n_embeddings)
        throw ValidationError("probe period count does not match the network");

    CompressionWeights avg;
    avg.n = periods.size();
    avg.omega.assign(static_cast<std::size_t>(3) * avg.n, 0.0f);
    for (const auto& scene : scenes) {
        TemperatureMap temp = counts_to_celsius(scene.frame, profile);
        auto res = compress_image(embed(temp, periods), net);
        for (std::size_t i = 0; i < avg.omega.size(); ++i)
            avg.omega[i] += res.weights.omega[i] / static_cast<float>(scenes.size());
    }
    return inspect_weights(avg, periods);
}

} // namespace tcmap
