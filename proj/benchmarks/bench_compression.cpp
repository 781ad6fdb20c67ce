#include <benchmark/benchmark.h>

#include "tcmap/compression.hpp"
#include "tcmap/rng.hpp"

namespace {

tcmap::diff::TensorT<float> random_batch(int n, int h, int w, std::uint64_t seed) {
    tcmap::Rng rng(seed);
    tcmap::diff::TensorT<float> batch({1, n, h, w});
    for (auto& v : batch.data) v = static_cast<float>(rng.uniform(0.0, 255.0));
    return batch;
}

void BM_CompressForward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int side = static_cast<int>(state.range(1));
    auto net = tcmap::CompressionNet::random_init(n, 7);
    auto batch = random_batch(n, side, side, 11);
    for (auto _ : state) {
        auto fwd = tcmap::compress_forward(batch, net);
        benchmark::DoNotOptimize(fwd.tonemapped.data.data());
    }
}

void BM_CompressBackward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int side = static_cast<int>(state.range(1));
    auto net = tcmap::CompressionNet::random_init(n, 7);
    auto batch = random_batch(n, side, side, 11);
    auto fwd = tcmap::compress_forward(batch, net);
    tcmap::diff::TensorT<float> grad({1, 3, side, side});
    std::fill(grad.data.begin(), grad.data.end(), 1e-3f);
    for (auto _ : state) {
        net.zero_grad();
        auto g = tcmap::compress_backward(grad, net, fwd.cache);
        benchmark::DoNotOptimize(g.data.data());
    }
}

} // namespace

BENCHMARK(BM_CompressForward)->Args({3, 64})->Args({3, 256})->Args({10, 64})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompressBackward)->Args({3, 64})->Unit(benchmark::kMillisecond);
