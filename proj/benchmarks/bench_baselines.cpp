#include <benchmark/benchmark.h>

#include "tcmap/baselines.hpp"
#include "tcmap/rng.hpp"

namespace {

tcmap::RadiometricFrame random_frame(int w, int h, std::uint64_t seed) {
    tcmap::Rng rng(seed);
    tcmap::RadiometricFrame f;
    f.width = w;
    f.height = h;
    f.bit_depth = 14;
    f.counts.resize(static_cast<std::size_t>(w) * h);
    for (auto& c : f.counts) c = static_cast<std::uint32_t>(rng.uniform_index(16384));
    return f;
}

void BM_Minmax(benchmark::State& state) {
    auto f = random_frame(640, 512, 3);
    for (auto _ : state) benchmark::DoNotOptimize(tcmap::tonemap_minmax(f).gray.data());
}

void BM_Clip(benchmark::State& state) {
    auto f = random_frame(640, 512, 3);
    for (auto _ : state) benchmark::DoNotOptimize(tcmap::tonemap_clip(f).gray.data());
}

void BM_He(benchmark::State& state) {
    auto f = random_frame(640, 512, 3);
    for (auto _ : state) benchmark::DoNotOptimize(tcmap::tonemap_he(f).gray.data());
}

void BM_FieldscaleLite(benchmark::State& state) {
    auto f = random_frame(640, 512, 3);
    for (auto _ : state) benchmark::DoNotOptimize(tcmap::tonemap_fieldscale_lite(f).gray.data());
}

} // namespace

BENCHMARK(BM_Minmax)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Clip)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_He)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldscaleLite)->Unit(benchmark::kMillisecond);
