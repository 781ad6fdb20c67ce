#include <benchmark/benchmark.h>

#include "tcmap/embedding.hpp"

namespace {

tcmap::TemperatureMap make_temp(int width, int height) {
    tcmap::TemperatureMap t;
    t.width = width;
    t.height = height;
    t.celsius.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            t.celsius[static_cast<std::size_t>(y) * width + x] =
                static_cast<float>(5.0 + 25.0 * std::sin(0.013 * x) + 0.03 * y);
    return t;
}

void BM_Embed(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto temp = make_temp(640, 512);
    auto periods = tcmap::sample_periods(n, 42);
    for (auto _ : state) {
        auto emb = tcmap::embed(temp, periods);
        benchmark::DoNotOptimize(emb.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 640 * 512 * n);
}

void BM_SamplePeriods(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto p = tcmap::sample_periods(10, ++seed);
        benchmark::DoNotOptimize(p.periods.data());
    }
}

} // namespace

BENCHMARK(BM_Embed)->Arg(1)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SamplePeriods);
