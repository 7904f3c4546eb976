// Serial reference vs OpenMP sliding-range kernel, plus the full EMG-dropout
// detector on a long synthetic log.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ebb/forensics.hpp"
#include "ebb/window_scan.hpp"

namespace {

std::vector<float> random_series(std::size_t n) {
    std::mt19937_64 rng(7);
    std::vector<float> x(n);
    for (auto& v : x) v = static_cast<float>(rng() % 1024);
    return x;
}

void BM_SlidingRangeSerial(benchmark::State& state) {
    const auto x = random_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto r = ebb::kernels::sliding_range_serial(x, 30);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SlidingRangeParallel(benchmark::State& state) {
    const auto x = random_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto r = ebb::kernels::sliding_range_parallel(x, 30);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DetectEmgDropout(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    std::mt19937_64 rng(11);
    ebb::EbbLog log;
    for (std::uint32_t t = 0; t < n; ++t) {
        ebb::EbbRecord r;
        r.seq = t;
        r.t = t;
        for (auto id : ebb::kEmgChannels) r[id] = static_cast<float>(rng() % 300);
        r[ebb::ChannelId::PosLeft] = r[ebb::ChannelId::PosRight] = static_cast<float>(rng() % 120);
        r[ebb::ChannelId::TempLeft] = r[ebb::ChannelId::TempRight] = 20.0F;
        log.records.push_back(r);
    }
    const ebb::forensics::DetectorConfig cfg;
    for (auto _ : state) {
        auto f = ebb::forensics::detect_emg_dropout(log, cfg);
        benchmark::DoNotOptimize(f.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SlidingRangeSerial)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_SlidingRangeParallel)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_DetectEmgDropout)->Arg(7200)->Arg(1 << 18);

BENCHMARK_MAIN();
