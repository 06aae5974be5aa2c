#include <benchmark/benchmark.h>

#include "causal/discovery.hpp"
#include "causal/gbn.hpp"

using namespace causal;

namespace {

Dataset simulated(int m, int n, std::uint64_t seed) {
    return sample_observational(random_gbn(m, 0.3, seed), n, seed + 1);
}

}  // namespace

static void PcRun(benchmark::State& state) {
    const Dataset data = simulated(static_cast<int>(state.range(0)), 2000, 77);
    const CorrelationMatrix corr = correlation_matrix(data);
    DiscoveryOptions opts;
    opts.alpha = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pc(corr, opts));
    }
}
BENCHMARK(PcRun)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void GesRun(benchmark::State& state) {
    const Dataset data = simulated(static_cast<int>(state.range(0)), 2000, 78);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ges(data, {}));
    }
}
BENCHMARK(GesRun)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void FciRun(benchmark::State& state) {
    const Dataset data = simulated(static_cast<int>(state.range(0)), 2000, 79);
    DiscoveryOptions opts;
    opts.alpha = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fci(data, opts));
    }
}
BENCHMARK(FciRun)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void PcSweep(benchmark::State& state) {
    const Dataset data = simulated(10, 2000, 80);
    std::vector<double> grid;
    for (int k = 1; k <= 99; k += static_cast<int>(state.range(0))) grid.push_back(k / 100.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(threshold_sweep(data, "pc", grid));
    }
}
BENCHMARK(PcSweep)->Arg(10)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
