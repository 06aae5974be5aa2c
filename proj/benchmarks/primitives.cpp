#include <benchmark/benchmark.h>

#include "causal/gbn.hpp"
#include "causal/graph.hpp"
#include "causal/metrics.hpp"
#include "causal/rng.hpp"
#include "causal/stats.hpp"

using namespace causal;

namespace {

Dag make_dag(int n, double p, std::uint64_t seed) { return random_gbn(n, p, seed).dag(); }

}  // namespace

static void DSeparation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dag g = make_dag(n, 0.3, 42);
    Rng rng(1);
    for (auto _ : state) {
        const NodeId x = static_cast<NodeId>(rng.uniform_int(n));
        NodeId y = static_cast<NodeId>(rng.uniform_int(n));
        if (y == x) y = (y + 1) % n;
        std::vector<NodeId> z;
        for (NodeId v = 0; v < n; ++v) {
            if (v != x && v != y && rng.uniform() < 0.2) z.push_back(v);
        }
        benchmark::DoNotOptimize(d_separated(g, x, y, z));
    }
}
BENCHMARK(DSeparation)->Arg(10)->Arg(30)->Arg(100);

static void FisherZTest(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const GbnModel model = random_gbn(m, 0.3, 7);
    const Dataset data = sample_observational(model, 2000, 8);
    const CorrelationMatrix corr = correlation_matrix(data);
    Rng rng(2);
    for (auto _ : state) {
        const int x = static_cast<int>(rng.uniform_int(m));
        int y = static_cast<int>(rng.uniform_int(m));
        if (y == x) y = (y + 1) % m;
        std::vector<int> s;
        for (int v = 0; v < m && s.size() < 3; ++v) {
            if (v != x && v != y && rng.uniform() < 0.3) s.push_back(v);
        }
        benchmark::DoNotOptimize(fisher_z_test(corr, x, y, s, 0.05));
    }
}
BENCHMARK(FisherZTest)->Arg(10)->Arg(50);

static void DagToCpdag(benchmark::State& state) {
    const Dag g = make_dag(static_cast<int>(state.range(0)), 0.3, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dag_to_cpdag(g));
    }
}
BENCHMARK(DagToCpdag)->Arg(10)->Arg(30);

static void SidPair(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dag truth = make_dag(n, 0.3, 21);
    const Dag est = make_dag(n, 0.3, 22);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sid(truth, est));
    }
}
BENCHMARK(SidPair)->Arg(10)->Arg(20);

static void AncestralSampling(benchmark::State& state) {
    const GbnModel model = random_gbn(10, 0.3, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_observational(model, static_cast<int>(state.range(0)), 9));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(AncestralSampling)->Range(1000, 100000)->Complexity();

BENCHMARK_MAIN();
