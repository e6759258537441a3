#include <benchmark/benchmark.h>

#include "hlab/hermite.hpp"
#include "hlab/rng.hpp"

using namespace hlab;

static void BM_EvalAll(benchmark::State& state) {
    const int n = int(state.range(0));
    std::vector<double> pts(n + 1);
    for (int i = 0; i <= n; ++i) pts[i] = -6.0 + 12.0 * i / double(n);
    for (auto _ : state) {
        auto m = hermite_eval_all(n, pts);
        benchmark::DoNotOptimize(m.data());
    }
}
BENCHMARK(BM_EvalAll)->Arg(64)->Arg(256)->Arg(1024);

static void BM_Nodes(benchmark::State& state) {
    const int order = int(state.range(0));
    for (auto _ : state) {
        auto g = gauss_hermite_grid(order);
        benchmark::DoNotOptimize(g.nodes_1d.data());
    }
}
BENCHMARK(BM_Nodes)->Arg(128)->Arg(512)->Arg(2048);

static void BM_Synthesize2d(benchmark::State& state) {
    auto table = build_mode_table(2, state.range(0));
    SpectralField f(table);
    for (std::size_t i = 0; i < table.size(); ++i) f.coeffs[i] = rng::complex_gaussian(1, 0, i);
    auto grid = gauss_hermite_grid(table.max_index_1d + 2);
    for (auto _ : state) {
        auto v = synthesize(f, grid);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(BM_Synthesize2d)->Arg(30)->Arg(82)->Arg(162);

BENCHMARK_MAIN();
