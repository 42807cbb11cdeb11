#include "ethlab/eth_stats.hpp"
#include "ethlab/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace ethlab;

static void BM_Diagonalize(benchmark::State& state) {
    const WignerSample w = sample(builtin("gue", state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(w));
}
BENCHMARK(BM_Diagonalize)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_DiagonalizeReal(benchmark::State& state) {
    const WignerSample w = sample(builtin("goe", state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(w));
}
BENCHMARK(BM_DiagonalizeReal)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

// Length-two chain swept over a z grid; the basis change is cached after the first call.
static void BM_ChainSweep(benchmark::State& state) {
    const long n = state.range(0);
    const SpectralData s = diagonalize(sample(builtin("gue", n), 2));
    const Observable a = observables::traceless_signs(n);
    ChainEvaluator eval(s);
    for (auto _ : state) {
        for (int k = 0; k < 16; ++k) {
            const cdouble z(-1.5 + 0.2 * k, 0.05);
            ChainSpec c = ChainSpec::trace({{z}, {z, ResolventVariant::adjoint}});
            c.weights = {&a, &a};
            benchmark::DoNotOptimize(eval.value(c));
        }
    }
}
BENCHMARK(BM_ChainSweep)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_XiWindow(benchmark::State& state) {
    const long n = state.range(0);
    const SpectralData s = diagonalize(sample(builtin("gue", n), 3));
    const OverlapMatrix m = overlap_matrix(s, observables::traceless_signs(n), OverlapKind::plain);
    for (auto _ : state) benchmark::DoNotOptimize(xi_window(m, default_window(n)));
}
BENCHMARK(BM_XiWindow)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
