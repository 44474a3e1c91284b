#include <benchmark/benchmark.h>

#include "kgl/gl4.hpp"
#include "kgl/kloosterman.hpp"
#include "kgl/orbital.hpp"

using namespace kgl;

static void BM_S2Restricted(benchmark::State& state) {
    const long long l = state.range(0);
    NuParam one{1, 0};
    PrimeContext ctx(3, working_precision(2, l + 1, 1), root_order(l, 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2_restricted(one, one, l, 1, ctx));
    }
}
BENCHMARK(BM_S2Restricted)->DenseRange(1, 4);

static void BM_EnumerateGL3(benchmark::State& state) {
    const long long a = state.range(0);
    CellSpec spec = CellSpec::make(2, 3, 1, {a, a});
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_cell(spec));
    }
}
BENCHMARK(BM_EnumerateGL3)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_GL4Generic(benchmark::State& state) {
    CellSpec spec = CellSpec::make(2, 4, 1, {1, 2, 1});
    for (auto _ : state) {
        benchmark::DoNotOptimize(kloosterman_sum(spec));
    }
}
BENCHMARK(BM_GL4Generic)->Unit(benchmark::kMillisecond);

static void BM_GL4Fast(benchmark::State& state) {
    CellSpec spec = CellSpec::make(2, 4, 1, {1, 2, 1});
    for (auto _ : state) {
        benchmark::DoNotOptimize(kloosterman_gl4_fast(spec));
    }
}
BENCHMARK(BM_GL4Fast)->Unit(benchmark::kMillisecond);

static void BM_OrbitalBruteforce(benchmark::State& state) {
    TorusDiag a{{2, 0, -2}, {1, 1, 1}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(orbital_bruteforce(a, 3));
    }
}
BENCHMARK(BM_OrbitalBruteforce)->Unit(benchmark::kMillisecond);

static void BM_StevensIdentity(benchmark::State& state) {
    CellSpec spec = CellSpec::make(3, 3, 1, {2, 2});
    for (auto _ : state) {
        benchmark::DoNotOptimize(stevens_identity_check(spec));
    }
}
BENCHMARK(BM_StevensIdentity)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
