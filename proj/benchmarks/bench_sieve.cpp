#include "hpl/sieve.hpp"

#include <benchmark/benchmark.h>

static void BM_SieveBuild(benchmark::State& state) {
    const std::uint64_t limit = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        hpl::VonMangoldtTable t(limit);
        benchmark::DoNotOptimize(t.lambda(limit - 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(limit));
}
BENCHMARK(BM_SieveBuild)->Arg(100000)->Arg(1000000)->Arg(10000000);

static void BM_Psi(benchmark::State& state) {
    const std::uint64_t limit = static_cast<std::uint64_t>(state.range(0));
    hpl::VonMangoldtTable t(limit);
    for (auto _ : state) benchmark::DoNotOptimize(t.psi(limit));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(limit));
}
BENCHMARK(BM_Psi)->Arg(1000000);

BENCHMARK_MAIN();
