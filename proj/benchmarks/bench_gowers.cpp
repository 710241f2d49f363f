#include "hpl/gowers.hpp"
#include "hpl/numeric.hpp"

#include <benchmark/benchmark.h>

namespace {

hpl::FiniteSequence kronecker_seq(std::uint64_t n) {
    hpl::FiniteSequence f;
    f.offset = 1;
    hpl::FixedAngle alpha(0.41421356237309515);
    for (std::uint64_t i = 1; i <= n; ++i)
        f.data.push_back(hpl::e_of(alpha.frac_mul(static_cast<long long>(i))));
    return f;
}

} // namespace

static void BM_GowersInterval(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    const int s = static_cast<int>(state.range(1));
    auto f = kronecker_seq(n);
    for (auto _ : state) {
        auto r = hpl::gowers_interval(f, 1, static_cast<long long>(n), s);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_GowersInterval)
    ->Args({1024, 2})
    ->Args({16384, 2})
    ->Args({1024, 3})
    ->Args({4096, 3});

static void BM_CyclicDirect(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    auto f = kronecker_seq(n);
    for (auto _ : state) {
        auto r = hpl::gowers_cyclic_direct(f.data, 2);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_CyclicDirect)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
