// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "cfcsr/imhof.hpp"
#include "cfcsr/simulate.hpp"
#include "cfcsr/spectrum.hpp"
#include "cfcsr/statistic.hpp"

using namespace cfcsr;

namespace {

PointPattern pattern(long n) {
    Rng rng = make_rng(1, 0);
    return sim_csr(n, 2, rng);
}

void BM_StatisticSerial(benchmark::State& state) {
    const auto p = pattern(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cf_statistic_serial(p, 8.0));
    state.SetComplexityN(state.range(0));
}

void BM_StatisticOpenMP(benchmark::State& state) {
    const auto p = pattern(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cf_statistic(p, 8.0));
    state.SetComplexityN(state.range(0));
    state.counters["threads"] = omp_get_max_threads();
}

void BM_StatisticGrid(benchmark::State& state) {
    const auto p = pattern(state.range(0));
    std::vector<double> grid(64);
    for (int i = 0; i < 64; ++i) grid[i] = 1.0 + i;
    for (auto _ : state) {
        CfDistanceCache cache(p);
        benchmark::DoNotOptimize(cache.statistic(grid));
    }
}

// mc_null_sample runs replicates in parallel; one thread is the serial reference.
void BM_NullSample(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads > 0 ? threads : saved);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mc_null_sample([](const PointPattern& q) { return cf_statistic_serial(q, 8.0); }, 50, 2, 2000, 3));
    omp_set_num_threads(saved);
    state.counters["threads"] = threads > 0 ? threads : saved;
}

void BM_BuildSpectrum(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_spectrum(static_cast<double>(state.range(0)), 2));
}

void BM_ImhofCdf(benchmark::State& state) {
    const auto sp = build_spectrum(8.0, 2);
    for (auto _ : state) {
        const ImhofEvaluator ev(sp);
        benchmark::DoNotOptimize(ev.cdf(sp.sum_all));
    }
}

}  // namespace

BENCHMARK(BM_StatisticSerial)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_StatisticOpenMP)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_StatisticGrid)->Arg(100)->Arg(1000);
BENCHMARK(BM_NullSample)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildSpectrum)->Arg(1)->Arg(8)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImhofCdf)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
