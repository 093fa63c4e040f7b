// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"

using namespace cvqkd;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_Selection(benchmark::State& state) {
    const kernels::SelectionParams p{0.533, 0.5, 0.79};
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::selection(p, n, 42, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DualDetector(benchmark::State& state) {
    const kernels::DualDetectorParams p{0.6, true};
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::dual_detector(p, n, 42, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Events(benchmark::State& state) {
    const kernels::EventStageParams p{0.6, 0.79, 0.0, 1, 2, 3, true};
    const auto n = static_cast<std::size_t>(state.range(0));
    kernels::EventArrays out;
    for (auto _ : state) {
        kernels::events(p, n, out, exec_of(state));
        benchmark::DoNotOptimize(out.bob_x.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Toeplitz(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(5);
    std::vector<std::uint8_t> in(n);
    for (auto& b : in)
        b = rng.bit();
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::toeplitz(in, n / 2, 9, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_Selection)->ArgNames({"n", "omp"})->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_DualDetector)->ArgNames({"n", "omp"})->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_Events)->ArgNames({"n", "omp"})->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_Toeplitz)->ArgNames({"n", "omp"})->ArgsProduct({{1 << 12, 1 << 15}, {0, 1}});

BENCHMARK_MAIN();
