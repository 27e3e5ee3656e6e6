#include <benchmark/benchmark.h>

#include <vector>

#include "vircomp/parallel.hpp"

using namespace vircomp;

namespace {

const Dynamics kDyn{{3.0, 1.0, 10.0, 12.0}, {0.9, 0.5}};
const CostWeights kWeights{10.0};

std::vector<State> seed_grid(int n) {
    std::vector<State> seeds;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) seeds.push_back({12.0 * (i + 0.5) / n, 12.0 * (j + 0.5) / n});
    }
    return seeds;
}

template <bool Parallel>
void BM_Bundle(benchmark::State& state) {
    const TimeGrid grid{0.0, 20.0, 0.01};
    const std::vector<double> schedule(grid.intervals(), 0.5);
    const auto seeds = seed_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto b = Parallel ? integrate_bundle(StepMethod::Rk4, kDyn, schedule, grid, seeds, kWeights)
                          : integrate_bundle_serial(StepMethod::Rk4, kDyn, schedule, grid, seeds, kWeights);
        benchmark::DoNotOptimize(b.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seeds.size()));
}

template <bool Parallel>
void BM_ArrowField(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto a = Parallel ? arrow_field(kDyn, 0.5, 12.0, 12.0, n, n) : arrow_field_serial(kDyn, 0.5, 12.0, 12.0, n, n);
        benchmark::DoNotOptimize(a.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <bool Parallel>
void BM_FdGradient(benchmark::State& state) {
    const TimeGrid grid{0.0, 60.0, 0.5};
    const std::vector<double> schedule(grid.intervals(), 0.4);
    for (auto _ : state) {
        auto g = Parallel
                     ? finite_difference_gradient(StepMethod::Rk4, kDyn, kWeights, grid, {1, 1}, schedule, 1e-6)
                     : finite_difference_gradient_serial(StepMethod::Rk4, kDyn, kWeights, grid, {1, 1}, schedule, 1e-6);
        benchmark::DoNotOptimize(g.data());
    }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Bundle, false)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Bundle, true)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_ArrowField, false)->Arg(15)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK_TEMPLATE(BM_ArrowField, true)->Arg(15)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK_TEMPLATE(BM_FdGradient, false)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_FdGradient, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
