#include <benchmark/benchmark.h>

#include "mixtopo/invariants.hpp"

using namespace mixtopo;

namespace {

const BlochModel kModel = BlochModel::aniso_qah();

void BM_UhlmannHolonomy(benchmark::State& state) {
    const StateRule rule(kModel, Thermal{1.3});
    const KPath loop = KPath::coordinate_loop(Axis::x, 0.3, -kPi, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(uhlmann_holonomy(rule, loop));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UhlmannHolonomy)->Arg(125)->Arg(500)->Arg(2000)->Complexity(benchmark::oN);

void BM_PhaseProfile(benchmark::State& state) {
    const StateRule rule(kModel, Thermal{1.3});
    for (auto _ : state) benchmark::DoNotOptimize(phase_profile(rule, Axis::x, -kPi, 500, 100, {1}));
}
BENCHMARK(BM_PhaseProfile)->Unit(benchmark::kMillisecond);

void BM_ChernDVector(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(chern_dvector(kModel, KGrid(n, n)));
}
BENCHMARK(BM_ChernDVector)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_UhlmannChern(benchmark::State& state) {
    const StateRule rule(kModel, Thermal{1.3});
    const auto n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(uhlmann_chern(rule, KGrid(n, n), {}, ChernOptions{1, {}}));
}
BENCHMARK(BM_UhlmannChern)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_HolonomyGap(benchmark::State& state) {
    const StateRule rule(kModel, Thermal{1.3});
    for (auto _ : state) benchmark::DoNotOptimize(holonomy_gap(rule, KGrid(20, 20), 500, {1}));
}
BENCHMARK(BM_HolonomyGap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
