#include <benchmark/benchmark.h>

#include <random>

#include "mixtopo/matcore.hpp"

using namespace mixtopo;

namespace {

CMatrix random_matrix(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> d;
    CMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = cplx{d(g), d(g)};
    return a;
}

void BM_HermEig(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const CMatrix a = random_matrix(n, 1);
    const CMatrix h = a + a.adjoint();
    for (auto _ : state) benchmark::DoNotOptimize(herm_eig(h));
}
BENCHMARK(BM_HermEig)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_Svd(benchmark::State& state) {
    const CMatrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(svd(a));
}
BENCHMARK(BM_Svd)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_UnitaryPolar(benchmark::State& state) {
    const CMatrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(unitary_polar(a));
}
BENCHMARK(BM_UnitaryPolar)->Arg(2)->Arg(4)->Arg(8);

void BM_SqrtPsd(benchmark::State& state) {
    const CMatrix a = random_matrix(static_cast<std::size_t>(state.range(0)), 4);
    const CMatrix p = a * a.adjoint();
    for (auto _ : state) benchmark::DoNotOptimize(sqrt_psd(p));
}
BENCHMARK(BM_SqrtPsd)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
