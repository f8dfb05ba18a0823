// Parallel kernels against their serial references.
//
//   THIRRING_THREADS=4 ./bench_kernels --benchmark_filter=march

#include <benchmark/benchmark.h>

#include <random>

#include "thirring/kernels.hpp"
#include "thirring/solver.hpp"

using namespace thirring;

namespace {

InitialData data_for(std::size_t n) {
    const DataSpec spec{GaussianProfile{0.8, 0.3, -0.2, 1.0}, GaussianProfile{0.8, 0.3, 0.2, 0.0}};
    return generate_data(spec, diagonal_axis(NullGrid(1.0, n)));
}

template <auto Sweep>
void picard(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const InitialData d = data_for(n);
    const SpinorPair in = transported(d, Extent::forward);
    SpinorPair out(n, Extent::forward);
    const double h = 2.0 / static_cast<double>(n - 1);
    for (auto _ : state) benchmark::DoNotOptimize(Sweep(h, d.f, d.g, {1.0, 1.0}, in, out));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * (n + 1) / 2));
}

template <auto March>
void marching(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const InitialData d = data_for(n);
    SpinorPair out(n, Extent::forward);
    const double h = 2.0 / static_cast<double>(n - 1);
    for (auto _ : state) {
        March(h, d.f, d.g, {1.0, 1.0}, out);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * (n + 1) / 2));
}

template <auto Seminorm>
void gagliardo(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> u;
    std::vector<cplx> v(n);
    for (auto& z : v) z = {u(rng), u(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(Seminorm(v, 1.0 / static_cast<double>(n), 0.25));
}

}  // namespace

BENCHMARK(picard<&picard_sweep>)->Name("picard_sweep")->Arg(257)->Arg(1025);
// The serial reference re-sums every row and column per node (cubic cost); keep it small.
BENCHMARK(picard<&reference::picard_sweep>)->Name("picard_sweep/reference")->Arg(257)->Arg(513);
BENCHMARK(marching<&march>)->Name("march")->Arg(257)->Arg(1025);
BENCHMARK(marching<&reference::march>)->Name("march/reference")->Arg(257)->Arg(1025);
BENCHMARK(gagliardo<&gagliardo_seminorm_sq>)->Name("gagliardo")->Arg(1025)->Arg(8193);
BENCHMARK(gagliardo<&reference::gagliardo_seminorm_sq>)->Name("gagliardo/reference")->Arg(1025)->Arg(8193);

BENCHMARK_MAIN();
