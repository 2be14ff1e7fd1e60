#include <mkreg/harness.hpp>
#include <mkreg/kernel.hpp>
#include <mkreg/manifold.hpp>
#include <mkreg/regression.hpp>

#include <benchmark/benchmark.h>

namespace {

void BM_HeatKernelEval(benchmark::State& state) {
    const auto mfd = mkreg::Manifold::sphere3();
    const mkreg::KernelSpec spec(mfd, mkreg::Heat{static_cast<double>(state.range(0)) / 100.0});
    const auto pts = mfd.sample_uniform(2, 42);
    for (auto _ : state) benchmark::DoNotOptimize(spec.eval(pts[0], pts[1]));
}
BENCHMARK(BM_HeatKernelEval)->Arg(25)->Arg(75);

void BM_GramAssembly(benchmark::State& state) {
    const auto mfd = mkreg::Manifold::sphere2();
    const mkreg::KernelSpec spec(mfd, mkreg::Heat{0.5});
    const auto pts = mfd.sample_uniform(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(spec.gram(pts));
}
BENCHMARK(BM_GramAssembly)->Arg(64)->Arg(256);

void BM_BandlimitedFit(benchmark::State& state) {
    const auto mfd = mkreg::Manifold::circle();
    const mkreg::KernelSpec spec(mfd, mkreg::Bandlimited{2.5});
    const long n = state.range(0);
    mkreg::Samples s;
    s.points = mfd.sample_uniform(static_cast<int>(n), 3);
    s.responses.resize(n);
    mkreg::Rng rng(9);
    for (long i = 0; i < n; ++i) s.responses[i] = rng.gaussian();
    for (auto _ : state) benchmark::DoNotOptimize(mkreg::fit(spec, s, 0.0));
}
BENCHMARK(BM_BandlimitedFit)->Arg(500)->Arg(4000);

void BM_EigenbasisEval(benchmark::State& state) {
    const auto mfd = mkreg::Manifold::sphere3();
    const auto x = mfd.sample_uniform(1, 5)[0];
    const double lambda = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mfd.eval_eigenfunctions(x, lambda));
}
BENCHMARK(BM_EigenbasisEval)->Arg(15)->Arg(63);

} // namespace

BENCHMARK_MAIN();
