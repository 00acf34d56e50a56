#include <benchmark/benchmark.h>

#include <random>

#include "nf/dispersion.hpp"
#include "nf/moments.hpp"
#include "nf/network.hpp"

using namespace nf;

namespace {

geometry::Kernels kernels() { return {geometry::ConnectivityKernel(-3.0, 1.0), geometry::DelayKernel(1.0, 0.4)}; }

models::ModelSpec model() {
    models::FiringRateParams p;
    p.sigma = 0.1;
    return models::make_firing_rate(p, geometry::ConnectivityKernel(-3.0, 1.0));
}

void BM_NetworkSimulate(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto pops = static_cast<std::size_t>(std::ceil(std::sqrt(double(n))));
    const auto layout = network::build_layout(pops, network::equal_sizes(n, pops), geometry::SpatialDomain{}, 1);
    network::SimConfig sc;
    sc.dt = 1e-2;
    sc.t_end = 1.0;
    sc.record_stride = 100;
    sc.engine = st.range(1) ? network::Engine::Pairwise : network::Engine::Aggregated;
    const auto init = network::InitLaw::constant({0.2});
    for (auto _ : st) benchmark::DoNotOptimize(network::simulate(model(), layout, kernels(), sc, init));
    st.SetItemsProcessed(st.iterations() * 100 * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_NetworkSimulate)->Args({256, 1})->Args({1024, 1})->Args({1024, 0})->Args({16384, 0})
    ->Unit(benchmark::kMillisecond);

void BM_MomentSolve(benchmark::State& st) {
    models::FiringRateParams fp;
    fp.sigma = 0.1;
    meanfield::MomentConfig mc;
    mc.grid_size = static_cast<std::size_t>(st.range(0));
    mc.dt = 1e-3;
    mc.t_end = 1.0;
    mc.record_stride = 100;
    for (auto _ : st)
        benchmark::DoNotOptimize(meanfield::solve_moments(meanfield::MomentParams::from(fp), kernels(), mc));
}
BENCHMARK(BM_MomentSolve)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DispersionResidual(benchmark::State& st) {
    bifurcation::DispersionParams p;
    bifurcation::cplx xi{-0.1, 2.0};
    for (auto _ : st) {
        benchmark::DoNotOptimize(bifurcation::dispersion_residual(xi, p));
        xi += bifurcation::cplx{0.0, 1e-9};
    }
}
BENCHMARK(BM_DispersionResidual);

void BM_FindRoots(benchmark::State& st) {
    bifurcation::DispersionParams p;
    p.tau_s = 0.5;
    for (auto _ : st) benchmark::DoNotOptimize(bifurcation::find_roots(p, {}, 0, 2));
}
BENCHMARK(BM_FindRoots)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
