#include <benchmark/benchmark.h>

#include "gammaflow/gamma_ops.hpp"
#include "gammaflow/generators.hpp"
#include "gammaflow/integrals.hpp"
#include "gammaflow/oracle.hpp"
#include "gammaflow/paths.hpp"

namespace gf = gammaflow;

namespace {

gf::Exec exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? gf::Exec::serial : gf::Exec::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_SamplePaths(benchmark::State& state) {
    const gf::TimeGrid grid(1.0, 16);
    for (auto _ : state) {
        auto b = gf::sample_paths(grid, 2, 20000, 7, gf::NoiseMode::gaussian, gf::NormalMethod::box_muller,
                                  exec_of(state));
        benchmark::DoNotOptimize(b.increments().data());
    }
    label(state);
}

void BM_Integrate(benchmark::State& state) {
    const gf::TimeGrid grid(1.0, 16);
    const auto e = gf::BanachSpaceSpec::hilbert(4);
    const auto b = gf::sample_paths(grid, 2, 20000, 7, gf::NoiseMode::gaussian);
    const auto phi = gf::random_adapted_process(grid, gf::HilbertSpec{2}, e, 7, 1);
    for (auto _ : state) {
        auto v = gf::integrate(phi, b, exec_of(state));
        benchmark::DoNotOptimize(v.data.data());
    }
    label(state);
}

void BM_GammaNormMC(benchmark::State& state) {
    const gf::TimeGrid grid(1.0, 16);
    const auto e = gf::BanachSpaceSpec::lq(8, 4.0);
    const gf::GammaOperator x(gf::random_matrix(8, 32, 7, 0), grid, gf::HilbertSpec{2}, e);
    for (auto _ : state) {
        auto g = gf::gamma_norm_mc(x, 20000, 7, gf::NormalMethod::box_muller, exec_of(state));
        benchmark::DoNotOptimize(g.value);
    }
    label(state);
}

void BM_UmdRatio(benchmark::State& state) {
    const auto e = gf::BanachSpaceSpec::lq(3, 4.0);
    for (auto _ : state) {
        auto u = gf::umd_ratio(e, 2.0, 10, 1, 7, exec_of(state));
        benchmark::DoNotOptimize(u.max_ratio);
    }
    label(state);
}

}  // namespace

BENCHMARK(BM_SamplePaths)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Integrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GammaNormMC)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UmdRatio)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
