#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "seelab/analytics.hpp"
#include "seelab/experiments.hpp"
#include "seelab/noise.hpp"
#include "seelab/simulate.hpp"

using namespace seelab;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Model nonlinear_model() {
    Model m{Eigenstructure::power_law(kPi2, 2.0), {}, {}};
    m.drift.kind = DriftSpec::Kind::DiagonalNemytskii;
    m.drift.theta = 0.3;
    m.diffusion.kind = DiffusionSpec::Kind::DiagonalNemytskii;
    m.diffusion.half_theta = 0.26;
    return m;
}

SimConfig sweep_config(std::size_t samples) {
    SimConfig cfg;
    cfg.T = 1.0;
    cfg.steps = 64;
    cfg.n_ref = 128;
    cfg.n_galerkin = 32;
    cfg.samples = samples;
    cfg.seed = 1;
    return cfg;
}

void BM_FillGaussians(benchmark::State& state) {
    std::vector<double> z(static_cast<std::size_t>(state.range(0)));
    std::uint64_t step = 0;
    for (auto _ : state) {
        fill_gaussians(7, 0, step++, 1, z.size(), z.data());
        benchmark::DoNotOptimize(z.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillGaussians)->Arg(64)->Arg(512);

void BM_StepperStep(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    Model m = nonlinear_model();
    Stepper st(m, 1.0 / 256, 0.0, dim, ModeSet::full(), dim, dim);
    std::vector<double> x(dim, 0.1), z(dim);
    fill_gaussians(3, 0, 0, 1, dim, z.data());
    for (auto _ : state) {
        st.step(x, z);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepperStep)->Arg(64)->Arg(512);

void BM_WeakSweep(benchmark::State& state, ExecPolicy policy) {
    SimConfig cfg = sweep_config(256);
    Model m = nonlinear_model();
    const std::vector<std::size_t> ns{8, 16, 32};
    for (auto _ : state) {
        auto curve = weak_sweep(cfg, m, Phi::ExpNegSq, ns, SweepMode::MonteCarlo, 1e-14, policy);
        benchmark::DoNotOptimize(curve.points.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.samples));
}
BENCHMARK_CAPTURE(BM_WeakSweep, serial, ExecPolicy::Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_WeakSweep, parallel, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ExactOuSamples(benchmark::State& state, ExecPolicy policy) {
    SimConfig cfg = sweep_config(4096);
    cfg.n_ref = 512;
    cfg.scheme = Scheme::ExactOU;
    Model m{Eigenstructure::power_law(kPi2, 2.0), {}, {}};
    for (auto _ : state) {
        auto e = mc_strong_error(cfg, m, 64, 512, policy);
        benchmark::DoNotOptimize(e.mean);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.samples));
}
BENCHMARK_CAPTURE(BM_ExactOuSamples, serial, ExecPolicy::Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_ExactOuSamples, parallel, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ExpWeakErrorOracle(benchmark::State& state) {
    OUSetup s{Eigenstructure::power_law(kPi2, 2.0), 0.0, 1.0, 1e-14, 1.0};
    for (auto _ : state) {
        auto e = exp_weak_error_exact(s, ModeSet::prefix(static_cast<std::size_t>(state.range(0))));
        benchmark::DoNotOptimize(e.value);
    }
}
BENCHMARK(BM_ExpWeakErrorOracle)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
