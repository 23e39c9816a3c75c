#include <benchmark/benchmark.h>

#include <random>

#include "phasekit/dyne.hpp"
#include "phasekit/fock.hpp"
#include "phasekit/gaussian.hpp"
#include "phasekit/homodyne.hpp"
#include "phasekit/montecarlo.hpp"
#include "phasekit/povm.hpp"

namespace {

using namespace phasekit;

void BM_fisher_closed(benchmark::State& state) {
    double phi = 0.0;
    for (auto _ : state) {
        phi += 1e-6;
        benchmark::DoNotOptimize(fisher_closed(1.0, -2.0, phi));
    }
}
BENCHMARK(BM_fisher_closed);

void BM_fisher_numeric(benchmark::State& state) {
    const GaussianPureState st(0.0, 1.0, 0.37);
    const DyneConfig dy(-2.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fisher_numeric(st, dy));
    }
}
BENCHMARK(BM_fisher_numeric);

void BM_squeeze_vacuum_closed(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(squeeze_vacuum(1.0, dim));
    }
}
BENCHMARK(BM_squeeze_vacuum_closed)->Arg(128)->Arg(256);

void BM_squeeze_expm(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    TruncatedState vac;
    vac.amplitudes.assign(static_cast<size_t>(dim), {0.0, 0.0});
    vac.amplitudes[0] = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_generator_exponential(vac, SqueezeGen{1.0}));
    }
}
BENCHMARK(BM_squeeze_expm)->Arg(128)->Arg(256);

void BM_povm_probabilities(benchmark::State& state) {
    const SldPovmModel model(1.0, 128);
    double dt = 0.0;
    for (auto _ : state) {
        dt += 1e-7;
        benchmark::DoNotOptimize(model.probabilities(dt));
    }
}
BENCHMARK(BM_povm_probabilities);

void BM_sample_dyne(benchmark::State& state) {
    const GaussianPureState st(0.0, 1.0, 0.3);
    const DyneConfig dy(-1.0, 0.5);
    std::mt19937_64 rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_dyne(st, dy, rng));
    }
}
BENCHMARK(BM_sample_dyne);

ExperimentConfig trial_config(Scheme scheme) {
    ExperimentConfig c;
    c.scheme = scheme;
    c.r = 1.0;
    c.theta_true = 0.7;
    c.total_copies = 10000;
    c.trials = 1;
    c.seed = 7;
    return c;
}

void BM_povm_trial(benchmark::State& state) {
    const auto config = trial_config(Scheme::povm);
    std::uint64_t k = 0;
    for (auto _ : state) {
        std::mt19937_64 rng(trial_seed(config.seed, k++));
        benchmark::DoNotOptimize(two_step_povm_experiment(config, rng));
    }
}
BENCHMARK(BM_povm_trial);

void BM_homodyne_trial(benchmark::State& state) {
    const auto config = trial_config(Scheme::homodyne);
    std::uint64_t k = 0;
    for (auto _ : state) {
        std::mt19937_64 rng(trial_seed(config.seed, k++));
        benchmark::DoNotOptimize(two_step_homodyne_experiment(config, rng));
    }
}
BENCHMARK(BM_homodyne_trial);

}  // namespace

BENCHMARK_MAIN();
