// Serial reference vs OpenMP kernels, and the simulation driver in both modes.

#include <benchmark/benchmark.h>

#include "mexed/distribution.hpp"
#include "mexed/kernels.hpp"
#include "mexed/sim_study.hpp"

namespace {

using namespace mexed;

const Params kTruth(0.5, 1.0, 0.5);

template <kernels::LikelihoodDerivatives (*Kernel)(const Params&, std::span<const double>, kernels::Order)>
void BM_likelihood(benchmark::State& state) {
  const Dataset d = sample(kTruth, static_cast<std::size_t>(state.range(0)), 42);
  const auto order = static_cast<kernels::Order>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(Params(0.45, 0.9, 0.6), d.values(), order));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int order : {0, 3})
    for (int n : {100, 10000, 1000000}) b->Args({n, order});
}

BENCHMARK(BM_likelihood<kernels::serial::likelihood>)->Name("likelihood/serial")->Apply(kernel_args);
BENCHMARK(BM_likelihood<kernels::omp::likelihood>)->Name("likelihood/omp")->Apply(kernel_args);

void BM_study(benchmark::State& state) {
  SimConfig c;
  c.sample_sizes = {50};
  c.replications = 16;
  c.estimators = {Estimator::mle, Estimator::mcmc};
  const auto exec = state.range(0) ? Execution::parallel : Execution::serial;
  for (auto _ : state) benchmark::DoNotOptimize(run_study(c, exec));
}

BENCHMARK(BM_study)->Name("simulation/serial")->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_study)->Name("simulation/parallel")->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
