#include <benchmark/benchmark.h>

#include "popsim/engine.hpp"
#include "popsim/protocols.hpp"

namespace {

void BM_SampleInteraction(benchmark::State& state) {
  popsim::Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(popsim::sample_interaction(rng, n));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleInteraction)->Arg(64)->Arg(65536);

// Steps per second of the bare engine, stopping only at the budget.
void BM_TrialSteps(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto protocol = popsim::protocols::pairwise_elimination(n);
  popsim::TrialOptions options;
  options.max_steps = 100'000;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(popsim::run_trial(protocol, n, ++seed, options).steps_taken);
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_TrialSteps)->Arg(1024)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_EpidemicToCompletion(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto entry = popsim::protocols::make("one-way-epidemic", n);
  popsim::TrialOptions options;
  options.initial = entry.initial(n);
  options.stop = entry.stop;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(popsim::run_trial(entry.protocol, n, ++seed, options).steps_taken);
  }
}
BENCHMARK(BM_EpidemicToCompletion)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
