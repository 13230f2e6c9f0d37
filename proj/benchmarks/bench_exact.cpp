#include <benchmark/benchmark.h>

#include "popsim/exact.hpp"
#include "popsim/protocols.hpp"

namespace {

void BM_EnumerateReachable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto protocol = popsim::protocols::pairwise_elimination(n);
  for (auto _ : state) benchmark::DoNotOptimize(popsim::exact::enumerate_reachable(protocol, n).size());
}
BENCHMARK(BM_EnumerateReachable)->Arg(8)->Arg(14)->Unit(benchmark::kMillisecond);

// Rational solve below the exact limit, double LU above it.
void BM_StabilizationSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto space = popsim::exact::enumerate_reachable(popsim::protocols::pairwise_elimination(n), n);
  for (auto _ : state) benchmark::DoNotOptimize(popsim::exact::expected_stabilization_steps(space).value);
}
BENCHMARK(BM_StabilizationSolve)->Arg(5)->Arg(7)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
