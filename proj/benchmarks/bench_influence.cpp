#include <cmath>

#include <benchmark/benchmark.h>

#include "popsim/engine.hpp"
#include "popsim/influence.hpp"

namespace {

popsim::InteractionLog make_log(std::size_t n, std::size_t length) {
  popsim::Rng rng(7);
  popsim::InteractionLog log(n);
  for (std::size_t j = 0; j < length; ++j) log.append(popsim::sample_interaction(rng, n));
  return log;
}

void BM_ForwardUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto log = make_log(n, 4096);
  popsim::InfluencerTable table(n);
  std::size_t j = 0;
  for (auto _ : state) {
    table.forward_update(log[j]);
    j = (j + 1) % log.length();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardUpdate)->Arg(256)->Arg(4096)->Arg(16384);

void BM_BackwardSets(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto log = make_log(n, 8 * n);
  for (auto _ : state) benchmark::DoNotOptimize(popsim::backward_sets(log, 0, log.length()));
}
BENCHMARK(BM_BackwardSets)->Arg(32)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_FirstExceedTime(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const popsim::Protocol protocol("idle", {"q"}, popsim::StateId{0}, {popsim::OutputSymbol::Follower});
  const auto cube_root = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  const popsim::SizeThreshold threshold{double(cube_root * cube_root), cube_root * cube_root};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(popsim::first_exceed_time(protocol, n, ++seed, threshold));
  }
}
BENCHMARK(BM_FirstExceedTime)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
