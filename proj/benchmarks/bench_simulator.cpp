#include <benchmark/benchmark.h>

#include "enerkin/network.hpp"
#include "enerkin/simulator.hpp"

namespace {

enerkin::ReactionNetwork one_type(enerkin::RateFunction rate) {
  enerkin::TypeTable types({0.0});
  enerkin::BinaryChannel ch{1, 1, rate, {{1, 1, 1.0, enerkin::EnergySplit::uniform()}}};
  return enerkin::ReactionNetwork(types, {ch});
}

enerkin::ParticleSystem exponential_state(std::size_t m, std::uint64_t seed) {
  enerkin::Rng rng(seed);
  enerkin::ParticleSystem s;
  for (std::size_t i = 0; i < m; ++i) s.particles.push_back({1, rng.exponential(1.0)});
  return s;
}

void BM_EventsConstantRate(benchmark::State& state) {
  const auto net = one_type(enerkin::RateFunction::constant(1.0));
  enerkin::Simulator sim(net, exponential_state(static_cast<std::size_t>(state.range(0)), 3), 11);
  for (auto _ : state) {
    const auto ev = sim.sample_next_event();
    benchmark::DoNotOptimize(sim.apply(ev));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EventsConstantRate)->Arg(1000)->Arg(10000);

void BM_EventsEnergyDependentRate(benchmark::State& state) {
  const auto net = one_type(enerkin::RateFunction::saturating_sum(1.0, 2.0));
  enerkin::Simulator sim(net, exponential_state(static_cast<std::size_t>(state.range(0)), 3), 11);
  for (auto _ : state) {
    const auto ev = sim.sample_next_event();
    benchmark::DoNotOptimize(sim.apply(ev));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EventsEnergyDependentRate)->Arg(1000)->Arg(4000);

}  // namespace
