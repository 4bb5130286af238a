#include <benchmark/benchmark.h>

#include "enerkin/solver.hpp"

namespace {

void BM_GainOneType(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = enerkin::DensityGrid::from_densities(20.0, n, {enerkin::DensityFamily::exponential(1.0)});
  for (auto _ : state) benchmark::DoNotOptimize(enerkin::gain_one_type(grid));
}
BENCHMARK(BM_GainOneType)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RhsMultitypeCanonical(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = enerkin::DensityFamily::gamma(2.0, 1.0);
  const auto e = enerkin::DensityFamily::exponential(1.0);
  enerkin::TypeTable types({0.0, 0.0});
  std::vector<enerkin::BinaryChannel> channels{
      {1, 1, enerkin::RateFunction::constant(1.0), {{1, 1, 1.0, enerkin::EnergySplit::canonical(g, g)}}},
      {1, 2, enerkin::RateFunction::constant(1.0), {{1, 2, 1.0, enerkin::EnergySplit::canonical(g, e)}}},
      {2, 2, enerkin::RateFunction::constant(1.0), {{2, 2, 1.0, enerkin::EnergySplit::uniform()}}}};
  const enerkin::ReactionNetwork net(types, channels);
  const auto grid = enerkin::DensityGrid::from_densities(20.0, n, {g, e}, {0.5, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(enerkin::rhs_multitype(grid, net));
}
BENCHMARK(BM_RhsMultitypeCanonical)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
