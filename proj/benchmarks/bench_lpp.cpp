#include <benchmark/benchmark.h>

#include "tasep/lpp.hpp"
#include "tasep/speed.hpp"

using namespace tasep;

static void BM_CornerGrowth(benchmark::State& state) {
  const auto side = state.range(0);
  const auto field = lpp::WeightField::corner(SpeedFunction::two_phase(2.0, 1.0), side, 7, side, side);
  for (auto _ : state) benchmark::DoNotOptimize(lpp::corner_growth(side, side, field));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_CornerGrowth)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

static void BM_WedgeT(benchmark::State& state) {
  const auto n = state.range(0);
  const lpp::Site target{n, n};
  const auto field =
      lpp::WeightField::wedge(SpeedFunction::two_phase(2.0, 1.0), n, 0, 7, lpp::wedge_box(target));
  for (auto _ : state) benchmark::DoNotOptimize(lpp::wedge_T(target, field));
}
BENCHMARK(BM_WedgeT)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

static void BM_CounterHashWeight(benchmark::State& state) {
  const auto field = lpp::WeightField::wedge(SpeedFunction::two_phase(2.0, 1.0), 100, 0, 7,
                                             lpp::LatticeBox{-1000, 1000, 0, 1000});
  std::int64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field(i % 1000, i % 997));
    ++i;
  }
}
BENCHMARK(BM_CounterHashWeight);
