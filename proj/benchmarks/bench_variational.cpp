#include <benchmark/benchmark.h>

#include "tasep/speed.hpp"
#include "tasep/variational.hpp"

using namespace tasep;

static void BM_GammaQ(benchmark::State& state) {
  const auto speed = SpeedFunction::two_phase(2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(variational::gamma_q(0.3, 1.0, speed, 0.2).value);
}
BENCHMARK(BM_GammaQ);

static void BM_HydroV(benchmark::State& state) {
  const auto speed = SpeedFunction::two_phase(2.0, 1.0);
  const auto rho0 = InitialProfile::constant(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(variational::hydro_v(0.4, 1.0, speed, rho0));
}
BENCHMARK(BM_HydroV)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
