#include <benchmark/benchmark.h>

#include <cstdint>

#include "tasep/sim.hpp"

using namespace tasep;

static sim::SimConfig config(std::int64_t n, double rho) {
  sim::SimConfig c;
  c.n = n;
  c.speed = SpeedFunction::two_phase(2.0, 1.0);
  c.rho0 = InitialProfile::constant(rho);
  c.t_end = 0.25;
  c.window = sim::window_for(n, c.speed, c.t_end, -0.5, 0.5);
  return c;
}

// Events per second of the production engine.
static void BM_SimEvents(benchmark::State& state) {
  auto c = config(state.range(0), 0.3);
  std::uint64_t events = 0;
  for (auto _ : state) {
    ++c.seed;
    const auto snaps = sim::run(c, {c.t_end});
    events += snaps.back().events;
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimEvents)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_ClockStream(benchmark::State& state) {
  sim::ClockStream stream(3, -5000, 5000, [](std::int64_t m) { return m < 0 ? 2.0 : 1.0; });
  for (auto _ : state) benchmark::DoNotOptimize(stream.next());
}
BENCHMARK(BM_ClockStream);
