#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "tasep/sim.hpp"

using namespace tasep;
using namespace tasep::sim;

namespace {

SimConfig base_config(std::int64_t n, const SpeedFunction& speed, const InitialProfile& rho0, double t,
                      SiteWindow w, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.speed = speed;
  cfg.rho0 = rho0;
  cfg.t_end = t;
  cfg.window = w;
  cfg.seed = seed;
  return cfg;
}

// One particle at site 0 for n = 1 under the deterministic rule.
InitialProfile single_particle() { return InitialProfile({0.0, 1.0}, {0.0, 1.0, 0.0}); }

struct Moments {
  double mean = 0, var = 0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(xs.size() - 1);
  return m;
}

}  // namespace

TEST(SimRun, EmptySystemStaysEmpty) {
  auto cfg = base_config(100, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.0), 1.0, {-300, 300}, 3);
  auto snaps = run(cfg, {0.0, 0.5, 1.0});
  ASSERT_EQ(snaps.size(), 3u);
  for (const auto& s : snaps) {
    EXPECT_EQ(std::accumulate(s.eta.begin(), s.eta.end(), 0), 0);
    for (auto j : s.J) EXPECT_EQ(j, 0);
    EXPECT_EQ(empirical_density(s, -1.0, 1.0, 100), 0.0);
  }
}

TEST(SimRun, PackedInteriorNeverMoves) {
  auto cfg = base_config(50, SpeedFunction::constant(1.0), InitialProfile::constant(1.0), 1.0, {-200, 200}, 9);
  cfg.initial = InitialKind::Deterministic;
  cfg.observe = {{-1.0, 1.0}};
  auto s = run(cfg, {1.0}).front();
  for (std::int64_t i = -51; i <= 51; ++i) {
    EXPECT_TRUE(s.occupied(i));
    EXPECT_EQ(s.current(i), 0);
  }
}

TEST(SimRun, PackedClockSystemNeverMoves) {
  auto cfg = base_config(10, SpeedFunction::constant(1.0), InitialProfile::constant(1.0), 5.0, {-10, 9}, 2);
  cfg.initial = InitialKind::Deterministic;
  HeightSystem z(cfg);
  ClockStream clocks(cfg.seed, -10, 9, [](std::int64_t) { return 1.0; });
  for (int e = 0; e < 500; ++e) EXPECT_FALSE(z.apply(clocks.next(), 1.0));
}

TEST(SimRun, FreeParticleDisplacementIsPoisson) {
  const double c = 1.5, T = 2.0;
  std::vector<double> disp;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    auto cfg = base_config(1, SpeedFunction::constant(c), single_particle(), T, {-2, 60}, seed);
    cfg.initial = InitialKind::Deterministic;
    auto s = run(cfg, {T}).front();
    ASSERT_TRUE(s.occupied(std::accumulate(s.J.begin(), s.J.end(), std::int64_t{0})));
    disp.push_back(static_cast<double>(std::accumulate(s.J.begin(), s.J.end(), std::int64_t{0})));
  }
  auto m = moments(disp);
  const double se = std::sqrt(c * T / static_cast<double>(disp.size()));
  EXPECT_NEAR(m.mean, c * T, 3 * se);
  // Poisson variance equals the mean; the sample variance has sd about sqrt(2/N) * var.
  EXPECT_NEAR(m.var, c * T, 4 * std::sqrt(2.0 / static_cast<double>(disp.size())) * c * T);
}

TEST(SimRun, FreeParticlePassesSiteOnce) {
  auto cfg = base_config(1, SpeedFunction::constant(1.0), single_particle(), 200.0, {-2, 400}, 5);
  cfg.initial = InitialKind::Deterministic;
  auto s = run(cfg, {200.0}).front();
  EXPECT_EQ(s.current(3), 1);
  EXPECT_EQ(s.current(-1), 0);
}

TEST(SimRun, BernoulliDensityAtTimeZero) {
  const std::int64_t n = 4000;
  for (double rho : {0.1, 0.3, 0.7}) {
    auto cfg = base_config(n, SpeedFunction::constant(1.0), InitialProfile::constant(rho), 0.0, {-2 * n, 2 * n}, 11);
    auto s = run(cfg, {0.0}).front();
    EXPECT_NEAR(empirical_density(s, 0.0, 1.0, n), rho, 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST(SimRun, DeterministicInitialDataMatchesAntiderivative) {
  const std::int64_t n = 200;
  InitialProfile rho0({0.0}, {0.25, 0.6});
  auto cfg = base_config(n, SpeedFunction::constant(1.0), rho0, 0.0, {-400, 400}, 0);
  cfg.initial = InitialKind::Deterministic;
  auto s = run(cfg, {0.0}).front();
  EXPECT_NEAR(empirical_density(s, -1.0, 0.0, n), 0.25, 1.0 / n);
  EXPECT_NEAR(empirical_density(s, 0.0, 1.0, n), 0.6, 1.0 / n);
}

TEST(SimRun, HeightAndCurrentBookkeeping) {
  const std::int64_t n = 200;
  auto speed = SpeedFunction::two_phase(2, 1);
  auto cfg = base_config(n, speed, InitialProfile::constant(0.4), 1.0, window_for(n, speed, 1.0, -0.5, 0.5), 21);
  cfg.observe = {{-0.5, 0.5}};
  auto snaps = run(cfg, {0.0, 0.25, 0.5, 1.0});
  const auto w = cfg.window;
  std::int64_t initial_count = 0;
  for (std::int64_t i = w.i_min; i <= w.i_max; ++i) initial_count += cfg.initial_occupied(i);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const auto& s = snaps[k];
    std::int64_t prev_z = s.height(w.i_min);
    for (std::int64_t i = w.i_min; i <= w.i_max; ++i) {
      const std::int64_t z = s.height(i);
      if (i > w.i_min) {
        EXPECT_GE(z - prev_z, 0);
        EXPECT_LE(z - prev_z, 1);
      }
      prev_z = z;
      EXPECT_EQ(s.current(i), cfg.initial_height(i) - z) << "site " << i;
      if (k > 0) {
        EXPECT_GE(s.current(i), snaps[k - 1].current(i));
      }
    }
    const std::int64_t count = std::accumulate(s.eta.begin(), s.eta.end(), std::int64_t{0});
    EXPECT_EQ(count, initial_count - s.current(w.i_max));
  }
  EXPECT_EQ(current(snaps, 0, 0.5), snaps[2].current(0));
  EXPECT_THROW(current(snaps, 0, 0.3), SimError);
}

TEST(SimRun, DeterministicPerSeed) {
  const std::int64_t n = 100;
  auto speed = SpeedFunction::two_phase(2, 1);
  auto cfg = base_config(n, speed, InitialProfile::constant(0.3), 1.0, window_for(n, speed, 1.0, -1, 1), 77);
  auto a = run(cfg, {0.5, 1.0});
  auto b = run(cfg, {0.5, 1.0});
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].eta, b[k].eta);
    EXPECT_EQ(a[k].J, b[k].J);
    EXPECT_EQ(a[k].events, b[k].events);
  }
  cfg.seed = 78;
  auto c = run(cfg, {0.5, 1.0});
  EXPECT_NE(a[1].J, c[1].J);
}

TEST(SimRun, WindowOverflowIsReported) {
  auto cfg = base_config(100, SpeedFunction::constant(1.0), InitialProfile::constant(0.5), 2.0, {-60, 60}, 1);
  cfg.observe = {{-0.3, 0.3}};
  EXPECT_THROW(run(cfg, {2.0}), WindowOverflow);
  cfg.window = window_for(100, cfg.speed, 2.0, -0.3, 0.3);
  EXPECT_NO_THROW(run(cfg, {2.0}));
}

TEST(SimRun, RejectsBadInput) {
  auto cfg = base_config(10, SpeedFunction::constant(1.0), InitialProfile::constant(0.5), 1.0, {-10, 10}, 1);
  EXPECT_THROW(run(cfg, {2.0}), SimError);
  EXPECT_THROW(run(cfg, {0.5, 0.2}), SimError);
  cfg.observe = {{-1.0, 1.0}};
  EXPECT_THROW(run(cfg, {0.5}), SimError);
  cfg.observe.reset();
  auto s = run(cfg, {0.5}).front();
  EXPECT_THROW(empirical_density(s, -5.0, 0.0, 10), SimError);
}

TEST(SimRun, SnapshotRoundTrip) {
  auto cfg = base_config(30, SpeedFunction::constant(1.0), InitialProfile::constant(0.5), 1.0, {-37, 50}, 4);
  auto s = run(cfg, {1.0}).front();
  auto path = std::filesystem::temp_directory_path() / "tasep_snapshot_roundtrip.bin";
  write_snapshot(s, path);
  auto r = read_snapshot(path);
  std::filesystem::remove(path);
  EXPECT_EQ(r.n, s.n);
  EXPECT_EQ(r.window.i_min, s.window.i_min);
  EXPECT_EQ(r.window.i_max, s.window.i_max);
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.eta, s.eta);
}

TEST(SimRun, EnginesAgreeInDistribution) {
  // Grouped engine against the per-site clock replay on the same law.
  const std::int64_t n = 10;
  auto speed = SpeedFunction::two_phase(2, 1);
  const double t = 1.0;
  const auto w = window_for(n, speed, t, -0.5, 0.5);
  std::vector<double> a, b;
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    auto cfg = base_config(n, speed, InitialProfile::constant(0.5), t, w, seed);
    a.push_back(static_cast<double>(run(cfg, {t}).front().current(0)));
    HeightSystem z(cfg);
    ClockStream clocks(seed ^ 0xabcdef, w.i_min, w.i_max, [&](std::int64_t m) { return cfg.rate(m); });
    for (Ring r = clocks.next(); r.time <= n * t; r = clocks.next()) z.apply(r, clocks.dominating(r.site));
    b.push_back(static_cast<double>(z.current(0)));
  }
  auto ma = moments(a), mb = moments(b);
  const double se = std::sqrt(ma.var / a.size() + mb.var / b.size());
  EXPECT_NEAR(ma.mean, mb.mean, 4 * se);
}

TEST(Clocks, StreamIsOrderedAndReproducible) {
  ClockStream a(5, -3, 3, [](std::int64_t m) { return m < 0 ? 2.0 : 1.0; });
  ClockStream b(5, -3, 3, [](std::int64_t m) { return m < 0 ? 2.0 : 1.0; });
  double last = 0;
  for (int e = 0; e < 1000; ++e) {
    Ring r = a.next(), s = b.next();
    EXPECT_GE(r.time, last);
    EXPECT_EQ(r.time, s.time);
    EXPECT_EQ(r.site, s.site);
    EXPECT_GT(r.mark, 0.0);
    EXPECT_LE(r.mark, 1.0);
    last = r.time;
  }
}

TEST(Clocks, InvariantsAfterEveryEvent) {
  auto cfg = base_config(10, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.5), 10.0, {-10, 9}, 8);
  auto rate = [&](std::int64_t m) { return cfg.rate(m); };
  HeightSystem z(cfg);
  XiSystem xi(-2, -8, 11, rate);
  ClockStream clocks(cfg.seed, -10, 9, rate);
  std::vector<std::int64_t> J(20, 0);
  for (int e = 0; e < 2000; ++e) {
    Ring r = clocks.next();
    z.apply(r, clocks.dominating(r.site));
    xi.apply(r, clocks.dominating(r.site));
    ASSERT_TRUE(z.gradient_ok());
    ASSERT_TRUE(xi.inequalities_ok());
    for (std::int64_t i = -10; i <= 9; ++i) {
      ASSERT_GE(z.current(i), J[static_cast<std::size_t>(i + 10)]);
      J[static_cast<std::size_t>(i + 10)] = z.current(i);
    }
  }
}

TEST(Clocks, RaisingRatesNeverLowersCurrents) {
  auto slow = base_config(10, SpeedFunction::two_phase(1.5, 0.5), InitialProfile::constant(0.5), 10.0, {-10, 9}, 0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    slow.seed = seed;
    auto fast = slow;
    fast.speed = SpeedFunction::two_phase(2.0, 1.0);
    HeightSystem zs(slow), zf(fast);
    ClockStream clocks(seed, -10, 9, [&](std::int64_t m) { return fast.rate(m); });
    for (int e = 0; e < 1000; ++e) {
      Ring r = clocks.next();
      zs.apply(r, clocks.dominating(r.site));
      zf.apply(r, clocks.dominating(r.site));
      for (std::int64_t i = -10; i <= 9; ++i) ASSERT_GE(zf.current(i), zs.current(i)) << "seed " << seed;
    }
  }
}

TEST(RunXi, BoundaryTargetsAreZero) {
  auto cfg = base_config(50, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.0), 100.0, {0, 0}, 1);
  EXPECT_EQ(run_xi(0, cfg, 4, 0), 0.0);
  EXPECT_EQ(run_xi(3, cfg, -5, 5), 0.0);
  EXPECT_THROW(run_xi(0, cfg, -6, 5), SimError);
}

TEST(RunXi, FirstStepIsExponential) {
  for (std::int64_t k : {-7, 4}) {
    std::vector<double> times;
    auto cfg = base_config(50, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.0), 1e3, {0, 0}, 0);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      cfg.seed = seed;
      times.push_back(run_xi(k, cfg, 0, 1));
    }
    const double mean = 1.0 / cfg.rate(k);
    auto m = moments(times);
    EXPECT_NEAR(m.mean, mean, 3 * mean / std::sqrt(10000.0)) << "k=" << k;
  }
}

TEST(RunXi, HorizonExceededCarriesPartialData) {
  auto cfg = base_config(50, SpeedFunction::constant(1.0), InitialProfile::constant(0.0), 0.01, {0, 0}, 1);
  try {
    run_xi(0, cfg, 3, 20);
    FAIL() << "expected HorizonExceeded";
  } catch (const HorizonExceeded& e) {
    EXPECT_LT(e.reached, 20);
    EXPECT_DOUBLE_EQ(e.t, 0.5);
  }
}

TEST(Envelope, HoldsAtTimeZero) {
  auto cfg = base_config(10, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.5), 0.0, {-10, 9}, 3);
  std::vector<std::int64_t> sites;
  for (std::int64_t i = -10; i <= 9; ++i) sites.push_back(i);
  auto r = envelope_check(cfg, 0.0, {-11, 10}, sites);
  EXPECT_TRUE(r.holds());
  EXPECT_EQ(r.events, 0);
  EXPECT_EQ(r.checks, 20);
}

TEST(Envelope, ExactOnCoupledSmallSystems) {
  std::vector<std::int64_t> sites;
  for (std::int64_t i = -10; i <= 9; ++i) sites.push_back(i);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto cfg = base_config(10, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.5), 100.0, {-10, 9}, seed);
    auto r = envelope_check(cfg, 100.0, {-11, 10}, sites, false, 1000);
    EXPECT_EQ(r.events, 1000);
    EXPECT_TRUE(r.holds()) << "seed " << seed << ": " << (r.violations.empty() ? "inconclusive" : r.violations[0]);
  }
}

TEST(Envelope, DecoupledClocksAreFlagged) {
  std::vector<std::int64_t> sites;
  for (std::int64_t i = -10; i <= 9; ++i) sites.push_back(i);
  std::int64_t flagged = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = base_config(10, SpeedFunction::two_phase(2, 1), InitialProfile::constant(0.5), 100.0, {-10, 9}, seed);
    flagged += envelope_check(cfg, 100.0, {-11, 10}, sites, true, 1000).violation_count > 0;
  }
  EXPECT_EQ(flagged, 10);
}

TEST(Envelope, NarrowShiftRangeIsInconclusive) {
  std::vector<std::int64_t> sites{-10, -5, 0, 5, 9};
  auto cfg = base_config(10, SpeedFunction::constant(1.0), InitialProfile::constant(0.5), 100.0, {-10, 9}, 6);
  auto r = envelope_check(cfg, 100.0, {2, 3}, sites, false, 200);
  EXPECT_TRUE(r.inconclusive);
}
