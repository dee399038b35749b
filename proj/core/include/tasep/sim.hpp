#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tasep/speed.hpp"

namespace tasep::sim {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A boundary disturbance reached the observation interval before the last
/// snapshot.
class WindowOverflow : public SimError {
 public:
  using SimError::SimError;
};

/// Hitting time not reached before the horizon. `reached` holds the
/// interface height at the target site when the run stopped.
class HorizonExceeded : public SimError {
 public:
  HorizonExceeded(const std::string& what, std::int64_t reached, double t)
      : SimError(what), reached(reached), t(t) {}
  std::int64_t reached;
  double t;
};

enum class InitialKind { Bernoulli, Deterministic };

struct SiteWindow {
  std::int64_t i_min;
  std::int64_t i_max;
  std::int64_t size() const { return i_max - i_min + 1; }
  bool contains(std::int64_t i) const { return i >= i_min && i <= i_max; }
};

struct SimConfig {
  std::int64_t n = 1;
  SiteWindow window{0, 0};
  SpeedFunction speed = SpeedFunction::constant(1.0);
  InitialProfile rho0 = InitialProfile::constant(0.0);
  InitialKind initial = InitialKind::Bernoulli;
  double t_end = 0.0;  // macroscopic; the run covers event time n * t_end
  std::uint64_t seed = 0;
  /// Macroscopic interval whose sites must stay free of boundary effects.
  /// Empty means the whole window is checked only at its edges.
  std::optional<std::pair<double, double>> observe;

  double rate(std::int64_t i) const { return speed(static_cast<double>(i) / static_cast<double>(n)); }
  /// Initial occupation of site i; defined on all of Z.
  bool initial_occupied(std::int64_t i) const;
  /// z_i(0) with z_0(0) = 0 and z_{i+1} - z_i = eta_{i+1}.
  std::int64_t initial_height(std::int64_t i) const;

  /// Throws SimError on an inconsistent configuration.
  void validate() const;
};

/// Sites covering [lo, hi] padded by c_max t + 6 sqrt(c_max t n) / n.
SiteWindow window_for(std::int64_t n, const SpeedFunction& speed, double t_end, double lo, double hi);

/// Frozen state at one observation time.
struct Snapshot {
  std::int64_t n = 1;
  double t = 0.0;  // macroscopic
  SiteWindow window{0, 0};
  std::vector<std::uint8_t> eta;
  std::vector<std::int64_t> J;   // jumps across the bond (i, i+1)
  std::int64_t z_base = 0;       // z at i_min at time 0
  std::uint64_t events = 0;

  bool occupied(std::int64_t i) const;
  std::int64_t current(std::int64_t i) const;
  /// z_i(t) = z_i(0) - J_i(t).
  std::int64_t height(std::int64_t i) const;
  std::int64_t initial_height(std::int64_t i) const;
};

/// Exact continuous-time dynamics on the window. Nothing enters at i_min and
/// particles jumping from i_max leave (counted in J_{i_max}). With an
/// observation interval, two fronts started just outside the window step
/// inwards on the rings of the clock at their site; a front inside the
/// observed sites raises WindowOverflow. Snapshots come back in the order
/// of `observe_times`, which must be nondecreasing and within [0, t_end].
std::vector<Snapshot> run(const SimConfig& config, const std::vector<double>& observe_times);

/// n^-1 times the particle count on sites floor(na)+1 .. floor(nb).
double empirical_density(const Snapshot& state, double a, double b, std::int64_t n);

/// J_i at macroscopic time t from a list of snapshots.
std::int64_t current(const std::vector<Snapshot>& history, std::int64_t i, double t);

/// Header (magic, n, i_min, i_max, t) followed by occupation bits, LSB first.
void write_snapshot(const Snapshot& state, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Common-clock construction. Every site m carries a Poisson clock of rate
// `dominating(m)`; each ring carries a uniform mark, and a system with rate
// c_m treats the ring as its own when mark * dominating(m) < c_m. Systems fed
// the same stream are coupled.

struct Ring {
  double time;
  std::int64_t site;
  double mark;
};

class ClockStream {
 public:
  ClockStream(std::uint64_t seed, std::int64_t lo, std::int64_t hi, std::function<double(std::int64_t)> dominating);

  /// Next ring over all sites in [lo, hi], in time order.
  Ring next();
  double dominating(std::int64_t m) const { return rates_[static_cast<std::size_t>(m - lo_)]; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }

 private:
  void schedule(std::int64_t m);

  std::uint64_t seed_;
  std::int64_t lo_;
  std::int64_t hi_;
  std::vector<double> rates_;
  std::vector<double> next_time_;
  std::vector<std::uint64_t> count_;
  std::vector<std::pair<double, std::int64_t>> heap_;
};

/// Height process on a finite set of active clocks; sites outside never move.
class HeightSystem {
 public:
  HeightSystem(const SimConfig& config);

  /// Applies a ring at site m with the given mark and dominating rate.
  /// Returns true when z_m decreased.
  bool apply(const Ring& ring, double dominating);
  std::int64_t height(std::int64_t i) const;
  std::int64_t current(std::int64_t i) const;
  bool occupied(std::int64_t i) const;
  /// Checks 0 <= z_{i+1} - z_i <= 1 on the window.
  bool gradient_ok() const;
  const SiteWindow& window() const { return window_; }

 private:
  const SimConfig* config_;
  SiteWindow window_;
  std::vector<std::int64_t> z_;  // window plus one site on each side
};

/// Interface xi^{n,k}: xi_j is driven by the clock at site j + k and grows
/// when xi_j + 1 <= xi_{j-1} and xi_j + 1 <= xi_{j+1} + 1. Starts from the
/// wedge xi_j(0) = max(0, -j). Sites outside [j_lo, j_hi] stay at their
/// initial value.
class XiSystem {
 public:
  XiSystem(std::int64_t k, std::int64_t j_lo, std::int64_t j_hi, std::function<double(std::int64_t)> rate);

  bool apply(const Ring& ring, double dominating);
  std::int64_t value(std::int64_t j) const;
  /// Both interface inequalities on the simulated range.
  bool inequalities_ok() const;
  std::int64_t shift() const { return k_; }

 private:
  std::int64_t k_;
  std::int64_t j_lo_;
  std::int64_t j_hi_;
  std::function<double(std::int64_t)> rate_;
  std::vector<std::int64_t> xi_;
};

/// L^{n,k}(i, j): first time xi_i reaches j, in event (unscaled) time.
/// Boundary targets return 0. Throws HorizonExceeded past n * t_end.
double run_xi(std::int64_t k, const SimConfig& config, std::int64_t i, std::int64_t j);

struct EnvelopeReport {
  std::int64_t checks = 0;
  std::int64_t events = 0;
  std::vector<std::string> violations;  // first few, human readable
  std::int64_t violation_count = 0;
  bool inconclusive = false;

  bool holds() const { return violation_count == 0 && !inconclusive; }
};

/// Replays one coupled realization up to event time n * t and checks
/// z_i = max_{k in [k_lo, k_hi]} (z_k(0) - xi^k_{i-k}) for every i in `sites`
/// after every event. With `decouple` the interfaces use an independent clock
/// stream. Stops after `max_events` events when that is positive.
EnvelopeReport envelope_check(const SimConfig& config, double t, std::pair<std::int64_t, std::int64_t> k_range,
                              const std::vector<std::int64_t>& sites, bool decouple = false,
                              std::int64_t max_events = 0);

}  // namespace tasep::sim
