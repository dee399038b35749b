#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tasep {

/// Positive, lower semicontinuous step function on the real line.
///
/// `rates[m]` is the value on the open interval between `breakpoints[m-1]`
/// and `breakpoints[m]` (with the outermost intervals unbounded), so
/// `rates.size() == breakpoints.size() + 1`. At a breakpoint the function
/// takes the smaller of its two one-sided values.
///
/// Breakpoints whose neighbouring rates coincide are dropped on construction.
/// Instances are immutable.
class SpeedFunction {
 public:
  SpeedFunction(std::vector<double> breakpoints, std::vector<double> rates);

  static SpeedFunction constant(double rate);
  /// c1 on x < 0, c2 on x > 0, min(c1, c2) at 0.
  static SpeedFunction two_phase(double c1, double c2);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;

  /// Limits from the left and from the right at x.
  double left_limit(double x) const;
  double right_limit(double x) const;

  /// The function x -> c(x - shift).
  SpeedFunction shifted(double shift) const;

  /// Extremes over the closed interval [lo, hi].
  double max_rate(double lo, double hi) const;
  double min_rate(double lo, double hi) const;
  double max_rate() const;
  double min_rate() const;

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> rates() const { return rates_; }
  bool is_constant() const { return breakpoints_.empty(); }

  friend bool operator==(const SpeedFunction&, const SpeedFunction&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> rates_;
};

/// Two-phase speed with a single discontinuity at the origin.
struct TwoPhaseSpeed {
  double c1;  ///< rate on x < 0
  double c2;  ///< rate on x >= 0 (the lsc value at 0 is min(c1, c2))

  double operator()(double x) const;
  SpeedFunction as_speed() const { return SpeedFunction::two_phase(c1, c2); }
};

/// Lower and upper step-function bounds with sup-distance at most eps.
/// Step inputs bound themselves, so this returns (f, f).
std::pair<SpeedFunction, SpeedFunction> sandwich(const SpeedFunction& f, double eps);

/// Piecewise-constant initial density with values in [0, 1] and its
/// antiderivative v0 normalised by v0(0) = 0.
///
/// Layout matches SpeedFunction: `densities[m]` holds between consecutive
/// breakpoints. Point values at breakpoints are the right-hand values (the
/// density only matters up to null sets).
class InitialProfile {
 public:
  InitialProfile(std::vector<double> breakpoints, std::vector<double> densities);

  static InitialProfile constant(double rho);

  double density(double x) const;
  double antiderivative(double x) const;

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> densities() const { return densities_; }
  bool is_constant() const { return breakpoints_.empty(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> densities_;
  std::vector<double> cumulative_;  // v0 at each breakpoint
};

}  // namespace tasep
