#include "tasep/speed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tasep {

namespace {

void check_layout(const std::vector<double>& breakpoints, std::size_t values, const char* what) {
  if (values != breakpoints.size() + 1) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(breakpoints.size() + 1) + " values for " +
                                std::to_string(breakpoints.size()) + " breakpoints, got " +
                                std::to_string(values));
  }
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (!std::isfinite(breakpoints[k])) {
      throw std::invalid_argument(std::string(what) + ": breakpoints must be finite");
    }
    if (k > 0 && !(breakpoints[k - 1] < breakpoints[k])) {
      throw std::invalid_argument(std::string(what) + ": breakpoints must be strictly increasing");
    }
  }
}

// Index of the open interval containing x, or of the interval to the right of
// x when x is itself a breakpoint.
std::size_t interval_index(std::span<const double> breakpoints, double x) {
  return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                  breakpoints.begin());
}

}  // namespace

SpeedFunction::SpeedFunction(std::vector<double> breakpoints, std::vector<double> rates) {
  check_layout(breakpoints, rates.size(), "SpeedFunction");
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("SpeedFunction: rates must be positive and finite");
    }
  }
  rates_.push_back(rates.front());
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (rates[k + 1] == rates_.back()) continue;
    breakpoints_.push_back(breakpoints[k]);
    rates_.push_back(rates[k + 1]);
  }
}

SpeedFunction SpeedFunction::constant(double rate) { return SpeedFunction({}, {rate}); }

SpeedFunction SpeedFunction::two_phase(double c1, double c2) { return SpeedFunction({0.0}, {c1, c2}); }

double SpeedFunction::eval(double x) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto idx = static_cast<std::size_t>(it - breakpoints_.begin());
  if (it != breakpoints_.end() && *it == x) return std::min(rates_[idx], rates_[idx + 1]);
  return rates_[idx];
}

double SpeedFunction::left_limit(double x) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return rates_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

double SpeedFunction::right_limit(double x) const { return rates_[interval_index(breakpoints_, x)]; }

SpeedFunction SpeedFunction::shifted(double shift) const {
  std::vector<double> bps(breakpoints_);
  for (double& b : bps) b += shift;
  return SpeedFunction(std::move(bps), rates_);
}

double SpeedFunction::max_rate(double lo, double hi) const {
  if (lo > hi) std::swap(lo, hi);
  if (lo == hi) return eval(lo);
  // Values at breakpoints never exceed the neighbouring interval rates.
  const auto first = interval_index(breakpoints_, lo);
  const auto last = static_cast<std::size_t>(
      std::lower_bound(breakpoints_.begin(), breakpoints_.end(), hi) - breakpoints_.begin());
  return *std::max_element(rates_.begin() + static_cast<std::ptrdiff_t>(first),
                           rates_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

double SpeedFunction::min_rate(double lo, double hi) const {
  if (lo > hi) std::swap(lo, hi);
  // Closed interval: a breakpoint endpoint contributes min of both sides.
  const auto first = static_cast<std::size_t>(
      std::lower_bound(breakpoints_.begin(), breakpoints_.end(), lo) - breakpoints_.begin());
  const auto last = interval_index(breakpoints_, hi);
  return *std::min_element(rates_.begin() + static_cast<std::ptrdiff_t>(first),
                           rates_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

double SpeedFunction::max_rate() const { return *std::max_element(rates_.begin(), rates_.end()); }

double SpeedFunction::min_rate() const { return *std::min_element(rates_.begin(), rates_.end()); }

double TwoPhaseSpeed::operator()(double x) const {
  if (x < 0.0) return c1;
  if (x > 0.0) return c2;
  return std::min(c1, c2);
}

std::pair<SpeedFunction, SpeedFunction> sandwich(const SpeedFunction& f, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("sandwich: eps must be positive");
  return {f, f};
}

InitialProfile::InitialProfile(std::vector<double> breakpoints, std::vector<double> densities)
    : breakpoints_(std::move(breakpoints)), densities_(std::move(densities)) {
  check_layout(breakpoints_, densities_.size(), "InitialProfile");
  for (double d : densities_) {
    if (!(d >= 0.0 && d <= 1.0)) {
      throw std::invalid_argument("InitialProfile: densities must lie in [0, 1]");
    }
  }
  // v0 at each breakpoint, integrating outward from the origin.
  cumulative_.assign(breakpoints_.size(), 0.0);
  const auto zero = interval_index(breakpoints_, 0.0);
  double acc = 0.0;
  double pos = 0.0;
  for (std::size_t k = zero; k < breakpoints_.size(); ++k) {
    acc += densities_[k] * (breakpoints_[k] - pos);
    pos = breakpoints_[k];
    cumulative_[k] = acc;
  }
  acc = 0.0;
  pos = 0.0;
  for (std::size_t k = zero; k-- > 0;) {
    acc -= densities_[k + 1] * (pos - breakpoints_[k]);
    pos = breakpoints_[k];
    cumulative_[k] = acc;
  }
}

InitialProfile InitialProfile::constant(double rho) { return InitialProfile({}, {rho}); }

double InitialProfile::density(double x) const { return densities_[interval_index(breakpoints_, x)]; }

double InitialProfile::antiderivative(double x) const {
  const auto idx = interval_index(breakpoints_, x);
  const auto zero = interval_index(breakpoints_, 0.0);
  if (idx == zero) return densities_[idx] * x;
  if (idx > zero) return cumulative_[idx - 1] + densities_[idx] * (x - breakpoints_[idx - 1]);
  return cumulative_[idx] - densities_[idx] * (breakpoints_[idx] - x);
}

}  // namespace tasep
