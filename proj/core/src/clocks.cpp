#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tasep/rng.hpp"
#include "tasep/sim.hpp"

namespace tasep::sim {

namespace {
constexpr std::uint64_t kDecoupleTag = 0xdec0'0b1e;
using HeapItem = std::pair<double, std::int64_t>;
constexpr auto kLater = [](const HeapItem& a, const HeapItem& b) { return a > b; };
}  // namespace

ClockStream::ClockStream(std::uint64_t seed, std::int64_t lo, std::int64_t hi,
                         std::function<double(std::int64_t)> dominating)
    : seed_(seed), lo_(lo), hi_(hi) {
  if (hi < lo) throw SimError("clock stream over an empty site range");
  const auto size = static_cast<std::size_t>(hi - lo + 1);
  rates_.resize(size);
  next_time_.assign(size, 0.0);
  count_.assign(size, 0);
  for (std::int64_t m = lo; m <= hi; ++m) {
    rates_[static_cast<std::size_t>(m - lo)] = dominating(m);
    schedule(m);
  }
}

void ClockStream::schedule(std::int64_t m) {
  const auto k = static_cast<std::size_t>(m - lo_);
  next_time_[k] += rng::exp1(rng::counter_hash(seed_, m, static_cast<std::int64_t>(count_[k]), 0)) / rates_[k];
  heap_.emplace_back(next_time_[k], m);
  std::push_heap(heap_.begin(), heap_.end(), kLater);
}

Ring ClockStream::next() {
  std::pop_heap(heap_.begin(), heap_.end(), kLater);
  const auto [time, m] = heap_.back();
  heap_.pop_back();
  const auto k = static_cast<std::size_t>(m - lo_);
  const double mark = rng::open_unit(rng::counter_hash(seed_, m, static_cast<std::int64_t>(count_[k]), 1));
  ++count_[k];
  schedule(m);
  return {time, m, mark};
}

HeightSystem::HeightSystem(const SimConfig& config) : config_(&config), window_(config.window) {
  z_.resize(static_cast<std::size_t>(window_.size() + 2));
  z_[0] = config.initial_height(window_.i_min - 1);
  for (std::int64_t i = window_.i_min; i <= window_.i_max + 1; ++i) {
    const auto k = static_cast<std::size_t>(i - window_.i_min + 1);
    z_[k] = z_[k - 1] + (config.initial_occupied(i) ? 1 : 0);
  }
}

bool HeightSystem::apply(const Ring& ring, double dominating) {
  const std::int64_t m = ring.site;
  if (!window_.contains(m)) return false;
  if (!(ring.mark * dominating < config_->rate(m))) return false;
  const auto k = static_cast<std::size_t>(m - window_.i_min + 1);
  const std::int64_t lowered = z_[k] - 1;
  if (lowered < z_[k - 1] || z_[k + 1] - lowered > 1) return false;
  z_[k] = lowered;
  return true;
}

std::int64_t HeightSystem::height(std::int64_t i) const {
  if (i < window_.i_min - 1 || i > window_.i_max + 1) return config_->initial_height(i);
  return z_[static_cast<std::size_t>(i - window_.i_min + 1)];
}

std::int64_t HeightSystem::current(std::int64_t i) const { return config_->initial_height(i) - height(i); }

bool HeightSystem::occupied(std::int64_t i) const { return height(i) - height(i - 1) == 1; }

bool HeightSystem::gradient_ok() const {
  for (std::size_t k = 1; k < z_.size(); ++k) {
    const std::int64_t d = z_[k] - z_[k - 1];
    if (d < 0 || d > 1) return false;
  }
  return true;
}

XiSystem::XiSystem(std::int64_t k, std::int64_t j_lo, std::int64_t j_hi, std::function<double(std::int64_t)> rate)
    : k_(k), j_lo_(j_lo), j_hi_(j_hi), rate_(std::move(rate)) {
  if (j_hi < j_lo) throw SimError("interface over an empty site range");
  xi_.resize(static_cast<std::size_t>(j_hi - j_lo + 3));
  for (std::int64_t j = j_lo - 1; j <= j_hi + 1; ++j) xi_[static_cast<std::size_t>(j - j_lo + 1)] = std::max<std::int64_t>(0, -j);
}

bool XiSystem::apply(const Ring& ring, double dominating) {
  const std::int64_t j = ring.site - k_;
  if (j < j_lo_ || j > j_hi_) return false;
  if (!(ring.mark * dominating < rate_(ring.site))) return false;
  const auto p = static_cast<std::size_t>(j - j_lo_ + 1);
  const std::int64_t raised = xi_[p] + 1;
  if (raised > xi_[p - 1] || raised > xi_[p + 1] + 1) return false;
  xi_[p] = raised;
  return true;
}

std::int64_t XiSystem::value(std::int64_t j) const {
  if (j < j_lo_ - 1 || j > j_hi_ + 1) return std::max<std::int64_t>(0, -j);
  return xi_[static_cast<std::size_t>(j - j_lo_ + 1)];
}

bool XiSystem::inequalities_ok() const {
  for (std::size_t p = 1; p < xi_.size(); ++p) {
    if (xi_[p] > xi_[p - 1] || xi_[p - 1] > xi_[p] + 1) return false;
  }
  return true;
}

double run_xi(std::int64_t k, const SimConfig& config, std::int64_t i, std::int64_t j) {
  if (j < 0 || i + j < 0) throw SimError("target (" + std::to_string(i) + ", " + std::to_string(j) + ") is outside the wedge");
  if (j == 0 || i + j == 0) return 0.0;
  const std::int64_t lo = -j - 1;
  const std::int64_t hi = i + j + 1;
  auto rate = [&config](std::int64_t m) { return config.rate(m); };
  ClockStream clocks(config.seed, lo + k, hi + k, rate);
  XiSystem xi(k, lo, hi, rate);
  const double horizon = static_cast<double>(config.n) * config.t_end;
  while (true) {
    const Ring ring = clocks.next();
    if (ring.time > horizon) {
      throw HorizonExceeded("interface at site " + std::to_string(i) + " reached " + std::to_string(xi.value(i)) +
                                " of " + std::to_string(j) + " by time " + std::to_string(horizon),
                            xi.value(i), horizon);
    }
    if (xi.apply(ring, clocks.dominating(ring.site)) && xi.value(i) >= j) return ring.time;
  }
}

EnvelopeReport envelope_check(const SimConfig& config, double t, std::pair<std::int64_t, std::int64_t> k_range,
                              const std::vector<std::int64_t>& sites, bool decouple, std::int64_t max_events) {
  config.validate();
  const auto [k_lo, k_hi] = k_range;
  if (k_hi < k_lo) throw SimError("empty shift range");
  const SiteWindow w = config.window;
  for (auto i : sites) {
    if (!w.contains(i)) throw SimError("envelope site " + std::to_string(i) + " outside the window");
  }
  auto rate = [&config](std::int64_t m) { return config.rate(m); };

  HeightSystem z(config);
  std::vector<XiSystem> xis;
  std::vector<std::int64_t> z0;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    xis.emplace_back(k, w.i_min - k, w.i_max - k, rate);
    z0.push_back(config.initial_height(k));
  }
  ClockStream main(config.seed, w.i_min, w.i_max, rate);
  ClockStream other(rng::mix64(config.seed ^ kDecoupleTag), w.i_min, w.i_max, rate);

  EnvelopeReport report;
  // Shifts outside [i_min - 1, i_max + 1] never beat the ones at the edge.
  const bool lo_free = k_lo <= w.i_min - 1;
  const bool hi_free = k_hi >= w.i_max + 1;
  auto verify = [&](double time) {
    for (auto i : sites) {
      std::int64_t best = std::numeric_limits<std::int64_t>::min();
      std::size_t arg_first = 0, arg_last = 0;
      for (std::size_t q = 0; q < xis.size(); ++q) {
        const std::int64_t v = z0[q] - xis[q].value(i - xis[q].shift());
        if (v > best) {
          best = v;
          arg_first = arg_last = q;
        } else if (v == best) {
          arg_last = q;
        }
      }
      ++report.checks;
      const bool only_lo = arg_last == 0;
      const bool only_hi = arg_first == xis.size() - 1;
      if ((only_lo && !lo_free) || (only_hi && !hi_free)) report.inconclusive = true;
      if (best != z.height(i)) {
        ++report.violation_count;
        if (report.violations.size() < 8) {
          report.violations.push_back("t=" + std::to_string(time) + " site " + std::to_string(i) + ": z=" +
                                      std::to_string(z.height(i)) + " envelope=" + std::to_string(best));
        }
      }
    }
  };

  verify(0.0);
  const double horizon = static_cast<double>(config.n) * t;
  Ring pending_other = other.next();
  while (max_events <= 0 || report.events < max_events) {
    if (!decouple) {
      const Ring ring = main.next();
      if (ring.time > horizon) break;
      const double dom = main.dominating(ring.site);
      z.apply(ring, dom);
      for (auto& x : xis) x.apply(ring, dom);
      ++report.events;
      verify(ring.time);
    } else {
      // Two independent streams merged in time order.
      Ring ring = main.next();
      while (pending_other.time < ring.time && pending_other.time <= horizon) {
        for (auto& x : xis) x.apply(pending_other, other.dominating(pending_other.site));
        ++report.events;
        verify(pending_other.time);
        pending_other = other.next();
      }
      if (ring.time > horizon) break;
      z.apply(ring, main.dominating(ring.site));
      ++report.events;
      verify(ring.time);
    }
  }
  return report;
}

}  // namespace tasep::sim
