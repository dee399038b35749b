#include "tasep/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "tasep/rng.hpp"

namespace tasep::sim {

namespace {

constexpr std::uint64_t kInitialTag = 0x1417;
constexpr std::uint64_t kEngineTag = 0x5e7e;
constexpr char kMagic[8] = {'T', 'A', 'S', 'E', 'P', 'S', 'N', '1'};

std::int64_t floor_scaled(double x, std::int64_t n) {
  return static_cast<std::int64_t>(std::floor(x * static_cast<double>(n)));
}

__extension__ using u128 = unsigned __int128;

// Exact uniform index in [0, size) by multiply-shift with rejection.
template <class Gen>
std::uint32_t pick(Gen& gen, std::uint64_t size) {
  u128 m = static_cast<u128>(gen()) * size;
  auto low = static_cast<std::uint64_t>(m);
  if (low < size) {
    const std::uint64_t floor = -size % size;
    while (low < floor) {
      m = static_cast<u128>(gen()) * size;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 64);
}

}  // namespace

bool SimConfig::initial_occupied(std::int64_t i) const {
  const double nn = static_cast<double>(n);
  const double x = static_cast<double>(i) / nn;
  if (initial == InitialKind::Bernoulli) {
    return rng::open_unit(rng::counter_hash(seed, i, 0, kInitialTag)) <= rho0.density(x);
  }
  // The guard keeps exact integers such as (i / n) * n from rounding down.
  const auto lo = std::floor(rho0.antiderivative(x) * nn + 1e-9);
  const auto hi = std::floor(rho0.antiderivative(static_cast<double>(i + 1) / nn) * nn + 1e-9);
  return hi > lo;
}

std::int64_t SimConfig::initial_height(std::int64_t i) const {
  std::int64_t z = 0;
  if (i >= 0) {
    for (std::int64_t m = 1; m <= i; ++m) z += initial_occupied(m) ? 1 : 0;
  } else {
    for (std::int64_t m = i + 1; m <= 0; ++m) z -= initial_occupied(m) ? 1 : 0;
  }
  return z;
}

void SimConfig::validate() const {
  if (n < 1) throw SimError("n must be positive, got " + std::to_string(n));
  if (window.i_max < window.i_min) throw SimError("empty window");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw SimError("t_end must be finite and nonnegative");
  if (observe) {
    auto [lo, hi] = *observe;
    if (!(lo <= hi)) throw SimError("observation interval is empty");
    const std::int64_t first = floor_scaled(lo, n);
    const std::int64_t last = floor_scaled(hi, n) + 1;
    if (first <= window.i_min || last >= window.i_max)
      throw SimError("observation interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "] is not inside the window");
  }
}

SiteWindow window_for(std::int64_t n, const SpeedFunction& speed, double t_end, double lo, double hi) {
  const double cmax = speed.max_rate();
  const double nn = static_cast<double>(n);
  const double pad = cmax * t_end + 6.0 * std::sqrt(cmax * t_end * nn) / nn + 2.0 / nn;
  return {static_cast<std::int64_t>(std::floor((lo - pad) * nn)) - 1,
          static_cast<std::int64_t>(std::ceil((hi + pad) * nn)) + 1};
}

bool Snapshot::occupied(std::int64_t i) const {
  if (!window.contains(i)) return false;
  return eta[static_cast<std::size_t>(i - window.i_min)] != 0;
}

std::int64_t Snapshot::current(std::int64_t i) const {
  if (!window.contains(i)) throw SimError("site " + std::to_string(i) + " outside the window");
  return J[static_cast<std::size_t>(i - window.i_min)];
}

std::int64_t Snapshot::height(std::int64_t i) const {
  if (!window.contains(i)) throw SimError("site " + std::to_string(i) + " outside the window");
  std::int64_t z = z_base - J.front();
  for (std::int64_t m = window.i_min + 1; m <= i; ++m) z += eta[static_cast<std::size_t>(m - window.i_min)];
  return z;
}

std::int64_t Snapshot::initial_height(std::int64_t i) const { return height(i) + current(i); }

namespace {

// Sites grouped by rate; a site is listed in its group while it can jump.
class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg), w_(cfg.window) {
    if (w_.size() > std::numeric_limits<std::int32_t>::max()) throw SimError("window too large");
    const auto size = static_cast<std::size_t>(w_.size());
    eta_.resize(size);
    J_.assign(size, 0);
    pos_.assign(size, -1);
    for (std::int64_t i = w_.i_min; i <= w_.i_max; ++i) {
      const double c = cfg.rate(i);
      auto it = std::find(rates_.begin(), rates_.end(), c);
      if (it == rates_.end()) {
        rates_.push_back(c);
        members_.emplace_back();
        it = rates_.end() - 1;
      }
      const auto g = static_cast<std::uint32_t>(it - rates_.begin());
      if (runs_.empty() || runs_.back().second != g) runs_.emplace_back(0, g);
      runs_.back().first = static_cast<std::int32_t>(idx(i)) + 1;
      eta_[idx(i)] = cfg.initial_occupied(i) ? 1 : 0;
    }
    for (std::int64_t i = w_.i_min; i <= w_.i_max; ++i) refresh(i);
    z_base_ = cfg.initial_height(w_.i_min);

    left_front_ = w_.i_min - 1;
    right_front_ = w_.i_max + 1;
    if (cfg.observe) {
      guard_lo_ = floor_scaled(cfg.observe->first, cfg.n);
      guard_hi_ = floor_scaled(cfg.observe->second, cfg.n) + 1;
    }
    gen_.seed(rng::mix64(cfg.seed ^ kEngineTag));
  }

  std::vector<Snapshot> run(const std::vector<double>& times) {
    std::vector<Snapshot> out;
    out.reserve(times.size());
    const double nn = static_cast<double>(cfg_.n);
    const double horizon = nn * cfg_.t_end;
    std::size_t next = 0;
    double t = 0.0;
    double lrate = cfg_.observe ? cfg_.rate(left_front_) : 0.0;
    double rrate = cfg_.observe ? cfg_.rate(right_front_ - 1) : 0.0;
    while (true) {
      double total = lrate + rrate;
      for (std::size_t g = 0; g < rates_.size(); ++g) total += rates_[g] * static_cast<double>(members_[g].size());
      const double dt = total > 0.0 ? rng::exp1(gen_()) / total : INFINITY;
      while (next < times.size() && nn * times[next] <= t + dt) {
        check_fronts(times[next]);
        out.push_back(snapshot(times[next]));
        ++next;
      }
      if (next == times.size() || t + dt > horizon) break;
      t += dt;
      double u = rng::open_unit(gen_()) * total;
      if (u <= lrate) {
        lrate = cfg_.rate(++left_front_);
        continue;
      }
      u -= lrate;
      if (u <= rrate) {
        rrate = cfg_.rate(--right_front_ - 1);
        continue;
      }
      u -= rrate;
      std::size_t g = 0;
      for (; g + 1 < rates_.size(); ++g) {
        const double mass = rates_[g] * static_cast<double>(members_[g].size());
        if (u <= mass) break;
        u -= mass;
      }
      // Floating-point slack can land u past the last nonempty group.
      if (members_[g].empty()) {
        const auto it = std::find_if(members_.begin(), members_.end(), [](const auto& m) { return !m.empty(); });
        if (it == members_.end()) continue;
        g = static_cast<std::size_t>(it - members_.begin());
      }
      jump(members_[g][pick(gen_, members_[g].size())]);
    }
    while (next < times.size()) {
      check_fronts(times[next]);
      out.push_back(snapshot(times[next]));
      ++next;
    }
    return out;
  }

 private:
  std::size_t idx(std::int64_t i) const { return static_cast<std::size_t>(i - w_.i_min); }

  std::uint32_t group_of(std::size_t k) const {
    for (const auto& [end, g] : runs_) {
      if (static_cast<std::int32_t>(k) < end) return g;
    }
    return runs_.back().second;
  }

  bool can_jump(std::int64_t i) const {
    if (!eta_[idx(i)]) return false;
    return i == w_.i_max || !eta_[idx(i + 1)];
  }

  void refresh(std::int64_t i) {
    if (i < w_.i_min || i > w_.i_max) return;
    const auto k = idx(i);
    if (can_jump(i)) {
      add(k);
    } else {
      remove(k);
    }
  }

  void add(std::size_t k) {
    if (pos_[k] >= 0) return;
    auto& list = members_[group_of(k)];
    pos_[k] = static_cast<std::int32_t>(list.size());
    list.push_back(static_cast<std::int32_t>(k));
  }

  void remove(std::size_t k) {
    if (pos_[k] < 0) return;
    auto& list = members_[group_of(k)];
    const auto p = static_cast<std::size_t>(pos_[k]);
    const std::int32_t moved = list.back();
    list[p] = moved;
    pos_[static_cast<std::size_t>(moved)] = static_cast<std::int32_t>(p);
    list.pop_back();
    pos_[k] = -1;
  }

  // After i -> i+1: i is blocked, i-1 can move iff occupied, i+1 iff i+2 is empty.
  void jump(std::int32_t offset) {
    const auto k = static_cast<std::size_t>(offset);
    const auto last = static_cast<std::size_t>(w_.size() - 1);
    eta_[k] = 0;
    remove(k);
    if (++J_[k] == 0) throw SimError("current counter overflow at site " + std::to_string(w_.i_min + offset));
    ++events_;
    if (k > 0 && eta_[k - 1]) add(k - 1);
    if (k < last) {
      eta_[k + 1] = 1;
      if (k + 1 == last || !eta_[k + 2]) add(k + 1);
    }
  }

  void check_fronts(double t) const {
    if (!cfg_.observe) return;
    if (left_front_ >= guard_lo_ || right_front_ <= guard_hi_) {
      throw WindowOverflow("boundary disturbance reached the observation interval by t=" + std::to_string(t) +
                           " (fronts at sites " + std::to_string(left_front_) + ", " + std::to_string(right_front_) +
                           "; guarded sites " + std::to_string(guard_lo_) + ".." + std::to_string(guard_hi_) +
                           "); enlarge the window");
    }
  }

  Snapshot snapshot(double t) const {
    Snapshot s;
    s.n = cfg_.n;
    s.t = t;
    s.window = w_;
    s.eta = eta_;
    s.J.assign(J_.begin(), J_.end());
    s.z_base = z_base_;
    s.events = events_;
    return s;
  }

  const SimConfig& cfg_;
  SiteWindow w_;
  std::vector<std::uint8_t> eta_;
  std::vector<std::uint32_t> J_;
  std::vector<std::int32_t> pos_;  // index into the group list, -1 when blocked
  std::vector<std::pair<std::int32_t, std::uint32_t>> runs_;  // (end offset, group) of constant-rate runs
  std::vector<double> rates_;
  std::vector<std::vector<std::int32_t>> members_;  // window offsets
  std::int64_t z_base_ = 0;
  std::uint64_t events_ = 0;
  std::int64_t left_front_ = 0;
  std::int64_t right_front_ = 0;
  std::int64_t guard_lo_ = 0;
  std::int64_t guard_hi_ = 0;
  rng::SplitMix64 gen_;
};

}  // namespace

std::vector<Snapshot> run(const SimConfig& config, const std::vector<double>& observe_times) {
  config.validate();
  for (std::size_t k = 0; k < observe_times.size(); ++k) {
    const double t = observe_times[k];
    if (!(t >= 0.0 && t <= config.t_end)) throw SimError("observation time outside [0, t_end]");
    if (k > 0 && t < observe_times[k - 1]) throw SimError("observation times must be nondecreasing");
  }
  Engine engine(config);
  return engine.run(observe_times);
}

double empirical_density(const Snapshot& state, double a, double b, std::int64_t n) {
  const std::int64_t lo = floor_scaled(a, n) + 1;
  const std::int64_t hi = floor_scaled(b, n);
  if (hi < lo) return 0.0;
  if (!state.window.contains(lo) || !state.window.contains(hi))
    throw SimError("density interval [" + std::to_string(a) + ", " + std::to_string(b) + "] leaves the window");
  std::int64_t count = 0;
  for (std::int64_t i = lo; i <= hi; ++i) count += state.eta[static_cast<std::size_t>(i - state.window.i_min)];
  return static_cast<double>(count) / static_cast<double>(n);
}

std::int64_t current(const std::vector<Snapshot>& history, std::int64_t i, double t) {
  for (const auto& s : history) {
    if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s.current(i);
  }
  throw SimError("no snapshot at t=" + std::to_string(t));
}

void write_snapshot(const Snapshot& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  const std::int64_t header[3] = {state.n, state.window.i_min, state.window.i_max};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(&state.t), sizeof state.t);
  std::vector<std::uint8_t> bits((state.eta.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < state.eta.size(); ++k) {
    if (state.eta[k]) bits[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  }
  out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!out) throw SimError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw SimError(path.string() + ": not a snapshot file");
  std::int64_t header[3];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  Snapshot s;
  in.read(reinterpret_cast<char*>(&s.t), sizeof s.t);
  if (!in || header[0] < 1 || header[2] < header[1]) throw SimError(path.string() + ": bad header");
  s.n = header[0];
  s.window = {header[1], header[2]};
  const auto size = static_cast<std::size_t>(s.window.size());
  std::vector<std::uint8_t> bits((size + 7) / 8);
  in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!in) throw SimError(path.string() + ": truncated occupation bits");
  s.eta.resize(size);
  for (std::size_t k = 0; k < size; ++k) s.eta[k] = (bits[k / 8] >> (k % 8)) & 1u;
  s.J.assign(size, 0);
  return s;
}

}  // namespace tasep::sim
