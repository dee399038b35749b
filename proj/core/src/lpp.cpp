#include "tasep/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tasep/parallel.hpp"
#include "tasep/rng.hpp"

namespace tasep::lpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string site_str(std::int64_t i, std::int64_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

std::string box_str(const LatticeBox& b) {
  return "[" + std::to_string(b.i_lo) + ", " + std::to_string(b.i_hi) + "] x [" +
         std::to_string(b.j_lo) + ", " + std::to_string(b.j_hi) + "]";
}

void require_box(const WeightField& field, const LatticeBox& need) {
  if (!field.box().contains(need)) {
    throw DimensionError("weight field " + box_str(field.box()) + " does not cover " + box_str(need));
  }
}

void require_lattice(Site s) {
  if (!in_wedge_lattice(s)) throw DomainError("site " + site_str(s.i, s.j) + " is outside the wedge lattice");
}

LimitEstimate summarize(std::vector<double> samples, std::vector<std::uint64_t> seeds) {
  LimitEstimate est;
  const auto k = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double s : samples) sum += s;
  est.mean = sum / k;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - est.mean) * (s - est.mean);
    est.stderr_ = std::sqrt(ss / (k - 1.0) / k);
  }
  est.samples = std::move(samples);
  est.seeds = std::move(seeds);
  return est;
}

// Row sweep of the zero-boundary recursion. If `choice` is non-null it
// receives the argmax predecessor of every interior cell (0: (i-1, j),
// 1: (i, j-1), 2: (i+1, j-1)), indexed [(j-1) * width + i + v].
double wedge_sweep(Site t, const WeightField& w, std::vector<std::uint8_t>* choice) {
  const std::int64_t u = t.i;
  const std::int64_t v = t.j;
  const std::int64_t off = v;
  const auto width = static_cast<std::size_t>(u + 2 * v + 1);
  std::vector<double> prev(width, 0.0);
  std::vector<double> cur(width, 0.0);
  if (choice) choice->assign(width * static_cast<std::size_t>(v), 0);
  for (std::int64_t j = 1; j <= v; ++j) {
    const std::int64_t lo = 1 - j;
    const std::int64_t hi = u + v - j;
    for (std::int64_t i = lo; i <= hi; ++i) {
      const auto k = static_cast<std::size_t>(i + off);
      double best = cur[k - 1];
      std::uint8_t arg = 0;
      if (prev[k] > best) {
        best = prev[k];
        arg = 1;
      }
      if (prev[k + 1] > best) {
        best = prev[k + 1];
        arg = 2;
      }
      cur[k] = best + w(i, j);
      if (choice) (*choice)[static_cast<std::size_t>(j - 1) * width + k] = arg;
    }
    std::swap(prev, cur);
  }
  return prev[static_cast<std::size_t>(u + off)];
}

}  // namespace

bool in_wedge_lattice(Site s) { return s.j >= 1 && s.i >= 1 - s.j; }

bool on_wedge_boundary(Site s) { return (s.j == 0 && s.i >= 0) || (s.i < 0 && s.j == -s.i); }

LatticeBox wedge_box(Site t) { return {1 - t.j, t.i + t.j - 1, 1, t.j}; }

WeightField::WeightField(Layout layout, std::optional<SpeedFunction> speed, std::int64_t scale,
                         std::int64_t shift, std::uint64_t seed, LatticeBox box, std::vector<double> values)
    : layout_(layout),
      speed_(std::move(speed)),
      scale_(scale),
      shift_(shift),
      seed_(seed),
      box_(box),
      values_(std::move(values)) {}

WeightField WeightField::wedge(SpeedFunction speed, std::int64_t scale, std::int64_t shift, std::uint64_t seed,
                               LatticeBox box) {
  if (scale < 1) throw std::invalid_argument("WeightField: scale must be >= 1");
  return WeightField(Layout::Wedge, std::move(speed), scale, shift, seed, box, {});
}

WeightField WeightField::corner(SpeedFunction speed, std::int64_t scale, std::uint64_t seed, std::int64_t rows,
                                std::int64_t cols) {
  if (scale < 1) throw std::invalid_argument("WeightField: scale must be >= 1");
  return WeightField(Layout::Corner, std::move(speed), scale, 0, seed, {1, rows, 1, cols}, {});
}

WeightField WeightField::explicit_values(LatticeBox box, std::vector<double> values) {
  const auto w = box.i_hi - box.i_lo + 1;
  const auto h = box.j_hi - box.j_lo + 1;
  if (w <= 0 || h <= 0 || values.size() != static_cast<std::size_t>(w * h)) {
    throw DimensionError("WeightField: " + std::to_string(values.size()) + " values for box " + box_str(box));
  }
  for (double x : values) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("WeightField: weights must be positive");
  }
  return WeightField(Layout::Wedge, std::nullopt, 1, 0, 0, box, std::move(values));
}

double WeightField::tau(std::int64_t i, std::int64_t j) const {
  if (!values_.empty()) return (*this)(i, j);
  return rng::exp1(rng::counter_hash(seed_, wedge_column(i, j), j));
}

double WeightField::mean(std::int64_t i, std::int64_t j) const {
  if (!values_.empty()) return (*this)(i, j);
  const double x = static_cast<double>(wedge_column(i, j) - shift_) / static_cast<double>(scale_);
  return 1.0 / speed_->eval(x);
}

double WeightField::operator()(std::int64_t i, std::int64_t j) const {
  if (!box_.contains(i, j)) throw DimensionError("site " + site_str(i, j) + " outside weight field " + box_str(box_));
  if (!values_.empty()) {
    const auto w = box_.i_hi - box_.i_lo + 1;
    return values_[static_cast<std::size_t>((j - box_.j_lo) * w + (i - box_.i_lo))];
  }
  return tau(i, j) * mean(i, j);
}

WeightField WeightField::with_value(std::int64_t i, std::int64_t j, double value) const {
  if (!box_.contains(i, j)) throw DimensionError("site " + site_str(i, j) + " outside weight field " + box_str(box_));
  std::vector<double> vals;
  const auto w = box_.i_hi - box_.i_lo + 1;
  vals.reserve(static_cast<std::size_t>(w * (box_.j_hi - box_.j_lo + 1)));
  for (auto jj = box_.j_lo; jj <= box_.j_hi; ++jj) {
    for (auto ii = box_.i_lo; ii <= box_.i_hi; ++ii) vals.push_back(ii == i && jj == j ? value : (*this)(ii, jj));
  }
  return explicit_values(box_, std::move(vals));
}

double corner_growth(std::int64_t m, std::int64_t n, const WeightField& field) {
  if (m < 1 || n < 1) throw std::invalid_argument("corner_growth: m and n must be >= 1");
  require_box(field, {1, m, 1, n});
  std::vector<double> g(static_cast<std::size_t>(m + 1), 0.0);
  for (std::int64_t j = 1; j <= n; ++j) {
    for (std::int64_t i = 1; i <= m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      g[k] = std::max(g[k - 1], g[k]) + field(i, j);
    }
  }
  return g[static_cast<std::size_t>(m)];
}

double wedge_T(Site target, const WeightField& field, std::optional<ColumnRange> region) {
  require_lattice(target);
  if (region) return passage_time({0, 1}, target, field, region);
  require_box(field, wedge_box(target));
  return wedge_sweep(target, field, nullptr);
}

double passage_time(Site from, Site to, const WeightField& field, std::optional<ColumnRange> region) {
  require_lattice(from);
  require_lattice(to);
  const std::int64_t rows = to.j - from.j;
  if (rows < 0 || to.i < from.i - rows) return kNegInf;
  const std::int64_t i_min = std::max(from.i - rows, 1 - to.j);
  const std::int64_t i_max = to.i + rows;
  require_box(field, {std::max(i_min, 1 - to.j), i_max, from.j, to.j});

  const auto allowed = [&](std::int64_t i, std::int64_t j) {
    if (!region || (i == from.i && j == from.j) || (i == to.i && j == to.j)) return true;
    return i >= region->lo && i <= region->hi;
  };

  // Slots cover [i_min - 1, i_max + 1] so neighbours never go out of range.
  const std::int64_t off = 1 - i_min;
  const auto width = static_cast<std::size_t>(i_max - i_min + 3);
  std::vector<double> prev(width, kNegInf);
  std::vector<double> cur(width, kNegInf);
  for (std::int64_t j = from.j; j <= to.j; ++j) {
    std::fill(cur.begin(), cur.end(), kNegInf);
    const std::int64_t lo = std::max(from.i - (j - from.j), 1 - j);
    const std::int64_t hi = to.i + (to.j - j);
    for (std::int64_t i = lo; i <= hi; ++i) {
      if (!allowed(i, j)) continue;
      const auto k = static_cast<std::size_t>(i + off);
      double best;
      if (i == from.i && j == from.j) {
        best = 0.0;
      } else {
        best = std::max({cur[k - 1], prev[k], prev[k + 1]});
        if (best == kNegInf) continue;
      }
      cur[k] = best + field(i, j);
    }
    std::swap(prev, cur);
  }
  return prev[static_cast<std::size_t>(to.i + off)];
}

std::vector<Site> wedge_argmax_path(Site target, const WeightField& field) {
  require_lattice(target);
  require_box(field, wedge_box(target));
  std::vector<std::uint8_t> choice;
  wedge_sweep(target, field, &choice);
  const auto width = static_cast<std::size_t>(target.i + 2 * target.j + 1);
  std::vector<Site> path{target};
  Site s = target;
  while (!(s.i == 0 && s.j == 1)) {
    const auto arg = choice[static_cast<std::size_t>(s.j - 1) * width + static_cast<std::size_t>(s.i + target.j)];
    if (arg == 0) {
      s = {s.i - 1, s.j};
    } else if (arg == 1) {
      s = {s.i, s.j - 1};
    } else {
      s = {s.i + 1, s.j - 1};
    }
    if (!in_wedge_lattice(s)) break;  // only reachable with zero weights
    path.push_back(s);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

bool transfer_identity_check(std::int64_t x, std::int64_t y, const WeightField& wedge_field,
                             const WeightField& corner_field) {
  return wedge_T({x, y}, wedge_field) == corner_growth(x + y, y, corner_field);
}

LimitEstimate scaled_limit_estimate(double x, double y, std::int64_t n, int reps, const SpeedFunction& speed,
                                    double q, std::uint64_t base_seed, int jobs,
                                    std::optional<std::pair<double, double>> constrain) {
  if (n < 1 || reps < 1) throw std::invalid_argument("scaled_limit_estimate: need n >= 1 and reps >= 1");
  const auto nd = static_cast<double>(n);
  const Site target{static_cast<std::int64_t>(std::floor(nd * x)), static_cast<std::int64_t>(std::floor(nd * y))};
  require_lattice(target);
  const auto shift = static_cast<std::int64_t>(std::floor(nd * q));
  std::optional<ColumnRange> region;
  if (constrain) {
    region = ColumnRange{static_cast<std::int64_t>(std::ceil(nd * constrain->first)),
                         static_cast<std::int64_t>(std::floor(nd * constrain->second))};
  }
  std::vector<double> samples(static_cast<std::size_t>(reps));
  std::vector<std::uint64_t> seeds(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t r) {
    seeds[r] = base_seed + r;
    const auto field = WeightField::wedge(speed, n, shift, seeds[r], wedge_box(target));
    samples[r] = wedge_T(target, field, region) / nd;
  });
  return summarize(std::move(samples), std::move(seeds));
}

LimitEstimate scaled_corner_estimate(double x, double y, std::int64_t n, int reps, const SpeedFunction& speed,
                                     std::uint64_t base_seed, int jobs) {
  if (n < 1 || reps < 1) throw std::invalid_argument("scaled_corner_estimate: need n >= 1 and reps >= 1");
  const auto nd = static_cast<double>(n);
  const auto m = static_cast<std::int64_t>(std::floor(nd * x));
  const auto k = static_cast<std::int64_t>(std::floor(nd * y));
  std::vector<double> samples(static_cast<std::size_t>(reps));
  std::vector<std::uint64_t> seeds(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t r) {
    seeds[r] = base_seed + r;
    const auto field = WeightField::corner(speed, n, seeds[r], m, k);
    samples[r] = corner_growth(m, k, field) / nd;
  });
  return summarize(std::move(samples), std::move(seeds));
}

}  // namespace tasep::lpp
