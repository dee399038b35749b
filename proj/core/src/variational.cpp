#include "tasep/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tasep::variational {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One straight piece of a route: horizontal displacement dx at constant
// rate. dx == 0 marks a vertical climb along a column.
struct Piece {
  double dx;
  double rate;
};

struct RouteValue {
  double value = -kInf;
  std::vector<double> heights;
};

// Height taken by a piece at multiplier p, with e = rate * p - 4 > 0.
double piece_height(double dx, double e) {
  const double root = std::sqrt(e * (e + 4.0));
  const double s = e + 2.0 + root;
  return dx >= 0.0 ? 2.0 * dx / (s * root) : -dx * s / (2.0 * root);
}

// sup_y {gamma(dx, y) / rate - p y}.
double piece_conjugate(double dx, double rate, double e) {
  const double s = e + 2.0 + std::sqrt(e * (e + 4.0));
  return dx >= 0.0 ? dx * (1.0 + 2.0 / s) / rate : dx * (1.0 + s / 2.0) / rate;
}

// Best split of total height y among the pieces of one route.
RouteValue evaluate_route(const std::vector<Piece>& pieces, double y) {
  RouteValue out;
  double need = 0.0;
  for (const auto& pc : pieces) need += std::max(0.0, -pc.dx);
  if (y < need * (1.0 - 1e-14) - 1e-300) return out;
  out.heights.assign(pieces.size(), 0.0);
  if (y <= need * (1.0 + 1e-14)) {
    out.value = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      out.value += std::abs(pieces[k].dx) / pieces[k].rate;
      out.heights[k] = std::max(0.0, -pieces[k].dx);
    }
    return out;
  }

  double rmin = kInf;
  for (const auto& pc : pieces) rmin = std::min(rmin, pc.rate);
  const double pmin = 4.0 / rmin;
  bool min_segment = false;
  for (const auto& pc : pieces) min_segment |= pc.rate == rmin && pc.dx != 0.0;

  // e_k(delta) for p = pmin + delta, exact zero offset on min-rate pieces.
  auto excess = [&](const Piece& pc, double delta) {
    return pc.rate == rmin ? pc.rate * delta : pc.rate * pmin - 4.0 + pc.rate * delta;
  };
  auto total_height = [&](double delta) {
    double h = 0.0;
    for (const auto& pc : pieces) {
      if (pc.dx != 0.0) h += piece_height(pc.dx, excess(pc, delta));
    }
    return h;
  };
  auto dual = [&](double delta) {
    double v = (pmin + delta) * y;
    for (const auto& pc : pieces) {
      if (pc.dx != 0.0) v += piece_conjugate(pc.dx, pc.rate, excess(pc, delta));
    }
    return v;
  };
  auto fill = [&](double delta) {
    double used = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (pieces[k].dx == 0.0) continue;
      out.heights[k] = piece_height(pieces[k].dx, excess(pieces[k], delta));
      used += out.heights[k];
    }
    return used;
  };

  if (!min_segment && total_height(0.0) <= y) {
    // A vertical climb at the slowest rate absorbs the remaining height.
    out.value = dual(0.0);
    const double used = fill(0.0);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (pieces[k].dx == 0.0 && pieces[k].rate == rmin) {
        out.heights[k] = y - used;
        break;
      }
    }
    return out;
  }

  // total_height is decreasing in delta; bracket then bisect in log(delta).
  double lo = std::log(1.0);
  double hi = lo;
  if (total_height(1.0) > y) {
    do hi += 2.0;
    while (total_height(std::exp(hi)) > y && hi < 700.0);
  } else {
    do lo -= 2.0;
    while (total_height(std::exp(lo)) <= y && lo > -700.0);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (total_height(std::exp(mid)) > y ? lo : hi) = mid;
  }
  const double delta = std::exp(0.5 * (lo + hi));
  out.value = dual(delta);
  const double used = fill(delta);
  // Spread the root-finding residual over the climbing pieces.
  if (used > 0.0) {
    double grow = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) grow += pieces[k].dx != 0.0 ? out.heights[k] : 0.0;
    const double excess_h = y - used;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (pieces[k].dx != 0.0) out.heights[k] += excess_h * out.heights[k] / grow;
    }
  }
  return out;
}

struct RouteSearch {
  const SpeedFunction& speed;
  double q;
  double target;
  double height;
  const GammaOptions& opts;
  std::vector<double> cols;
  std::vector<Piece> pieces;
  std::vector<Piece> best_pieces;
  RouteValue best;
  std::size_t routes = 0;
  bool truncated = false;

  void consider() {
    ++routes;
    auto r = evaluate_route(pieces, height);
    if (r.value > best.value) {
      best = std::move(r);
      best_pieces = pieces;
    }
  }

  // Position pos; `col` is the column index when pos sits on a column.
  void walk(double pos, std::ptrdiff_t col, double neg_used) {
    if (routes >= opts.max_routes) {
      truncated = true;
      return;
    }
    if (col >= 0 && pos == target) consider();
    if (pieces.size() + 2 > opts.max_pieces) {
      truncated = true;
      return;
    }
    const auto right = std::upper_bound(cols.begin(), cols.end(), pos);
    const auto left = std::lower_bound(cols.begin(), cols.end(), pos);
    // Direct move to an off-column target.
    const bool target_on_col = std::binary_search(cols.begin(), cols.end(), target);
    if (!target_on_col && pos != target) {
      const bool blocked = target > pos ? (right != cols.end() && *right < target)
                                        : (left != cols.begin() && *(left - 1) > target);
      if (!blocked) step(pos, target, -1, neg_used);
    }
    if (right != cols.end()) step(pos, *right, right - cols.begin(), neg_used);
    if (left != cols.begin()) step(pos, *(left - 1), (left - 1) - cols.begin(), neg_used);
  }

  void step(double from, double to, std::ptrdiff_t col, double neg_used) {
    const double used = neg_used + std::max(0.0, from - to);
    if (used + std::max(0.0, to - target) > height * (1.0 + 1e-12) + 1e-300) return;
    const auto mark = pieces.size();
    pieces.push_back({to - from, speed(0.5 * (from + to) - q)});
    if (col < 0) {
      consider();
    } else {
      pieces.push_back({0.0, speed(to - q)});
      walk(to, col, used);
    }
    pieces.resize(mark);
  }
};

MacroPath build_path(const std::vector<Piece>& pieces, const std::vector<double>& heights, double x, double y) {
  MacroPath path;
  path.vertices.push_back({0.0, 0.0});
  std::vector<double> arc{0.0};
  WedgePoint at;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (pieces[k].dx == 0.0 && heights[k] <= 0.0) continue;
    at.x += pieces[k].dx;
    at.y += heights[k];
    arc.push_back(arc.back() + std::abs(pieces[k].dx) + heights[k]);
    path.vertices.push_back(at);
  }
  if (path.vertices.size() > 1) path.vertices.back() = {x, y};
  for (double a : arc) path.break_times.push_back(arc.back() > 0.0 ? a / arc.back() : 0.0);
  path.break_times.back() = 1.0;
  return path;
}

void require_wedge(double x, double y, const char* what) {
  if (!(y >= 0.0) || !(x >= -y) || !std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError(std::string(what) + ": (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") is outside the wedge y >= 0, x >= -y");
  }
}

}  // namespace

double gamma(double x, double y) {
  require_wedge(x, y, "gamma");
  const double a = std::sqrt(x + y) + std::sqrt(y);
  return a * a;
}

double g_wedge(double y) {
  if (y <= -1.0) return -y;
  if (y >= 1.0) return 0.0;
  return 0.25 * (1.0 - y) * (1.0 - y);
}

GammaResult gamma_q(double x, double y, const SpeedFunction& speed, double q, const GammaOptions& opts) {
  require_wedge(x, y, "gamma_q");
  RouteSearch search{speed, q, x, y, opts, {}, {}, {}, {}, 0, false};
  for (double a : speed.breakpoints()) search.cols.push_back(a + q);
  std::sort(search.cols.begin(), search.cols.end());
  search.cols.erase(std::unique(search.cols.begin(), search.cols.end()), search.cols.end());

  const auto at = std::lower_bound(search.cols.begin(), search.cols.end(), 0.0);
  if (at != search.cols.end() && *at == 0.0) {
    search.pieces.push_back({0.0, speed(-q)});
    search.walk(0.0, at - search.cols.begin(), 0.0);
  } else if (x == 0.0) {
    // Vertical target inside a strip.
    search.pieces.push_back({0.0, speed(-q)});
    search.consider();
    search.pieces.clear();
    search.walk(0.0, -1, 0.0);
  } else {
    search.walk(0.0, -1, 0.0);
  }

  GammaResult res;
  res.routes = search.routes;
  res.truncated = search.truncated;
  res.value = search.best.value;
  if (std::isfinite(res.value)) res.path = build_path(search.best_pieces, search.best.heights, x, y);
  return res;
}

double g_q_level(double x, double t, const SpeedFunction& speed, double q, double tol) {
  if (!(t > 0.0)) throw DomainError("g_q_level: t must be positive");
  const double y0 = std::max(0.0, -x);
  auto G = [&](double yy) { return gamma_q(x, yy, speed, q).value; };
  if (G(y0) >= t) return y0;
  double lo = y0;
  double step = std::max(1.0, t * speed.max_rate());
  double hi = y0 + step;
  while (G(hi) < t) {
    lo = hi;
    step *= 2.0;
    hi = y0 + step;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (G(mid) >= t ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

HydroResult hydro_v_detail(double x, double t, const SpeedFunction& speed, const InitialProfile& rho0,
                           const HydroOptions& opts) {
  if (!(t > 0.0)) throw DomainError("hydro_v: t must be positive");
  auto phi = [&](double q) {
    return rho0.antiderivative(q) - g_q_level(x - q, t, speed, -q, opts.level_tol);
  };
  const double cmax = speed.max_rate();
  double half = cmax * t + 1.0;
  HydroResult res;
  for (int round = 0;; ++round) {
    const double a = x - half;
    const double b = x + half;
    std::vector<double> cuts{a};
    for (double c : speed.breakpoints()) {
      if (c > a && c < b) cuts.push_back(c);
    }
    for (double c : rho0.breakpoints()) {
      if (c > a && c < b) cuts.push_back(c);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double best_q = a;
    double best_v = -kInf;
    auto offer = [&](double q, double v) {
      if (v > best_v || (v == best_v && q < best_q)) {
        best_v = v;
        best_q = q;
      }
    };
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double lo = cuts[s];
      const double hi = cuts[s + 1];
      const int m = std::max(3, opts.coarse_points);
      std::vector<double> qs(static_cast<std::size_t>(m));
      std::vector<double> vs(qs.size());
      std::size_t arg = 0;
      for (std::size_t k = 0; k < qs.size(); ++k) {
        qs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
        vs[k] = phi(qs[k]);
        offer(qs[k], vs[k]);
        if (vs[k] > vs[arg]) arg = k;
      }
      // Golden-section refinement around the best coarse point.
      double l = qs[arg == 0 ? 0 : arg - 1];
      double r = qs[std::min(arg + 1, qs.size() - 1)];
      const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = r - invphi * (r - l);
      double d = l + invphi * (r - l);
      double fc = phi(c);
      double fd = phi(d);
      while (r - l > opts.q_tol * std::max(1.0, std::abs(l))) {
        if (fc >= fd) {
          r = d;
          d = c;
          fd = fc;
          c = r - invphi * (r - l);
          fc = phi(c);
        } else {
          l = c;
          c = d;
          fc = fd;
          d = l + invphi * (r - l);
          fd = phi(d);
        }
      }
      offer(c, fc);
      offer(d, fd);
    }
    res.value = best_v;
    res.argmax_q = best_q;
    const bool at_edge = best_q <= a + 1e-9 * half || best_q >= b - 1e-9 * half;
    if (!at_edge || round >= opts.max_widenings) break;
    res.widened = true;
    half *= 2.0;
  }
  return res;
}

double hydro_v(double x, double t, const SpeedFunction& speed, const InitialProfile& rho0,
               const HydroOptions& opts) {
  return hydro_v_detail(x, t, speed, rho0, opts).value;
}

double rho_from_v(const std::function<double(double, double)>& v, double x, double t, double h) {
  if (!(h > 0.0)) throw DomainError("rho_from_v: h must be positive");
  const double d = (v(x + h, t) - v(x - h, t)) / (2.0 * h);
  return std::clamp(d, 0.0, 1.0);
}

double flux_conjugate(double y, double c) {
  // inf over rho in [0, 1] of y rho - c rho (1 - rho); the quadratic is
  // minimised at (c - y) / (2c), clipped to the interval.
  const double rho = std::clamp((c - y) / (2.0 * c), 0.0, 1.0);
  return y * rho - c * rho * (1.0 - rho);
}

double flux_conjugate_unrestricted(double y, double c) { return -(c - y) * (c - y) / (4.0 * c); }

double dual_flux_gap(double y, double c) {
  if (!(c > 0.0)) throw DomainError("dual_flux_gap: c must be positive");
  if (std::abs(y) <= c) return 0.0;
  // Outside [-c, c] the restricted infimum sits at an endpoint of [0, 1].
  return flux_conjugate(y, c) - flux_conjugate_unrestricted(y, c);
}

}  // namespace tasep::variational
