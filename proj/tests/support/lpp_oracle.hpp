#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tasep/lpp.hpp"

namespace oracle {

// Exhaustive search over wedge paths from `from` to `to` using steps
// (1,0), (0,1), (-1,1). Sites other than the endpoints must lie in
// [lo, hi] when a range is given.
inline double enumerate_wedge(tasep::lpp::Site from, tasep::lpp::Site to, const tasep::lpp::WeightField& w,
                              std::optional<tasep::lpp::ColumnRange> region = {}, long* count = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(long, long, double)> go = [&](long i, long j, double acc) {
    acc += w(i, j);
    if (i == to.i && j == to.j) {
      best = std::max(best, acc);
      if (count) ++*count;
      return;
    }
    const long steps[3][2] = {{1, 0}, {0, 1}, {-1, 1}};
    for (const auto& s : steps) {
      const long ni = i + s[0], nj = j + s[1];
      if (nj > to.j || nj < 1 || ni < 1 - nj) continue;
      if (ni > to.i + (to.j - nj)) continue;  // target no longer reachable
      const bool endpoint = ni == to.i && nj == to.j;
      if (region && !endpoint && (ni < region->lo || ni > region->hi)) continue;
      go(ni, nj, acc);
    }
  };
  go(from.i, from.j, 0.0);
  return best;
}

// Exhaustive search over up-right paths from (1,1) to (m,n).
inline double enumerate_corner(long m, long n, const tasep::lpp::WeightField& w) {
  double best = 0.0;
  std::function<void(long, long, double)> go = [&](long i, long j, double acc) {
    acc += w(i, j);
    if (i == m && j == n) {
      best = std::max(best, acc);
      return;
    }
    if (i < m) go(i + 1, j, acc);
    if (j < n) go(i, j + 1, acc);
  };
  go(1, 1, 0.0);
  return best;
}

}  // namespace oracle
