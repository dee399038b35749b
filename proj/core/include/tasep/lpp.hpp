#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tasep/speed.hpp"

namespace tasep::lpp {

/// Lattice region too small for the requested passage time.
class DimensionError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Target outside the wedge lattice {(i, j): j >= 1, i >= 1 - j}.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Site {
  std::int64_t i = 0;
  std::int64_t j = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

/// Closed index rectangle [i_lo, i_hi] x [j_lo, j_hi].
struct LatticeBox {
  std::int64_t i_lo = 0;
  std::int64_t i_hi = -1;
  std::int64_t j_lo = 0;
  std::int64_t j_hi = -1;

  bool contains(std::int64_t i, std::int64_t j) const {
    return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
  }
  bool contains(const LatticeBox& o) const {
    return o.i_lo >= i_lo && o.i_hi <= i_hi && o.j_lo >= j_lo && o.j_hi <= j_hi;
  }
};

bool in_wedge_lattice(Site s);
bool on_wedge_boundary(Site s);

/// Bounding box of the parallelogram holding every admissible path from
/// (0, 1) to `target`.
LatticeBox wedge_box(Site target);

/// Exponential weights for last-passage percolation.
///
/// Generated weights are `tau(i, j) / c((i - shift) / scale)` with
/// `tau ~ Exp(1)` drawn from a counter-based hash of (seed, i, j), so a weight
/// does not depend on traversal order or thread count. The corner layout
/// reads the wedge weight at (i - j, j): with shift 0 this is the coupling
/// under which wedge and corner passage times coincide.
class WeightField {
 public:
  enum class Layout { Wedge, Corner };

  static WeightField wedge(SpeedFunction speed, std::int64_t scale, std::int64_t shift,
                           std::uint64_t seed, LatticeBox box);
  /// Corner-growth weights on [1, rows] x [1, cols].
  static WeightField corner(SpeedFunction speed, std::int64_t scale, std::uint64_t seed,
                            std::int64_t rows, std::int64_t cols);
  /// Hand-specified weights, row-major in j then i: value(i, j) =
  /// values[(j - j_lo) * width + (i - i_lo)].
  static WeightField explicit_values(LatticeBox box, std::vector<double> values);

  double operator()(std::int64_t i, std::int64_t j) const;
  /// Mean weight, i.e. the inverse local rate.
  double mean(std::int64_t i, std::int64_t j) const;
  double tau(std::int64_t i, std::int64_t j) const;

  /// Copy with one weight replaced (materialises the box).
  WeightField with_value(std::int64_t i, std::int64_t j, double value) const;

  const LatticeBox& box() const { return box_; }
  Layout layout() const { return layout_; }
  std::uint64_t seed() const { return seed_; }

 private:
  WeightField(Layout layout, std::optional<SpeedFunction> speed, std::int64_t scale,
              std::int64_t shift, std::uint64_t seed, LatticeBox box, std::vector<double> values);

  // Wedge-coordinate column for a site in this field's layout.
  std::int64_t wedge_column(std::int64_t i, std::int64_t j) const {
    return layout_ == Layout::Corner ? i - j : i;
  }

  Layout layout_;
  std::optional<SpeedFunction> speed_;
  std::int64_t scale_ = 1;
  std::int64_t shift_ = 0;
  std::uint64_t seed_ = 0;
  LatticeBox box_;
  std::vector<double> values_;  // non-empty for explicit fields
};

/// Columns a constrained path must stay within (first and last site exempt).
struct ColumnRange {
  std::int64_t lo;
  std::int64_t hi;
};

/// Corner-growth last-passage time G(m, n): max over up-right paths from
/// (1, 1) to (m, n) of the summed weights.
double corner_growth(std::int64_t m, std::int64_t n, const WeightField& field);

/// Wedge last-passage time T(u, v) from (0, 1) with steps (1,0), (0,1),
/// (-1,1) and zero boundary values on the wedge boundary.
double wedge_T(Site target, const WeightField& field, std::optional<ColumnRange> region = {});

/// Max-weight path between two wedge sites, both endpoints included.
/// Returns -infinity when no admissible path exists.
double passage_time(Site from, Site to, const WeightField& field,
                    std::optional<ColumnRange> region = {});

/// A maximising path for wedge_T, from (0, 1) to `target`.
std::vector<Site> wedge_argmax_path(Site target, const WeightField& field);

/// Checks T(x, y) == G(x + y, y) under the corner/wedge coupling.
bool transfer_identity_check(std::int64_t x, std::int64_t y, const WeightField& wedge_field,
                             const WeightField& corner_field);

struct LimitEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> samples;  // one per replica, in replica order
  std::vector<std::uint64_t> seeds;
};

/// Monte Carlo estimate of n^-1 T^{n, floor(nq)}(floor(nx), floor(ny)) over
/// `reps` replicas with seeds base_seed, base_seed + 1, ...
LimitEstimate scaled_limit_estimate(double x, double y, std::int64_t n, int reps,
                                    const SpeedFunction& speed, double q, std::uint64_t base_seed,
                                    int jobs = 1, std::optional<std::pair<double, double>> constrain = {});

/// Monte Carlo estimate of n^-1 G(floor(nx), floor(ny)) with corner weights
/// coupled to the speed function through (i - j) / n.
LimitEstimate scaled_corner_estimate(double x, double y, std::int64_t n, int reps,
                                     const SpeedFunction& speed, std::uint64_t base_seed, int jobs = 1);

}  // namespace tasep::lpp
