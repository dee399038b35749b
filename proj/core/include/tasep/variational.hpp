#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tasep/speed.hpp"

namespace tasep::variational {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Point of the wedge W = {(x, y): y >= 0, x >= -y}.
struct WedgePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Homogeneous passage-time shape (sqrt(x + y) + sqrt(y))^2 on W.
double gamma(double x, double y);

/// Wedge limit shape g(y) = sup_{0 <= rho <= 1} {rho (1 - rho) - y rho}.
double g_wedge(double y);

/// Piecewise-linear path in W, linear between vertices. break_times run
/// from 0 to 1 and have the same length as vertices.
struct MacroPath {
  std::vector<double> break_times;
  std::vector<WedgePoint> vertices;
};

struct GammaOptions {
  std::size_t max_pieces = 24;
  std::size_t max_routes = 20000;
};

struct GammaResult {
  double value = 0.0;
  MacroPath path;
  std::size_t routes = 0;    // candidate routes evaluated
  bool truncated = false;    // route enumeration hit a cap
};

/// Sup over wedge paths from (0, 0) to (x, y) of the integral of
/// gamma(x'(s)) / c(x_1(s) - q).
///
/// Candidates are walks that move straight between consecutive
/// discontinuity columns (shifted breakpoints a_m + q), possibly climbing
/// vertically along a column. For each walk the optimal split of the height
/// is computed exactly through the concave conjugates of the pieces, so the
/// result is exact up to root-finding precision whenever enumeration is not
/// truncated.
GammaResult gamma_q(double x, double y, const SpeedFunction& speed, double q, const GammaOptions& opts = {});

/// inf{y : (x, y) in W, Gamma^q(x, y) >= t}, by bisection in y.
double g_q_level(double x, double t, const SpeedFunction& speed, double q, double tol = 1e-8);

struct HydroOptions {
  int coarse_points = 24;
  double q_tol = 1e-9;
  double level_tol = 1e-8;
  int max_widenings = 8;
};

struct HydroResult {
  double value = 0.0;
  double argmax_q = 0.0;
  bool widened = false;
};

/// v(x, t) = sup_q {v0(q) - g^{-q}(x - q, t)}.
HydroResult hydro_v_detail(double x, double t, const SpeedFunction& speed, const InitialProfile& rho0,
                           const HydroOptions& opts = {});
double hydro_v(double x, double t, const SpeedFunction& speed, const InitialProfile& rho0,
               const HydroOptions& opts = {});

/// Central difference of v in x, clipped to [0, 1].
double rho_from_v(const std::function<double(double, double)>& v, double x, double t, double h);

/// (c f)^*(y) with f = rho (1 - rho) restricted to [0, 1].
double flux_conjugate(double y, double c);
/// (c h)^*(y) with h = rho (1 - rho) on the whole line.
double flux_conjugate_unrestricted(double y, double c);
/// flux_conjugate - flux_conjugate_unrestricted; zero exactly when |y| <= c.
double dual_flux_gap(double y, double c);

}  // namespace tasep::variational
