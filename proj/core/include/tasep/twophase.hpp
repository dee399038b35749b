#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tasep::twophase {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Derived constants of the two-phase model c = c1 on x < 0, c2 on x >= 0.
struct TwoPhaseConstants {
  double c1;
  double c2;
  double c;         // c1 / c2
  double b;         // 2c - 1 - 2 sqrt(c (c - 1))
  double B;         // sqrt(c1 (c1 - c2))
  double rho_star;  // 1/2 - 1/2 sqrt(1 - c2 / c1)

  /// Throws DomainError unless c1 >= c2 > 0. The case c1 < c2 follows by
  /// particle-hole duality and is not handled here.
  static TwoPhaseConstants make(double c1, double c2);

  double D(double rho) const { return c2 * c2 - 4.0 * c1 * c2 * rho * (1.0 - rho); }
  double D1(double rho) const { return c1 * c1 - 4.0 * c1 * c2 * rho * (1.0 - rho); }
  /// Plateau density right of 0 when rho < rho_star.
  double r_star_low(double rho) const;
  /// Plateau density is 1 - r_star_high left of 0 when rho >= 1/2.
  double r_star_high(double rho) const;
};

/// Corner-growth limit shape for rates c1 above the diagonal, c2 below.
double phi(double x, double y, double c1, double c2);
/// phi expressed in wedge coordinates: phi(x + y, y).
double phi_wedge(double x, double y, double c1, double c2);

enum class ProfileCase { Low = 1, Middle = 2, High = 3 };

/// Which case of the density profile applies. Ties: rho == rho_star and
/// rho == 1/2 both go to Middle.
ProfileCase classify(double rho, const TwoPhaseConstants& k);

struct ProfilePiece {
  enum class Kind { Plateau, Fan };
  double lo;
  double hi;
  Kind kind;
  double value;     // plateau density
  double fan_rate;  // fan density is (1 - x / (t fan_rate)) / 2

  double at(double x, double t) const;
};

/// Piecewise density at a fixed time. Pieces tile the line in order; point
/// values at piece boundaries belong to the right-hand piece.
struct DensityProfile {
  double t = 0.0;
  std::vector<ProfilePiece> pieces;
  ProfileCase kase = ProfileCase::Middle;

  double operator()(double x) const;
  double left_limit(double x) const;
  double right_limit(double x) const;
  /// Interior boundaries where the density jumps.
  std::vector<double> jumps(double tol = 1e-12) const;
};

DensityProfile profile_structure(double rho, double c1, double c2, double t);
double profile(double rho, double c1, double c2, double x, double t);

struct VClosed {
  double value;
  double R;  // R+ for x >= 0, R- for x < 0
  double L;  // L+ or L-
};

/// v(x, t) for constant initial density rho, from the explicit suprema.
VClosed v_closed_detail(double x, double t, double rho, double c1, double c2);
double v_closed(double x, double t, double rho, double c1, double c2);

struct EntropyReport {
  int ei_violations = 0;
  std::vector<double> violations;  // jump locations failing rho(x+) >= rho(x-)
  double rho_minus = 0.0;          // rho(0-)
  double rho_plus = 0.0;           // rho(0+)
  double flux_residual = 0.0;      // |c2 h(rho(0+)) - c1 h(rho(0-))|
  bool eb[3] = {false, false, false};
  int eb_case = 0;                 // first of 1..3 that holds, 0 if none

  bool passed(double flux_tol = 1e-10) const {
    return ei_violations == 0 && flux_residual < flux_tol && eb_case != 0;
  }
  std::string to_json() const;
};

EntropyReport entropy_check(const DensityProfile& profile, double c1, double c2);

/// Entropy check for a sampled density on increasing x. A jump between
/// neighbouring samples counts as a shock when it exceeds `factor` times
/// the local fan slope c times the spacing; 0 is located between the last
/// negative and first nonnegative sample.
EntropyReport entropy_check_sampled(const std::vector<double>& xs, const std::vector<double>& rho, double c1,
                                    double c2, double t, double factor = 3.0);

/// Smooth bump psi((x - x0) / rx) psi((t - t0) / rt), psi(s) = exp(-1 / (1 - s^2)).
struct Bump {
  double x0;
  double t0;
  double rx;
  double rt;

  double operator()(double x, double t) const;
  double dx(double x, double t) const;
  double dt(double x, double t) const;
};

using Field = std::function<double(double x, double t)>;

/// |int int_{t > 0} (rho phi_t + F(x, rho) phi_x) + int rho(x, 0) phi(x, 0)|
/// with F = c(x) rho (1 - rho), by the midpoint rule on cells of width h
/// whose edges sit on multiples of h. With `richardson` the signed values
/// at h and h/2 are extrapolated before taking the modulus.
double weak_residual(const Field& rho, const Bump& bump, double c1, double c2, double h, bool richardson = false);

}  // namespace tasep::twophase
