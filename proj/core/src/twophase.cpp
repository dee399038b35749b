#include "tasep/twophase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tasep::twophase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double g(double y) {
  if (y <= -1.0) return -y;
  if (y >= 1.0) return 0.0;
  return 0.25 * (1.0 - y) * (1.0 - y);
}

double h(double rho) { return rho * (1.0 - rho); }

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("density must lie in (0, 1)");
}

void check_t(double t) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
}

ProfilePiece plateau(double lo, double hi, double value) {
  return {lo, hi, ProfilePiece::Kind::Plateau, value, 0.0};
}

ProfilePiece fan(double lo, double hi, double rate) { return {lo, hi, ProfilePiece::Kind::Fan, 0.0, rate}; }

}  // namespace

TwoPhaseConstants TwoPhaseConstants::make(double c1, double c2) {
  if (!(c2 > 0.0) || !(c1 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw DomainError("two-phase rates must be positive and finite");
  }
  if (c1 < c2) {
    throw DomainError("two-phase rates need c1 >= c2; the case c1 < c2 can then be deduced from particle-hole duality");
  }
  TwoPhaseConstants k{};
  k.c1 = c1;
  k.c2 = c2;
  k.c = c1 / c2;
  k.b = 2.0 * k.c - 1.0 - 2.0 * std::sqrt(k.c * (k.c - 1.0));
  k.B = std::sqrt(c1 * (c1 - c2));
  k.rho_star = 0.5 - 0.5 * std::sqrt(1.0 - c2 / c1);
  return k;
}

double TwoPhaseConstants::r_star_low(double rho) const {
  return 0.5 - 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * rho * (1.0 - rho) * c1 / c2));
}

double TwoPhaseConstants::r_star_high(double rho) const {
  return 0.5 - 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * rho * (1.0 - rho) * c2 / c1));
}

double phi(double x, double y, double c1, double c2) {
  const auto k = TwoPhaseConstants::make(c1, c2);
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("phi needs x, y >= 0");
  const double s = std::sqrt(x) + std::sqrt(y);
  if (x >= y) return s * s / c2;
  const double b2 = k.b * k.b;
  if (x <= b2 * y) return s * s / c1;
  const double den = c1 * (1.0 - b2);
  const double bp = (1.0 + k.b) * (1.0 + k.b);
  return x * (4.0 * k.c - bp) / den + y * (bp - 4.0 * k.c * b2) / den;
}

double phi_wedge(double x, double y, double c1, double c2) { return phi(x + y, y, c1, c2); }

ProfileCase classify(double rho, const TwoPhaseConstants& k) {
  if (rho < k.rho_star) return ProfileCase::Low;
  if (rho <= 0.5) return ProfileCase::Middle;
  return ProfileCase::High;
}

double ProfilePiece::at(double x, double t) const {
  if (kind == Kind::Plateau) return value;
  return 0.5 * (1.0 - x / (t * fan_rate));
}

double DensityProfile::operator()(double x) const { return right_limit(x); }

double DensityProfile::right_limit(double x) const {
  for (const auto& p : pieces) {
    if (x < p.hi) return p.at(x, t);
  }
  return pieces.back().at(x, t);
}

double DensityProfile::left_limit(double x) const {
  for (const auto& p : pieces) {
    if (x <= p.hi) return p.at(x, t);
  }
  return pieces.back().at(x, t);
}

std::vector<double> DensityProfile::jumps(double tol) const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double x = pieces[k].hi;
    if (std::abs(pieces[k].at(x, t) - pieces[k + 1].at(x, t)) > tol) out.push_back(x);
  }
  return out;
}

DensityProfile profile_structure(double rho, double c1, double c2, double t) {
  check_rho(rho);
  check_t(t);
  const auto k = TwoPhaseConstants::make(c1, c2);
  DensityProfile p;
  p.t = t;
  p.kase = classify(rho, k);
  std::vector<ProfilePiece> raw;
  switch (p.kase) {
    case ProfileCase::Low: {
      const double r = k.r_star_low(rho);
      const double a = c2 * (1.0 - 2.0 * r) * t;
      const double b = c2 * (1.0 - 2.0 * rho) * t;
      raw = {plateau(-kInf, 0.0, rho), plateau(0.0, a, r), fan(a, b, c2), plateau(b, kInf, rho)};
      break;
    }
    case ProfileCase::Middle: {
      const double s = -t * c1 * (rho - k.rho_star);
      const double b = (1.0 - 2.0 * rho) * t * c2;
      raw = {plateau(-kInf, s, rho), plateau(s, 0.0, 1.0 - k.rho_star), fan(0.0, b, c2), plateau(b, kInf, rho)};
      break;
    }
    case ProfileCase::High: {
      const double r = k.r_star_high(rho);
      const double s = -t * c1 * (rho - r);
      raw = {plateau(-kInf, s, rho), plateau(s, 0.0, 1.0 - r), plateau(0.0, kInf, rho)};
      break;
    }
  }
  for (const auto& piece : raw) {
    if (piece.hi > piece.lo) p.pieces.push_back(piece);
  }
  return p;
}

double profile(double rho, double c1, double c2, double x, double t) {
  return profile_structure(rho, c1, c2, t)(x);
}

VClosed v_closed_detail(double x, double t, double rho, double c1, double c2) {
  check_rho(rho);
  check_t(t);
  const auto k = TwoPhaseConstants::make(c1, c2);
  const double rs = k.rho_star;
  const double B = k.B;
  // Value of the path that rides the discontinuity; slope 1 - rho_star.
  auto M = [&](double xx) {
    const double a = 1.0 + B / c1;
    return -(t + xx / B) * c2 / 4.0 + xx * c1 / (4.0 * B) * a * a;
  };
  const double lin1 = rho * x - t * c1 * h(rho);
  const double lin2 = rho * x - t * c2 * h(rho);
  VClosed out{};
  if (x >= 0.0) {
    out.R = (rho <= 0.5 && x < t * c2 * (1.0 - 2.0 * rho)) ? -t * c2 * g(x / (t * c2)) : lin2;
    const double D = k.D(rho);
    if (rho < rs && x <= t * std::sqrt(D)) {
      out.L = -t * c1 * h(rho) + x * (0.5 - std::sqrt(D) / (2.0 * c2));
    } else {
      out.L = -c2 * t * g(x / (t * c2));
    }
  } else {
    if (rho < rs) {
      out.L = lin1;
    } else if (rho <= 0.5) {
      out.L = x <= -t * c1 * (rho - rs) ? lin1 : M(x);
    } else if (rho <= 1.0 - rs) {
      out.L = x < -t * c1 * (rho - rs) ? lin1 : M(x);
    } else if (-B * t <= x) {
      out.L = M(x);
    } else if (-c1 * t * (2.0 * rho - 1.0) <= x) {
      out.L = -t * c1 * g(x / (t * c1));
    } else {
      out.L = lin1;
    }
    const double D1 = k.D1(rho);
    if (rho > 0.5 && -t * std::sqrt(D1) <= x) {
      out.R = -t * c2 * h(rho) + x * (0.5 + std::sqrt(D1) / (2.0 * c1));
    } else {
      out.R = -t * c1 * g(x / (t * c1));
    }
  }
  out.value = std::max(out.R, out.L);
  return out;
}

double v_closed(double x, double t, double rho, double c1, double c2) {
  return v_closed_detail(x, t, rho, c1, c2).value;
}

namespace {

void fill_boundary(EntropyReport& rep, double rm, double rp, double c1, double c2) {
  rep.rho_minus = rm;
  rep.rho_plus = rp;
  rep.flux_residual = std::abs(c2 * h(rp) - c1 * h(rm));
  const double fr = c2 * (1.0 - 2.0 * rp);
  const double fl = c1 * (1.0 - 2.0 * rm);
  rep.eb[0] = fr >= 0.0 && fl >= 0.0;
  rep.eb[1] = fr <= 0.0 && fl <= 0.0;
  rep.eb[2] = fr <= 0.0 && fl >= 0.0;
  rep.eb_case = 0;
  for (int k = 0; k < 3; ++k) {
    if (rep.eb[k]) {
      rep.eb_case = k + 1;
      break;
    }
  }
}

}  // namespace

EntropyReport entropy_check(const DensityProfile& p, double c1, double c2) {
  TwoPhaseConstants::make(c1, c2);
  if (p.pieces.empty()) throw DomainError("entropy_check: empty profile");
  EntropyReport rep;
  for (double x : p.jumps()) {
    if (x == 0.0) continue;
    if (!(p.right_limit(x) >= p.left_limit(x))) {
      ++rep.ei_violations;
      rep.violations.push_back(x);
    }
  }
  fill_boundary(rep, p.left_limit(0.0), p.right_limit(0.0), c1, c2);
  return rep;
}

EntropyReport entropy_check_sampled(const std::vector<double>& xs, const std::vector<double>& rho, double c1,
                                    double c2, double t, double factor) {
  TwoPhaseConstants::make(c1, c2);
  check_t(t);
  if (xs.size() != rho.size() || xs.size() < 2) throw DomainError("entropy_check_sampled: need matching samples");
  const auto zero = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), 0.0) - xs.begin());
  if (zero == 0 || zero == xs.size()) throw DomainError("entropy_check_sampled: samples must straddle 0");
  EntropyReport rep;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (k + 1 == zero) continue;  // the interface, handled below
    const double dx = xs[k + 1] - xs[k];
    const double c = xs[k + 1] <= 0.0 ? c1 : c2;
    const double fan_step = dx / (2.0 * t * c);
    const double jump = rho[k + 1] - rho[k];
    if (-jump > factor * fan_step) {
      ++rep.ei_violations;
      rep.violations.push_back(0.5 * (xs[k] + xs[k + 1]));
    }
  }
  fill_boundary(rep, rho[zero - 1], rho[zero], c1, c2);
  return rep;
}

std::string EntropyReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"ei_violations\":" << ei_violations << ",\"violations\":[";
  for (std::size_t k = 0; k < violations.size(); ++k) os << (k ? "," : "") << violations[k];
  os << "],\"rho_minus\":" << rho_minus << ",\"rho_plus\":" << rho_plus << ",\"flux_residual\":" << flux_residual
     << ",\"eb_holds\":[" << eb[0] << "," << eb[1] << "," << eb[2] << "],\"eb_case\":" << eb_case << "}";
  return os.str();
}

namespace {

double psi(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

double dpsi(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double q = 1.0 - s * s;
  return psi(s) * (-2.0 * s / (q * q));
}

double signed_residual(const Field& rho, const Bump& b, double c1, double c2, double hx) {
  const double x_lo = std::floor((b.x0 - b.rx) / hx) * hx;
  const double x_hi = std::ceil((b.x0 + b.rx) / hx) * hx;
  const double t_lo = std::max(0.0, std::floor((b.t0 - b.rt) / hx) * hx);
  const double t_hi = std::ceil((b.t0 + b.rt) / hx) * hx;
  const auto nx = static_cast<long>(std::llround((x_hi - x_lo) / hx));
  const auto nt = static_cast<long>(std::llround((t_hi - t_lo) / hx));
  double sum = 0.0;
  for (long j = 0; j < nt; ++j) {
    const double t = t_lo + (static_cast<double>(j) + 0.5) * hx;
    double row = 0.0;
    for (long i = 0; i < nx; ++i) {
      const double x = x_lo + (static_cast<double>(i) + 0.5) * hx;
      const double r = rho(x, t);
      const double c = x < 0.0 ? c1 : c2;
      row += r * b.dt(x, t) + c * h(r) * b.dx(x, t);
    }
    sum += row;
  }
  sum *= hx * hx;
  if (b.t0 - b.rt < 0.0) {
    double init = 0.0;
    for (long i = 0; i < nx; ++i) {
      const double x = x_lo + (static_cast<double>(i) + 0.5) * hx;
      init += rho(x, 0.0) * b(x, 0.0);
    }
    sum += init * hx;
  }
  return sum;
}

}  // namespace

double Bump::operator()(double x, double t) const { return psi((x - x0) / rx) * psi((t - t0) / rt); }

double Bump::dx(double x, double t) const { return dpsi((x - x0) / rx) / rx * psi((t - t0) / rt); }

double Bump::dt(double x, double t) const { return psi((x - x0) / rx) * dpsi((t - t0) / rt) / rt; }

double weak_residual(const Field& rho, const Bump& bump, double c1, double c2, double h_, bool richardson) {
  if (!(h_ > 0.0)) throw DomainError("weak_residual: h must be positive");
  if (!(bump.rx > 0.0) || !(bump.rt > 0.0)) throw DomainError("weak_residual: bump radii must be positive");
  const double r1 = signed_residual(rho, bump, c1, c2, h_);
  if (!richardson) return std::abs(r1);
  const double r2 = signed_residual(rho, bump, c1, c2, 0.5 * h_);
  return std::abs((4.0 * r2 - r1) / 3.0);
}

}  // namespace tasep::twophase
