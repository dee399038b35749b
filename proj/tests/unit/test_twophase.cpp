#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tasep/twophase.hpp"

using namespace tasep::twophase;

TEST(Constants, InvariantsAndRejection) {
  const auto k = TwoPhaseConstants::make(2.0, 1.0);
  EXPECT_NEAR(k.b, 3.0 - 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(k.rho_star, 0.5 - 0.5 * std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(k.B, std::sqrt(2.0), 1e-15);
  const auto one = TwoPhaseConstants::make(1.5, 1.5);
  EXPECT_EQ(one.b, 1.0);
  EXPECT_EQ(one.rho_star, 0.5);
  EXPECT_THROW(TwoPhaseConstants::make(1.0, 2.0), DomainError);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const double c2 = 0.1 + U(gen);
    const auto kk = TwoPhaseConstants::make(c2 * (1.0 + 5.0 * U(gen)), c2);
    EXPECT_GT(kk.b, 0.0);
    EXPECT_LE(kk.b, 1.0);
    EXPECT_GT(kk.rho_star, 0.0);
    EXPECT_LE(kk.rho_star, 0.5);
    const double rho = U(gen);
    const bool outside = rho <= kk.rho_star || rho >= 1.0 - kk.rho_star;
    if (std::abs(rho - kk.rho_star) > 1e-9 && std::abs(rho - 1.0 + kk.rho_star) > 1e-9) {
      EXPECT_EQ(kk.D(rho) >= 0.0, outside) << rho;
    }
    // Flux matching at the critical density.
    EXPECT_NEAR(kk.c1 * kk.rho_star * (1.0 - kk.rho_star), kk.c2 / 4.0, 1e-12 * kk.c1);
  }
}

TEST(Phi, BranchesAndExamples) {
  EXPECT_NEAR(phi(1.0, 1.0, 3.0, 3.0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(phi(0.2, 1.0, 3.0, 3.0), std::pow(std::sqrt(0.2) + 1.0, 2) / 3.0, 1e-15);
  EXPECT_NEAR(phi(1.0, 1.0, 2.0, 1.0), 4.0, 1e-15);
  EXPECT_NEAR(phi(0.01, 1.0, 2.0, 1.0), 0.605, 1e-12);
  EXPECT_THROW(phi(1.0, 1.0, 1.0, 2.0), DomainError);
}

TEST(Phi, ContinuousAndHomogeneous) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const double c2 = 0.2 + U(gen);
    const double c1 = c2 * (1.0 + 4.0 * U(gen) + 1e-3);
    const double y = 0.1 + 3.0 * U(gen);
    const double b = TwoPhaseConstants::make(c1, c2).b;
    for (double xs : {b * b * y, y}) {
      const double eps = 1e-9 * xs;
      EXPECT_NEAR(phi(xs - eps, y, c1, c2), phi(xs + eps, y, c1, c2), 1e-12 + 1e-7 * phi(xs, y, c1, c2));
    }
    // Branch formulas agree exactly at the switch points.
    const double s1 = std::pow(b * std::sqrt(y) + std::sqrt(y), 2) / c1;
    const double den = c1 * (1 - b * b);
    const double mid1 = b * b * y * (4 * c1 / c2 - (1 + b) * (1 + b)) / den +
                        y * ((1 + b) * (1 + b) - 4 * c1 / c2 * b * b) / den;
    EXPECT_NEAR(s1, mid1, 1e-12 * s1);
    const double mid2 = y * (4 * c1 / c2 - (1 + b) * (1 + b)) / den + y * ((1 + b) * (1 + b) - 4 * c1 / c2 * b * b) / den;
    EXPECT_NEAR(4.0 * y / c2, mid2, 1e-12 * mid2);
    const double x = 3.0 * U(gen);
    const double lam = 0.1 + 3.0 * U(gen);
    EXPECT_NEAR(phi(lam * x, lam * y, c1, c2), lam * phi(x, y, c1, c2), 1e-12 * lam * phi(x, y, c1, c2));
  }
}

TEST(Profile, CaseExamples) {
  const double c1 = 2.0, c2 = 1.0;
  EXPECT_NEAR(profile(0.3, c1, c2, 0.1, 1.0), 0.5 * (1.0 - 0.1), 1e-15);
  EXPECT_EQ(profile(0.7, c1, c2, 0.4, 1.0), 0.7);
  const double r = 0.5 - 0.5 * std::sqrt(1.0 - 4.0 * 0.09 * 2.0);
  EXPECT_NEAR(r, 0.2354, 1e-4);
  EXPECT_NEAR(profile(0.1, c1, c2, 0.2, 1.0), r, 1e-15);
  EXPECT_EQ(profile(0.1, c1, c2, -0.2, 1.0), 0.1);
  EXPECT_THROW(profile(0.0, c1, c2, 0.0, 1.0), DomainError);
  EXPECT_THROW(profile(1.0, c1, c2, 0.0, 1.0), DomainError);
  EXPECT_EQ(profile_structure(0.1, c1, c2, 1.0).kase, ProfileCase::Low);
  EXPECT_EQ(profile_structure(0.3, c1, c2, 1.0).kase, ProfileCase::Middle);
  EXPECT_EQ(profile_structure(0.5, c1, c2, 1.0).kase, ProfileCase::Middle);
  EXPECT_EQ(profile_structure(0.7, c1, c2, 1.0).kase, ProfileCase::High);
  const auto k = TwoPhaseConstants::make(c1, c2);
  EXPECT_EQ(profile_structure(k.rho_star, c1, c2, 1.0).kase, ProfileCase::Middle);
}

TEST(Profile, BoundaryCasesAgreeWithNeighbours) {
  const double c1 = 2.0, c2 = 1.0;
  const auto k = TwoPhaseConstants::make(c1, c2);
  // At rho = rho* the low case and middle case coincide in the limit.
  for (double x = -1.5; x <= 1.5; x += 0.01) {
    EXPECT_NEAR(profile(k.rho_star - 1e-10, c1, c2, x, 1.0), profile(k.rho_star, c1, c2, x, 1.0),
                std::abs(x) < 0.02 ? 1.0 : 1e-4)
        << x;
    EXPECT_NEAR(profile(0.5 + 1e-10, c1, c2, x, 1.0), profile(0.5, c1, c2, x, 1.0), 1e-4) << x;
  }
}

TEST(Profile, SelfSimilarAndTiles) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double rho : {0.05, 0.1, 0.2, 0.3, 0.5, 0.6, 0.9}) {
    const auto p = profile_structure(rho, 2.0, 1.0, 1.0);
    EXPECT_EQ(p.pieces.front().lo, -INFINITY);
    EXPECT_EQ(p.pieces.back().hi, INFINITY);
    for (std::size_t k = 0; k + 1 < p.pieces.size(); ++k) EXPECT_EQ(p.pieces[k].hi, p.pieces[k + 1].lo);
    for (int n = 0; n < 200; ++n) {
      const double x = 4.0 * U(gen) - 2.0;
      const double lam = 0.1 + 5.0 * U(gen);
      EXPECT_NEAR(profile(rho, 2.0, 1.0, lam * x, lam), profile(rho, 2.0, 1.0, x, 1.0), 1e-12);
      const double v = p(x);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Profile, MassBalance) {
  // d/dt int_a^b rho = F(a) - F(b) with a, b outside the disturbance cone.
  const double c1 = 2.0, c2 = 1.0, a = -3.0, b = 3.0, t = 1.0;
  for (double rho : {0.1, 0.3, 0.7}) {
    // Pieces are affine, so the trapezoid rule on each one is exact.
    double mass = 0.0;
    const auto p = profile_structure(rho, c1, c2, t);
    for (const auto& pc : p.pieces) {
      const double lo = std::max(a, pc.lo), hi = std::min(b, pc.hi);
      if (hi > lo) mass += 0.5 * (pc.at(lo, t) + pc.at(hi, t)) * (hi - lo);
    }
    const double flux = (c1 - c2) * rho * (1 - rho) * t;
    EXPECT_NEAR(mass - rho * (b - a), flux, 1e-6) << rho;
  }
}

TEST(VClosed, Examples) {
  EXPECT_NEAR(v_closed(0.0, 1.0, 0.5, 2.0, 1.0), -0.25, 1e-15);
  const auto d = v_closed_detail(0.0, 1.0, 0.5, 2.0, 1.0);
  EXPECT_NEAR(d.R, -1.0 / 4.0, 1e-15);
  for (double rho : {0.1, 0.3, 0.7}) {
    EXPECT_NEAR(v_closed(1.5, 1.0, rho, 2.0, 1.0), rho * 1.5 - rho * (1 - rho), 1e-14);
  }
}

TEST(VClosed, DerivativeIsProfileAndContinuous) {
  const double c1 = 2.0, c2 = 1.0, t = 1.0;
  for (double rho : {0.05, 0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.8, 0.9, 0.95}) {
    const auto p = profile_structure(rho, c1, c2, t);
    const auto jumps = p.jumps();
    const double h = 1e-6;
    for (double x = -2.5; x <= 2.5; x += 0.0137) {
      bool near_jump = std::abs(x) < 2 * h;
      for (double j : jumps) near_jump |= std::abs(x - j) < 2 * h;
      for (const auto& pc : p.pieces) near_jump |= std::abs(x - pc.hi) < 2 * h;
      if (near_jump) continue;
      const double d = (v_closed(x + h, t, rho, c1, c2) - v_closed(x - h, t, rho, c1, c2)) / (2 * h);
      EXPECT_NEAR(d, p(x), 1e-6) << "rho " << rho << " x " << x;
    }
    for (double x = -2.5; x <= 2.5; x += 0.001) {
      EXPECT_NEAR(v_closed(x, t, rho, c1, c2), v_closed(x + 1e-9, t, rho, c1, c2), 1e-8) << rho << " " << x;
    }
  }
}

TEST(Entropy, ConstantDensityProfilesPass) {
  const double c1 = 2.0, c2 = 1.0;
  const auto k = TwoPhaseConstants::make(c1, c2);
  for (double rho : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto rep = entropy_check(profile_structure(rho, c1, c2, 1.0), c1, c2);
    EXPECT_EQ(rep.ei_violations, 0);
    EXPECT_LT(rep.flux_residual, 1e-10) << rho;
    EXPECT_NE(rep.eb_case, 0);
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.eb_case, rho < k.rho_star ? 1 : 2) << rho;
  }
  const auto mid = entropy_check(profile_structure(0.3, c1, c2, 1.0), c1, c2);
  EXPECT_NEAR(mid.rho_minus, 1.0 - k.rho_star, 1e-15);
  EXPECT_NEAR(mid.rho_plus, 0.5, 1e-15);
}

TEST(Entropy, HomogeneousAndReversedJump) {
  const auto flat = entropy_check(profile_structure(0.3, 1.0, 1.0, 1.0), 1.0, 1.0);
  EXPECT_TRUE(flat.passed());
  DensityProfile bad;
  bad.t = 1.0;
  bad.pieces = {{-INFINITY, 0.5, ProfilePiece::Kind::Plateau, 0.8, 0.0},
                {0.5, INFINITY, ProfilePiece::Kind::Plateau, 0.2, 0.0}};
  const auto rep = entropy_check(bad, 2.0, 1.0);
  EXPECT_EQ(rep.ei_violations, 1);
  EXPECT_EQ(rep.violations.at(0), 0.5);
  EXPECT_FALSE(rep.passed());
  EXPECT_NE(rep.to_json().find("\"ei_violations\":1"), std::string::npos);
}

TEST(Entropy, SampledMatchesSymbolic) {
  for (double rho : {0.1, 0.3, 0.7}) {
    const auto p = profile_structure(rho, 2.0, 1.0, 1.0);
    std::vector<double> xs, rs;
    for (int i = -200; i < 200; ++i) {
      xs.push_back((i + 0.5) * 0.01);
      rs.push_back(p(xs.back()));
    }
    const auto rep = entropy_check_sampled(xs, rs, 2.0, 1.0, 1.0);
    EXPECT_EQ(rep.ei_violations, 0);
    EXPECT_LT(rep.flux_residual, 0.02);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] > 1.2) rs[i] = 0.0;  // downward jump away from 0
    }
    EXPECT_GT(entropy_check_sampled(xs, rs, 2.0, 1.0, 1.0).ei_violations, 0);
  }
}

TEST(WeakResidual, ZeroDensityAndBump) {
  const Bump b{0.1, 0.5, 0.3, 0.2};
  EXPECT_GT(b(0.1, 0.5), 0.0);
  EXPECT_EQ(b(0.5, 0.5), 0.0);
  const double e = 1e-6;
  EXPECT_NEAR(b.dx(0.2, 0.45), (b(0.2 + e, 0.45) - b(0.2 - e, 0.45)) / (2 * e), 1e-7);
  EXPECT_NEAR(b.dt(0.2, 0.45), (b(0.2, 0.45 + e) - b(0.2, 0.45 - e)) / (2 * e), 1e-7);
  auto zero = [](double, double) { return 0.0; };
  EXPECT_EQ(weak_residual(zero, b, 2.0, 1.0, 0.01), 0.0);
}

TEST(WeakResidual, FrozenDataDoesNotConverge) {
  auto frozen = [](double, double) { return 0.3; };
  const Bump b{0.0, 0.3, 0.4, 0.5};
  const double r1 = weak_residual(frozen, b, 2.0, 1.0, 0.02);
  const double r2 = weak_residual(frozen, b, 2.0, 1.0, 0.005);
  EXPECT_GT(r2, 0.01);
  EXPECT_NEAR(r1, r2, 0.1 * r2);
}
