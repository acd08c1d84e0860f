#include <gtest/gtest.h>

#include <cmath>

#include "nscyl/inequalities.hpp"

using namespace nscyl;

TEST(Nash, VerticalCosineByQuadrature) {
  const double L = 4.0;
  const Grid g(16, 64, L);
  const auto f = ScalarField::sample(g, [](double, double y) { return std::cos(kTwoPi * y); });
  const auto r = nash_check(f);
  // Independent midpoint quadrature of the one-dimensional integrals.
  const int n = 100000;
  double l1 = 0.0, l2 = 0.0, g2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = (k + 0.5) / n;
    l1 += std::abs(std::cos(kTwoPi * y)) / n;
    l2 += std::pow(std::cos(kTwoPi * y), 2) / n;
    g2 += std::pow(kTwoPi * std::sin(kTwoPi * y), 2) / n;
  }
  l1 *= L;
  l2 = std::sqrt(l2 * L);
  g2 = std::sqrt(g2 * L);
  EXPECT_NEAR(r.lhs, l2, 1e-10);
  EXPECT_NEAR(r.grad_l2, g2, 1e-9);
  EXPECT_NEAR(r.l1, l1, 2e-3 * l1);  // grid quadrature of |cos| has a kink
  EXPECT_NEAR(r.rhs_branch1, std::cbrt(g2) * std::pow(l1, 2.0 / 3.0), 2e-3 * r.rhs_branch1);
  EXPECT_NEAR(r.rhs_branch2, std::sqrt(g2 * l1), 2e-3 * r.rhs_branch2);
  EXPECT_THROW(nash_check(ScalarField::physical(g)), Error);
}

TEST(Nash, BroadGaussianUsesFirstBranchAndIsScaleStable) {
  const double L = 64.0;
  const Grid g(512, 8, L);
  auto ratio_for = [&](double w) {
    return nash_check(ScalarField::sample(g, [&](double x, double) {
      const double d = x - L / 2;
      return std::exp(-d * d / (2 * w * w));
    }));
  };
  const auto a = ratio_for(2.0), b = ratio_for(4.0);
  EXPECT_EQ(a.dominant_branch, 1);
  EXPECT_EQ(b.dominant_branch, 1);
  // Analytic: ||f||_2^2 = w sqrt(pi), ||f||_1 = w sqrt(2 pi), ||f'||_2^2 = sqrt(pi) / (2w).
  auto analytic = [](double w) {
    const double l2 = std::sqrt(w * std::sqrt(kPi));
    const double l1 = w * std::sqrt(kTwoPi);
    const double gr = std::sqrt(std::sqrt(kPi) / (2 * w));
    return l2 / (std::cbrt(gr) * std::pow(l1, 2.0 / 3.0));
  };
  EXPECT_NEAR(a.ratio, analytic(2.0), 1e-8);
  EXPECT_NEAR(b.ratio / a.ratio, 1.0, 1e-8);
}

TEST(Nash, NarrowBumpUsesSecondBranch) {
  const double L = 2.0;
  const Grid g(256, 128, L);
  const double s = 0.06;
  const auto f = ScalarField::sample(g, [&](double x, double y) {
    const double d1 = x - 1.0, d2 = y - 0.5;
    return std::exp(-(d1 * d1 + d2 * d2) / (2 * s * s));
  });
  const auto r = nash_check(f);
  EXPECT_EQ(r.dominant_branch, 2);
  // 2D Gaussian: ratio = pi^{-1/4} / sqrt(2), independent of s.
  EXPECT_NEAR(r.ratio, std::pow(kPi, -0.25) / std::sqrt(2.0), 1e-6);
}

TEST(Nash, ScalingAndTranslationInvariance) {
  const Grid g(64, 32, 8.0);
  const auto f = nash_sample(g, NashFamily::broad, 4);
  auto scaled = f;
  scaled *= -3.5;
  EXPECT_NEAR(nash_check(scaled).ratio, nash_check(f).ratio, 1e-12);
  EXPECT_NEAR(psi_nash_check(scaled), psi_nash_check(f), 1e-12);
  const auto p = as_physical(f);
  auto shifted = ScalarField::physical(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) shifted.values()[g.pidx((i + 5) % g.nx(), (j + 3) % g.ny())] = p.value(i, j);
  EXPECT_NEAR(nash_check(shifted).ratio, nash_check(f).ratio, 1e-12);
}

TEST(PsiNash, CosineClosedForm) {
  const double L = 4.0;
  const Grid g(16, 256, L);
  const auto f = ScalarField::sample(g, [](double, double y) { return std::cos(kTwoPi * y); });
  const double l2 = std::sqrt(L / 2), l1 = 2 * L / kPi, gr = kTwoPi * l2;
  const double a = l2 / l1;
  // Grid quadrature of |cos| carries a small kink error in the L1 norm.
  EXPECT_NEAR(psi_nash_check(f) / (gr / (l2 * std::min(a, a * a))), 1.0, 5e-4);
  EXPECT_THROW(psi_nash_check(ScalarField::physical(g)), Error);
}

TEST(Poincare, ModesAndRandomFields) {
  const Grid g(32, 32, 4.0);
  const auto c1 = ScalarField::sample(g, [](double x, double y) { return (1 + std::cos(kTwoPi * x / 4)) * std::cos(kTwoPi * y); });
  EXPECT_NEAR(poincare_check(c1), 1.0, 1e-12);
  const auto c2 = ScalarField::sample(g, [](double, double y) { return std::cos(2 * kTwoPi * y); });
  EXPECT_NEAR(poincare_check(c2), 0.25, 1e-12);
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto f = random_bandlimited(g, seed, 8, 8, true);
    // Spectral oracle: weighted average of 1/n^2 over the vertical modes.
    double num = 0.0, den = 0.0;
    const auto s = as_spectral(f);
    for (int i = 0; i < g.nx(); ++i)
      for (int n = 1; n < g.nky(); ++n) {
        const double w = std::norm(s.coeff(i, n));
        num += w;
        den += w * n * n;
      }
    EXPECT_NEAR(poincare_check(f), num / den, 1e-12);
    EXPECT_LE(poincare_check(f), 1.0 + 1e-10);
  }
  const auto mean = ScalarField::sample(g, [](double x, double) { return std::sin(kTwoPi * x / 4); });
  EXPECT_THROW(poincare_check(mean), Error);
}

TEST(Kappa, Values) {
  const Grid g(16, 16, 4.0);
  EXPECT_EQ(kappa_of(ScalarField::physical(g)), 0.0);
  auto f = ScalarField::sample(g, [](double, double y) { return 4 * kPi * kPi * std::cos(kTwoPi * y); });
  EXPECT_NEAR(kappa_of(f), 1.0, 1e-14);
  f *= 0.5;
  EXPECT_NEAR(kappa_of(f), 0.5, 1e-14);
}

TEST(FluxConstants, ZeroTrajectoryIsEmpty) {
  const Grid g(16, 16, 4.0);
  FlowState s{0.0, ScalarField::spectral(g), 0.0, 0.0, 0.0};
  const auto r = flux_bound_constants({snapshot_diagnostics(s)});
  EXPECT_EQ(r.C3.samples, 0);
  EXPECT_EQ(r.C4.samples, 0);
  EXPECT_EQ(r.C8.samples, 0);
  EXPECT_EQ(r.C3.skipped, 16);
}

TEST(FluxConstants, EigenmodeHasNoHorizontalFlux) {
  const Grid g(16, 32, 4.0);
  InitialDataSpec spec;
  spec.kind = InitKind::shear_eigenmode;
  const auto s = make_initial_data(spec, g);
  const auto r = flux_bound_constants({snapshot_diagnostics(s)});
  EXPECT_EQ(r.C3.samples, 16);
  EXPECT_LE(r.C3.max_ratio, 1e-24);
  EXPECT_LE(r.C4.max_ratio, 1e-24);
  EXPECT_LE(r.C8.max_ratio, 1e-24);
}

TEST(FluxConstants, RandomDataFiniteAndGhatBelowKappa) {
  const Grid g(128, 32, 16.0);
  std::vector<DiagSnapshot> traj;
  for (std::uint64_t seed : {1, 2}) {
    InitialDataSpec spec;
    spec.kind = InitKind::random_bandlimited;
    spec.seed = seed;
    spec.target_Ru = 4.0;
    spec.target_Romega = 6.0;
    traj.push_back(snapshot_diagnostics(make_initial_data(spec, g)));
  }
  const auto r = flux_bound_constants(traj, "unit");
  EXPECT_GT(r.C3.samples, 0);
  EXPECT_TRUE(std::isfinite(r.C3.max_ratio));
  EXPECT_TRUE(std::isfinite(r.C4.max_ratio));
  EXPECT_TRUE(std::isfinite(r.C8.max_ratio));
  EXPECT_LE(r.g_hat_excess, 0.0);
  ASSERT_EQ(r.C3.quantiles.size(), 3u);
  EXPECT_LE(r.C3.quantiles[2].second, r.C3.max_ratio);
}

TEST(Summary, Quantiles) {
  std::vector<double> v;
  for (int k = 0; k <= 100; ++k) v.push_back(k);
  const auto r = summarize_ratios("x", v, 2, "cfg");
  EXPECT_EQ(r.samples, 101);
  EXPECT_EQ(r.skipped, 2);
  EXPECT_EQ(r.max_ratio, 100.0);
  EXPECT_EQ(r.min_ratio, 0.0);
  EXPECT_DOUBLE_EQ(r.quantiles[0].second, 50.0);
  EXPECT_DOUBLE_EQ(r.quantiles[1].second, 90.0);
  EXPECT_DOUBLE_EQ(r.quantiles[2].second, 99.0);
}

TEST(NashSuite, BothBranchesAndPsiIdentity) {
  const Grid g(256, 64, 16.0);
  const auto r = nash_suite(g, 60, 100);
  EXPECT_EQ(r.nash.samples, 60);
  EXPECT_GT(r.branch1_dominant, 0);
  EXPECT_GT(r.branch2_dominant, 0);
  EXPECT_TRUE(std::isfinite(r.nash.max_ratio));
  EXPECT_LE(r.psi_identity_defect, 1e-12);
  EXPECT_EQ(r.nash.max_ratio, std::max(r.max_first_half, r.max_second_half));
}
