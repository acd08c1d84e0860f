#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nscyl/diagnostics.hpp"

using namespace nscyl;

namespace {

FlowState eigenmode(const Grid& g, double A) {
  InitialDataSpec spec;
  spec.kind = InitKind::shear_eigenmode;
  spec.target_Romega = A;
  return make_initial_data(spec, g);
}

FlowState random_state(const Grid& g, std::uint64_t seed, double Ru, double Rw, int band) {
  InitialDataSpec spec;
  spec.kind = InitKind::random_bandlimited;
  spec.seed = seed;
  spec.target_Ru = Ru;
  spec.target_Romega = Rw;
  spec.band = band;
  return make_initial_data(spec, g);
}

void expect_constant(const Profile& p, double v, double tol) {
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], v, tol) << "i=" << i;
}

}  // namespace

TEST(Profiles, UniformFlow) {
  const Grid g(16, 16, 4.0);
  const double c = 1.5;
  FlowState s{0.0, ScalarField::spectral(g), c, 0.0, 0.0};
  const auto en = energy_profiles(s);
  expect_constant(en.e, 0.5 * c * c, 1e-14);
  expect_constant(en.h, 0.5 * c * c * c, 1e-13);
  expect_constant(en.f, -0.5 * c * c * c, 1e-13);
  expect_constant(en.d, 0.0, 1e-14);
  const auto ens = enstrophy_profiles(s);
  expect_constant(ens.eps, 0.0, 0.0);
  expect_constant(ens.delta, 0.0, 0.0);
}

TEST(Profiles, ZeroStateKeepsMeanFlowOffset) {
  const Grid g(16, 16, 4.0);
  FlowState s{0.0, ScalarField::spectral(g), 0.0, 0.0, 1.0};
  const auto en = energy_profiles(s);
  expect_constant(en.e, 0.5, 1e-15);
  expect_constant(en.d, 0.0, 0.0);
  expect_constant(en.h, 0.0, 0.0);
}

TEST(Profiles, ShearEigenmodeClosedForms) {
  const Grid g(16, 32, 4.0);
  const double A = 3.0;
  const auto s = eigenmode(g, A);
  const double pi2 = kPi * kPi;
  const auto en = energy_profiles(s);
  expect_constant(en.d, A * A / 2, 1e-12);
  expect_constant(en.e, A * A / (16 * pi2) + A * A / 2, 1e-12);
  const auto ens = enstrophy_profiles(s);
  expect_constant(ens.eps, A * A / 4, 1e-12);
  expect_constant(ens.delta, 2 * pi2 * A * A, 1e-10);
  expect_constant(ens.phi, 0.0, 1e-12);
  const auto osc = oscillatory_profiles(s);
  expect_constant(osc.e_hat, A * A / (16 * pi2), 1e-13);
  for (std::size_t i = 0; i < osc.e_hat.size(); ++i)
    EXPECT_NEAR(osc.e_hat[i], osc.d_hat[i] / (8 * pi2), 1e-13);
  expect_constant(osc.g_hat, 0.0, 1e-14);
}

TEST(Localized, ConstantProfileClosedForm) {
  const double L = 8.0;
  const Grid g(32, 8, L);
  const auto p = Profile(g, std::vector<double>(32, 3.0));
  for (double rho : {0.1, 1.0, 4.0}) {
    const double exact = 3.0 * 2.0 / rho * (1.0 - std::exp(-rho * L / 2));
    EXPECT_NEAR(localized_integral(p, rho, 1.3), exact, 1e-12 * exact);
  }
  // Large rho: weight concentrates, integral -> 2 p(a) / rho.
  EXPECT_NEAR(localized_integral(p, 1e3, 0.0) * 1e3 / 2.0, 3.0, 1e-9);
}

TEST(Localized, MatchesQuadratureForCosine) {
  const double L = 8.0;
  const Grid g(32, 8, L);
  std::vector<double> v(32);
  for (int i = 0; i < 32; ++i) v[i] = 1.0 + std::cos(kTwoPi * g.x1(i) / L);
  const Profile p(g, v);
  const double rho = 0.7, a = 2.0;
  // Fine midpoint quadrature of the interpolant (exactly the cosine).
  const int n = 200000;
  double q = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = -L / 2 + (k + 0.5) * L / n;
    double d = std::fmod(std::abs(x - a), L);
    d = std::min(d, L - d);
    q += std::exp(-rho * d) * (1.0 + std::cos(kTwoPi * x / L)) * L / n;
  }
  EXPECT_NEAR(localized_integral(p, rho, a), q, 1e-7);
  EXPECT_THROW(localized_integral(p, 0.0, a), Error);
}

TEST(Ul2, ConstantVelocity) {
  const Grid g(32, 8, 8.0);
  VelocityField u{ScalarField::sample(g, [](double, double) { return 0.5; }),
                  ScalarField::sample(g, [](double, double) { return 0.0; })};
  EXPECT_NEAR(ul2_norm(u), std::sqrt(2 * 0.25), 1e-13);
  const Grid small(16, 8, 1.0);
  VelocityField v{ScalarField::physical(small), ScalarField::physical(small)};
  EXPECT_THROW(ul2_norm(v), Error);
}

TEST(Ul2, LocalizedBumpMatchesQuadrature) {
  const double L = 16.0;
  const Grid g(128, 8, L);
  auto bump = [&](double x, double) { return std::exp(-(x - L / 2) * (x - L / 2)); };
  VelocityField u{ScalarField::sample(g, bump), ScalarField::physical(g)};
  // Window centred at the bump: integral of exp(-2x^2) over [-1, 1].
  const double exact = std::sqrt(std::sqrt(kPi / 2) * std::erf(std::sqrt(2.0)));
  EXPECT_NEAR(ul2_norm(u), exact, 1e-6);
}

TEST(VVolume, Values) {
  EXPECT_DOUBLE_EQ(v_volume(1.0), 1.0);
  EXPECT_DOUBLE_EQ(v_volume(4.0), 2.0);
  EXPECT_DOUBLE_EQ(v_volume(0.25), 0.25);
  EXPECT_THROW(v_volume(0.0), Error);
}

TEST(FitRate, ExponentialAndPower) {
  std::vector<std::pair<double, double>> exp_series, pow_series;
  for (int k = 0; k <= 20; ++k) {
    const double t = 0.05 + 0.025 * k;
    exp_series.emplace_back(t, 2.0 * std::exp(-4 * kPi * kPi * t));
  }
  for (int k = 0; k <= 20; ++k) {
    const double t = 1.0 + k;
    pow_series.emplace_back(t, 3.0 * std::pow(t, -0.25));
  }
  const auto fe = fit_decay_rate(exp_series, 0.05, 0.55, RateModel::exponential);
  EXPECT_NEAR(fe.exponent_or_rate, 4 * kPi * kPi, 1e-6);
  EXPECT_EQ(fe.samples, 21);
  const auto fp = fit_decay_rate(pow_series, 1.0, 21.0, RateModel::power);
  EXPECT_NEAR(fp.exponent_or_rate, -0.25, 1e-10);
  EXPECT_NEAR(std::exp(fp.log_prefactor), 3.0, 1e-9);
}

TEST(FitRate, NoisyPowerLawWithinTwoPercent) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<std::pair<double, double>> series;
  for (int k = 0; k < 200; ++k) {
    const double t = std::exp(0.02 * k);
    series.emplace_back(t, std::pow(t, -0.5) * std::exp(noise(rng)));
  }
  const auto f = fit_decay_rate(series, 1.0, 60.0, RateModel::power);
  EXPECT_NEAR(f.exponent_or_rate, -0.5, 0.01);
}

TEST(FitRate, Errors) {
  std::vector<std::pair<double, double>> few{{1, 1}, {2, 0.5}, {3, 0.3}};
  EXPECT_THROW(fit_decay_rate(few, 0, 4, RateModel::power), Error);
  std::vector<std::pair<double, double>> neg;
  for (int k = 1; k <= 10; ++k) neg.emplace_back(k, k == 5 ? -1.0 : 1.0);
  EXPECT_THROW(fit_decay_rate(neg, 0, 11, RateModel::exponential), Error);
}

TEST(Balance, ResidualsAreSecondOrderInProbeStep) {
  const Grid g(64, 16, 8.0);
  auto s = random_state(g, 9, 3.0, 5.0, 1);
  s.c = 0.3;
  const auto r1 = probe_balance_residuals(s, 2e-4);
  const auto r2 = probe_balance_residuals(s, 1e-4);
  EXPECT_GT(r1.energy / r2.energy, 3.5);
  EXPECT_GT(r1.enstrophy / r2.enstrophy, 3.5);
  EXPECT_GT(r1.oscillatory / r2.oscillatory, 3.5);
}

TEST(Balance, OscillatoryResidualTracksUniformFlow) {
  const Grid g(128, 32, 16.0);
  auto s = random_state(g, 77, 3.0, 5.0, 1);
  s.c = 0.25;
  s = run(s, 0.05, {}, {});
  const auto r1 = probe_balance_residuals(s, 2e-4);
  const auto r2 = probe_balance_residuals(s, 1e-4);
  EXPECT_GT(r1.oscillatory / r2.oscillatory, 3.5);
}

TEST(Balance, TrajectoryRequiresEqualSpacing) {
  const Grid g(16, 16, 4.0);
  const auto s0 = eigenmode(g, 1.0);
  auto s1 = step(s0, 1e-3);
  auto s2 = step(s1, 2e-3);
  EXPECT_THROW(balance_residuals({s0, s1, s2}), Error);
  auto s3 = step(s1, 1e-3);
  const auto r = balance_residuals({s0, s1, s3});
  ASSERT_EQ(r.size(), 1u);
  // Pure eigenmode: only the centered-difference error (8 pi^2 dt)^2 / 6 remains.
  EXPECT_LT(r[0].energy, 2e-3 * profile_l2(energy_profiles(s1).d));
}

TEST(Pointwise, BoundsHoldOnRandomData) {
  const Grid g(128, 32, 16.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto s = random_state(g, seed, 4.0, 6.0, 2);
    const auto slack = pointwise_slack(snapshot_diagnostics(s));
    EXPECT_LE(slack.de_sq_vs_2ed, 1e-12);
    EXPECT_LE(slack.eps_vs_d, 1e-12);
    EXPECT_LE(slack.ehat_vs_dhat, 1e-12);
    EXPECT_LE(slack.ghat_vs_kappa_dhat, 1e-12);
  }
}

TEST(Theorem, ZeroCase) {
  const Grid g(16, 16, 4.0);
  FlowState s{0.0, ScalarField::spectral(g), 0.0, 0.0, 0.0};
  const auto r = theorem_checks({snapshot_diagnostics(s)}, 4.0, TheoremConfig{});
  EXPECT_TRUE(r.zero_case);
}

TEST(Theorem, LaminarEigenmodeRate) {
  const Grid g(16, 32, 4.0);
  const auto s0 = eigenmode(g, 0.1 * 4 * kPi * kPi);
  std::vector<double> times;
  for (int k = 1; k <= 20; ++k) times.push_back(0.025 * k);
  std::vector<DiagSnapshot> traj{snapshot_diagnostics(s0)};
  RunOptions opt;
  opt.fixed_dt = 1e-3;
  run(s0, 0.5, times, [&](const FlowState& st) { traj.push_back(snapshot_diagnostics(st)); }, opt);
  TheoremConfig cfg;
  cfg.T_list.clear();
  const auto r = theorem_checks(traj, 4.0, cfg);
  EXPECT_FALSE(r.zero_case);
  EXPECT_NEAR(r.kappa, 0.1, 1e-12);
  ASSERT_TRUE(r.ul2_fit.has_value());
  EXPECT_NEAR(r.ul2_fit->exponent_or_rate / (4 * kPi * kPi), 1.0, 1e-2);
  ASSERT_TRUE(r.uhat_sup_fit.has_value());
  EXPECT_NEAR(r.uhat_sup_fit->exponent_or_rate / (4 * kPi * kPi), 1.0, 1e-2);
  ASSERT_TRUE(r.smoothing_ratio.has_value());
  EXPECT_LE(r.velocity_ratio, 1.0);
}

TEST(Theorem, MissingSnapshotForRequestedTime) {
  const Grid g(16, 32, 4.0);
  const auto s0 = eigenmode(g, 1.0);
  std::vector<DiagSnapshot> traj{snapshot_diagnostics(s0), snapshot_diagnostics(step(s0, 0.5)),
                                 snapshot_diagnostics(step(step(s0, 0.5), 0.6))};
  TheoremConfig cfg;
  cfg.T_list = {1.0};
  EXPECT_THROW(theorem_checks(traj, 4.0, cfg), Error);
}
