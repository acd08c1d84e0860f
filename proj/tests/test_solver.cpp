#include <gtest/gtest.h>

#include <cmath>

#include "nscyl/solver.hpp"

using namespace nscyl;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  const auto pa = as_physical(a);
  const auto pb = as_physical(b);
  double m = 0.0;
  for (std::size_t k = 0; k < pa.values().size(); ++k)
    m = std::max(m, std::abs(pa.values()[k] - pb.values()[k]));
  return m;
}

FlowState random_state(const Grid& g, std::uint64_t seed, double Ru, double Rw) {
  InitialDataSpec spec;
  spec.kind = InitKind::random_bandlimited;
  spec.seed = seed;
  spec.target_Ru = Ru;
  spec.target_Romega = Rw;
  spec.band = 2;
  return make_initial_data(spec, g);
}

}  // namespace

TEST(InitialData, ShearEigenmode) {
  const Grid g(16, 32, 4.0);
  InitialDataSpec spec;
  spec.kind = InitKind::shear_eigenmode;
  spec.target_Romega = 3.0;
  const auto s = make_initial_data(spec, g);
  const auto expect = ScalarField::sample(g, [](double, double y) { return 3.0 * std::cos(kTwoPi * y); });
  EXPECT_LE(max_abs_diff(s.omega, expect), 1e-14);
  const auto u = velocity(s);
  const auto u1 = ScalarField::sample(g, [](double, double y) { return -3.0 / kTwoPi * std::sin(kTwoPi * y); });
  EXPECT_LE(max_abs_diff(u.u1, u1), 1e-14);
  EXPECT_LE(sup_norm(u.u2), 1e-14);
  EXPECT_NEAR(s.m0_norm, 3.0, 1e-14);
}

TEST(InitialData, VerticalShear) {
  const double L = 8.0;
  const Grid g(32, 16, L);
  InitialDataSpec spec;
  spec.kind = InitKind::vertical_shear;
  const auto s = make_initial_data(spec, g);
  const auto u = velocity(s);
  const auto u2 = ScalarField::sample(g, [&](double x, double) { return std::sin(kTwoPi * x / L); });
  EXPECT_LE(max_abs_diff(u.u2, u2), 1e-14);
  EXPECT_LE(sup_norm(u.u1), 1e-14);
  EXPECT_NEAR(s.m0_norm, kTwoPi / L, 1e-14);
}

TEST(InitialData, RandomIsReproducibleAndHitsTargets) {
  const Grid g(128, 32, 16.0);
  const auto a = random_state(g, 5, 6.0, 8.0);
  const auto b = random_state(g, 5, 6.0, 8.0);
  for (std::size_t k = 0; k < a.omega.coeffs().size(); ++k)
    EXPECT_EQ(a.omega.coeffs()[k], b.omega.coeffs()[k]);
  EXPECT_NEAR(sup_norm(to_physical(a.omega)), 8.0, 1e-12);
  EXPECT_NEAR(sup_norm(velocity(a)) / 6.0, 1.0, 0.05);
  const auto u = velocity(a);
  EXPECT_LE(sup_norm(to_physical(divergence(u))), 1e-12 * 8.0);
  EXPECT_NEAR(mean(u.u1), 0.0, 1e-14);
  EXPECT_LE(profile_sup(vertical_average(u.u1)), 1e-13);
  // n = 0 slice carries a zero-mean d1 m.
  EXPECT_EQ(a.omega.coeff(0, 0), Complex(0.0));
}

TEST(InitialData, UnreachableTargets) {
  const Grid g(64, 32, 16.0);
  InitialDataSpec spec;
  spec.kind = InitKind::random_bandlimited;
  spec.target_Romega = 0.0;
  spec.target_Ru = 1.0;
  EXPECT_THROW(make_initial_data(spec, g), Error);
  spec.kind = InitKind::shear_eigenmode;
  EXPECT_THROW(make_initial_data(spec, g), Error);
  spec.target_Romega = kTwoPi * 10;  // induces |u| = 10
  spec.target_Ru = 1.0;
  EXPECT_THROW(make_initial_data(spec, g), Error);
  spec.target_Ru = 12.0;
  const auto s = make_initial_data(spec, g);
  EXPECT_NEAR(sup_norm(velocity(s)), 12.0, 1e-9);
}

TEST(Cfl, ZeroVelocityGivesAccuracyCap) {
  const Grid g(16, 16, 4.0);
  FlowState s{0.0, ScalarField::spectral(g), 0.0, 0.0, 0.0};
  EXPECT_EQ(cfl_dt(s, 0.5), 1e-3);
  EXPECT_EQ(cfl_dt(s, 0.5, 2e-3), 2e-3);
}

TEST(Cfl, AdvectionLimitedFormulaAndLinearity) {
  const Grid g(64, 64, 1.0);
  InitialDataSpec spec;
  spec.kind = InitKind::shear_eigenmode;
  spec.target_Romega = 10.0 * kTwoPi;
  const auto s = make_initial_data(spec, g);
  EXPECT_NEAR(cfl_dt(s, 0.5), std::min(0.5 / 640.0, 1e-3), 1e-15);
  EXPECT_NEAR(cfl_dt(s, 0.25), 0.5 * cfl_dt(s, 0.5), 1e-16);
  EXPECT_THROW(cfl_dt(s, 0.0), Error);
}

TEST(Step, ShearEigenmodeDecaysExactly) {
  const Grid g(64, 64, 16.0);
  InitialDataSpec spec;
  spec.kind = InitKind::shear_eigenmode;
  auto s = make_initial_data(spec, g);
  RunOptions opt;
  opt.fixed_dt = 1e-3;
  s = run(s, 0.1, {}, {}, opt);
  EXPECT_NEAR(s.t, 0.1, 1e-15);
  const double decay = std::exp(-4 * kPi * kPi * 0.1);
  const auto expect = ScalarField::sample(g, [&](double, double y) { return decay * std::cos(kTwoPi * y); });
  EXPECT_LE(max_abs_diff(s.omega, expect), 1e-8 * decay);
}

TEST(Step, VerticalShearDecaysExactly) {
  const double L = 16.0;
  const Grid g(64, 64, L);
  InitialDataSpec spec;
  spec.kind = InitKind::vertical_shear;
  auto s = make_initial_data(spec, g);
  const double k = kTwoPi / L;
  RunOptions opt;
  opt.fixed_dt = 1e-3;
  s = run(s, 0.1, {}, {}, opt);
  const double decay = std::exp(-k * k * 0.1);
  const auto expect = ScalarField::sample(g, [&](double x, double) { return decay * k * std::cos(k * x); });
  EXPECT_LE(max_abs_diff(s.omega, expect), 1e-8 * decay * k);
}

TEST(Step, UniformFlowIsSteady) {
  const Grid g(16, 16, 4.0);
  FlowState s{0.0, ScalarField::spectral(g), 2.0, 0.0, 0.0};
  const auto s1 = step(s, 1e-3);
  EXPECT_DOUBLE_EQ(s1.t, 1e-3);
  EXPECT_EQ(sup_norm(to_physical(s1.omega)), 0.0);
  EXPECT_EQ(s1.c, 2.0);
}

TEST(Step, FourthOrderInTime) {
  const Grid g(64, 32, 8.0);
  const auto s0 = random_state(g, 3, 4.0, 6.0);
  auto evolve = [&](double dt) {
    RunOptions opt;
    opt.fixed_dt = dt;
    return run(s0, 0.05, {}, {}, opt).omega;
  };
  const auto ref = evolve(0.05 / 160);
  const double e1 = max_abs_diff(evolve(0.05 / 10), ref);
  const double e2 = max_abs_diff(evolve(0.05 / 20), ref);
  EXPECT_GE(e1 / e2, 12.0);
}

TEST(Step, InstabilitySentinel) {
  const Grid g(32, 32, 4.0);
  InitialDataSpec spec;
  spec.kind = InitKind::random_bandlimited;
  spec.target_Romega = 1e5;
  auto s = make_initial_data(spec, g);
  EXPECT_THROW(
      {
        for (int i = 0; i < 50; ++i) s = step(s, 0.01);
      },
      Error);
}

TEST(Run, NoStepsWhenAlreadyAtEnd) {
  const Grid g(16, 16, 4.0);
  InitialDataSpec spec;
  const auto s = make_initial_data(spec, g);
  int records = 0;
  const auto out = run(s, 0.0, {}, [&](const FlowState&) { ++records; });
  EXPECT_EQ(records, 0);
  EXPECT_EQ(out.t, 0.0);
}

TEST(Run, LandsOnDiagnosticTimes) {
  const Grid g(16, 32, 4.0);
  InitialDataSpec spec;
  spec.target_Romega = 2.0;
  const auto s = make_initial_data(spec, g);
  std::vector<double> seen;
  double recorded = 0.0;
  run(s, 0.2, {0.03, 0.1, 0.2}, [&](const FlowState& st) {
    seen.push_back(st.t);
    if (st.t == 0.1) recorded = sup_norm(to_physical(st.omega));
  });
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen[0], 0.03);
  EXPECT_EQ(seen[1], 0.1);
  EXPECT_EQ(seen[2], 0.2);
  EXPECT_NEAR(recorded / (2.0 * std::exp(-4 * kPi * kPi * 0.1)), 1.0, 1e-8);
}

TEST(Run, RejectsBadSchedules) {
  const Grid g(16, 16, 4.0);
  const auto s = make_initial_data(InitialDataSpec{}, g);
  EXPECT_THROW(run(s, 1.0, {0.5, 0.4}, {}), Error);
  EXPECT_THROW(run(s, 1.0, {2.0}, {}), Error);
  EXPECT_THROW(run(s, -1.0, {}, {}), Error);
}

TEST(Run, DeterministicTrajectories) {
  const Grid g(64, 32, 8.0);
  const auto s0 = random_state(g, 7, 3.0, 5.0);
  const auto a = run(s0, 0.05, {}, {});
  const auto b = run(s0, 0.05, {}, {});
  for (std::size_t k = 0; k < a.omega.coeffs().size(); ++k)
    ASSERT_EQ(a.omega.coeffs()[k], b.omega.coeffs()[k]);
}

TEST(Invariants, EnergyMaxPrincipleAndMeanFlow) {
  const Grid g(128, 32, 16.0);
  const auto s0 = random_state(g, 2, 5.0, 8.0);
  const double w0 = s0.m0_norm;
  int violations = 0;
  run(s0, 0.3, {}, {}, RunOptions{}, [&](const FlowState& a, const FlowState& b) {
    if (sup_norm(to_physical(b.omega)) > sup_norm(to_physical(a.omega)) + 1e-8 * w0) ++violations;
    if (total_energy(b) > total_energy(a) * (1 + 1e-14)) ++violations;
    if (b.m_mean != s0.m_mean) ++violations;
    if (std::abs(b.omega.coeff(0, 0)) > 1e-14 * w0) ++violations;
  });
  EXPECT_EQ(violations, 0);
}

TEST(Invariants, EnergyDecrementMatchesDissipation) {
  const Grid g(64, 32, 8.0);
  const auto s0 = random_state(g, 4, 3.0, 5.0);
  const double dt = 1e-4;
  const auto s1 = step(s0, dt);
  const auto u = velocity(s0);
  double grad2 = 0.0;
  for (const auto* c : {&u.u1, &u.u2})
    for (int axis : {1, 2}) grad2 += parseval_energy(spectral_derivative(*c, axis, 1));
  const double drop = (total_energy(s0) - total_energy(s1)) / dt;
  EXPECT_NEAR(drop / (2 * grad2), 1.0, 1e-2);
}

TEST(Invariants, MeanFlowEquationResidual) {
  const Grid g(64, 32, 8.0);
  auto s0 = random_state(g, 6, 3.0, 5.0);
  s0.c = 0.4;
  const double r1 = mean_flow_residual(s0, 1e-4);
  const double r2 = mean_flow_residual(s0, 5e-5);
  EXPECT_LT(r2, 1e-6);
  EXPECT_GT(r1 / r2, 3.5);
}
