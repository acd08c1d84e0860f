#include <gtest/gtest.h>

#include <cmath>

#include "nscyl/spectral.hpp"

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

}  // namespace

TEST(Grid, WavenumberTables) {
  const Grid g = make_grid(64, 64, 16.0);
  EXPECT_DOUBLE_EQ(g.k1(0), 0.0);
  EXPECT_DOUBLE_EQ(g.k2(0), 0.0);
  EXPECT_NEAR(g.k1(1), 2 * kPi / 16.0, 1e-15);
  EXPECT_NEAR(g.k1(63), -2 * kPi / 16.0, 1e-15);
  EXPECT_NEAR(g.k1(32), 2 * kPi * 32 / 16.0, 1e-12);
  EXPECT_NEAR(g.k2(1), 2 * kPi, 1e-15);
  EXPECT_DOUBLE_EQ(g.dx(), 0.25);
  EXPECT_DOUBLE_EQ(g.dy(), 1.0 / 64);
}

TEST(Grid, MinimalAndInvalid) {
  EXPECT_NO_THROW(make_grid(8, 8, 1.0));
  EXPECT_THROW(make_grid(7, 8, 1.0), Error);
  EXPECT_THROW(make_grid(8, 6, 1.0), Error);
  EXPECT_THROW(make_grid(8, 8, 0.0), Error);
  EXPECT_THROW(make_grid(8, 8, -2.0), Error);
}

TEST(Transforms, ConstantHasSingleMode) {
  const Grid g(16, 16, 4.0);
  const auto f = to_spectral(ScalarField::sample(g, [](double, double) { return 3.0; }));
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) {
      const double expect = (i == 0 && n == 0) ? 3.0 : 0.0;
      EXPECT_NEAR(std::abs(f.coeff(i, n) - expect), 0.0, 1e-14);
    }
}

TEST(Transforms, VerticalCosineOnlyAtFirstMode) {
  const Grid g(16, 32, 4.0);
  const auto f = to_spectral(
      ScalarField::sample(g, [](double, double y) { return std::cos(kTwoPi * y); }));
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) {
      const double expect = (i == 0 && n == 1) ? 0.5 : 0.0;
      EXPECT_NEAR(std::abs(f.coeff(i, n) - expect), 0.0, 1e-14);
    }
}

TEST(Transforms, RoundTripRandomBandlimited) {
  const Grid g(64, 32, 16.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = random_bandlimited(g, seed, 20, 10, false);
    const auto p = to_physical(s);
    const auto back = to_physical(to_spectral(p));
    const double scale = sup_norm(p);
    EXPECT_LE(max_abs_diff(p, back), 1e-12 * scale);
    const auto s2 = to_spectral(p);
    double d = 0.0, c = 0.0;
    for (std::size_t k = 0; k < s.coeffs().size(); ++k) {
      d = std::max(d, std::abs(s.coeffs()[k] - s2.coeffs()[k]));
      c = std::max(c, std::abs(s.coeffs()[k]));
    }
    EXPECT_LE(d, 1e-12 * c);
  }
}

TEST(Transforms, WrongRepresentationIsAnError) {
  const Grid g(8, 8, 1.0);
  const auto p = ScalarField::physical(g);
  EXPECT_THROW(to_physical(p), Error);
  EXPECT_THROW(to_spectral(to_spectral(p)), Error);
}

TEST(Transforms, ParsevalMatchesQuadrature) {
  const Grid g(48, 32, 8.0);
  const auto f = to_physical(random_bandlimited(g, 7, 15, 10, false));
  double quad = 0.0;
  for (double v : f.values()) quad += v * v;
  quad *= g.cell_area();
  EXPECT_NEAR(parseval_energy(f) / quad, 1.0, 1e-12);
}

TEST(Transforms, GridIndependentRandomDraw) {
  const Grid a(32, 16, 8.0), b(64, 32, 8.0);
  const auto fa = to_physical(random_bandlimited(a, 11, 5, 4, false));
  const auto fb = to_physical(random_bandlimited(b, 11, 5, 4, false));
  for (int i = 0; i < a.nx(); ++i)
    for (int j = 0; j < a.ny(); ++j)
      EXPECT_NEAR(fa.value(i, j), fb.value(2 * i, 2 * j), 1e-12);
}

TEST(Derivative, VerticalSine) {
  const Grid g(16, 32, 4.0);
  const auto f = ScalarField::sample(g, [](double, double y) { return std::sin(kTwoPi * y); });
  const auto expect =
      ScalarField::sample(g, [](double, double y) { return kTwoPi * std::cos(kTwoPi * y); });
  const auto d = spectral_derivative(f, 2, 1);
  EXPECT_TRUE(d.is_physical());
  EXPECT_LE(max_abs_diff(d, expect), 1e-12 * kTwoPi);
}

TEST(Derivative, HorizontalCosineSecondOrder) {
  const double L = 16.0;
  const Grid g(64, 16, L);
  const double k = kTwoPi / L;
  const auto f = ScalarField::sample(g, [&](double x, double) { return std::cos(k * x); });
  const auto expect =
      ScalarField::sample(g, [&](double x, double) { return -k * k * std::cos(k * x); });
  EXPECT_LE(max_abs_diff(spectral_derivative(f, 1, 2), expect), 1e-13);
  EXPECT_LE(max_abs_diff(laplacian(f), expect), 1e-13);
}

TEST(Derivative, ConstantVanishes) {
  const Grid g(16, 16, 4.0);
  const auto f = ScalarField::sample(g, [](double, double) { return 2.5; });
  for (int axis : {1, 2})
    for (int order : {1, 2, 3})
      EXPECT_LE(sup_norm(spectral_derivative(f, axis, order)), 1e-13);
}

TEST(Derivative, OddOrderZeroesNyquist) {
  const Grid g(16, 16, 4.0);
  auto f = ScalarField::spectral(g);
  f.coeffs()[g.sidx(g.nx() / 2, 0)] = 1.0;
  f.coeffs()[g.sidx(0, g.ny() / 2)] = 1.0;
  EXPECT_EQ(std::abs(spectral_derivative(f, 1, 1).coeff(g.nx() / 2, 0)), 0.0);
  EXPECT_EQ(std::abs(spectral_derivative(f, 2, 1).coeff(0, g.ny() / 2)), 0.0);
  EXPECT_GT(std::abs(spectral_derivative(f, 1, 2).coeff(g.nx() / 2, 0)), 0.0);
}

TEST(Derivative, CommutesWithVerticalAverage) {
  const Grid g(64, 32, 16.0);
  const auto f = to_physical(random_bandlimited(g, 5, 20, 10, false));
  const auto a = vertical_average(spectral_derivative(f, 1, 1));
  const auto b = profile_derivative(vertical_average(f), 1);
  const double scale = profile_sup(b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * scale);
}

TEST(Dealias, KeepsBandAndIsIdempotent) {
  const Grid g(48, 24, 8.0);
  const auto f = random_bandlimited(g, 3, dealias_max_j(g), dealias_max_n(g), false);
  const auto d = dealias(f);
  for (std::size_t k = 0; k < f.coeffs().size(); ++k)
    EXPECT_EQ(f.coeffs()[k], d.coeffs()[k]);
  const auto wide = random_bandlimited(g, 4, 23, 11, false);
  const auto once = dealias(wide);
  const auto twice = dealias(once);
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) {
      EXPECT_EQ(once.coeff(i, n), twice.coeff(i, n));
      if (in_dealiased_band(g, i, n))
        EXPECT_EQ(once.coeff(i, n), wide.coeff(i, n));
      else
        EXPECT_EQ(once.coeff(i, n), Complex(0.0));
    }
}

TEST(Dealias, NyquistModeRemoved) {
  const Grid g(16, 16, 4.0);
  const auto f = ScalarField::sample(g, [&](double x, double) {
    return std::cos(kTwoPi * 8 * x / 4.0);
  });
  EXPECT_LE(sup_norm(to_physical(dealias(f))), 1e-14);
}

TEST(VerticalAverage, MeanZeroModeVanishes) {
  const Grid g(16, 16, 4.0);
  const auto f = ScalarField::sample(g, [](double, double y) { return std::cos(kTwoPi * y); });
  EXPECT_LE(profile_sup(vertical_average(f)), 1e-15);
}

TEST(VerticalAverage, IdentityOnHorizontalFunctions) {
  const double L = 8.0;
  const Grid g(32, 16, L);
  auto gfun = [&](double x) { return std::sin(kTwoPi * x / L) + 0.3 * std::cos(2 * kTwoPi * x / L); };
  const auto f = ScalarField::sample(g, [&](double x, double) { return gfun(x); });
  const auto p = vertical_average(f);
  for (int i = 0; i < g.nx(); ++i) EXPECT_NEAR(p[i], gfun(g.x1(i)), 1e-14);
}

TEST(VerticalAverage, MatchesFineQuadrature) {
  const double L = 8.0;
  const Grid g(32, 16, L);
  auto gfun = [&](double x) { return std::exp(std::sin(kTwoPi * x / L)); };
  auto hfun = [&](double x) { return std::cos(kTwoPi * x / L); };
  const auto f = ScalarField::sample(g, [&](double x, double y) {
    return gfun(x) + std::cos(kTwoPi * y) * hfun(x);
  });
  const auto p = vertical_average(f);
  for (int i = 0; i < g.nx(); ++i) {
    const double x = g.x1(i);
    // Independent midpoint quadrature in x2 with 4000 points.
    double q = 0.0;
    const int N = 4000;
    for (int k = 0; k < N; ++k) {
      const double y = (k + 0.5) / N;
      q += gfun(x) + std::cos(kTwoPi * y) * hfun(x);
    }
    EXPECT_NEAR(p[i], q / N, 1e-12);
  }
}

TEST(PaddedProduct, ExactOnDealiasedFactors) {
  const Grid g(24, 24, 6.0);
  const auto a = random_bandlimited(g, 1, 3, 3, false);
  const auto b = random_bandlimited(g, 2, 3, 3, false);
  // Product of band-3 fields has band 6 < nx/2, so the plain product is exact too.
  const auto plain = to_spectral(pointwise_product(a, b));
  const auto padded = padded_product(a, b);
  for (std::size_t k = 0; k < plain.coeffs().size(); ++k)
    EXPECT_NEAR(std::abs(plain.coeffs()[k] - padded.coeffs()[k]), 0.0, 1e-13);
}

TEST(PaddedProduct, RemovesAliasing) {
  const double L = 4.0;
  const Grid g(16, 16, L);
  const int jmax = dealias_max_j(g);
  const double k = kTwoPi * jmax / L;
  const auto f = ScalarField::sample(g, [&](double x, double) { return std::cos(k * x); });
  // cos^2 = 1/2 + cos(2kx)/2; mode 2*jmax > nx/2 must be dropped, not aliased.
  const auto p = padded_product(f, f);
  EXPECT_NEAR(p.coeff(0, 0).real(), 0.5, 1e-14);
  for (int i = 1; i < g.nx(); ++i) EXPECT_NEAR(std::abs(p.coeff(i, 0)), 0.0, 1e-14);
}

TEST(Norms, LpOfConstant) {
  const Grid g(16, 16, 4.0);
  const auto f = ScalarField::sample(g, [](double, double) { return -2.0; });
  EXPECT_NEAR(lp_norm(f, 1.0), 8.0, 1e-13);
  EXPECT_NEAR(l2_norm(f), std::sqrt(16.0), 1e-13);
  EXPECT_NEAR(lp_norm(f, 3.0), std::cbrt(32.0), 1e-12);
  EXPECT_NEAR(sup_norm(f), 2.0, 0.0);
  EXPECT_NEAR(integral(f), -8.0, 1e-13);
  EXPECT_NEAR(integral(to_spectral(f)), -8.0, 1e-13);
}
