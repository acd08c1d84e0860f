#include "nscyl/biot_savart.hpp"

#include <algorithm>
#include <cmath>

namespace nscyl {

namespace {

void check_kernel_point(double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2))
    fail(ErrorCode::invalid_argument, "kernel argument is not finite");
  if (x1 == 0.0 && x2 == std::round(x2))
    fail(ErrorCode::domain, "kernel is singular at lattice points (0, n)");
}

}  // namespace

double kernel_K(double x1, double x2) {
  check_kernel_point(x1, x2);
  if (std::abs(x1) <= 5.0) {
    const double s = std::sinh(kPi * x1);
    const double t = std::sin(kPi * x2);
    return std::log(4.0 * (s * s + t * t)) / (4.0 * kPi);
  }
  const double a = kTwoPi * std::abs(x1);
  const double ea = std::exp(-a);
  return (a + std::log1p(ea * ea - 2.0 * std::cos(kTwoPi * x2) * ea)) / (4.0 * kPi);
}

std::array<double, 2> kernel_grad(double x1, double x2) {
  check_kernel_point(x1, x2);
  const double a = kTwoPi * x1;
  const double b = kTwoPi * x2;
  if (std::abs(x1) <= 5.0) {
    const double s = std::sinh(0.5 * a);
    const double t = std::sin(0.5 * b);
    const double den = 4.0 * (s * s + t * t);
    return {std::sinh(a) / den, std::sin(b) / den};
  }
  const double ea = std::exp(-std::abs(a));
  const double den = 1.0 + ea * ea - 2.0 * std::cos(b) * ea;
  const double sign = a > 0 ? 1.0 : -1.0;
  return {sign * 0.5 * (1.0 - ea * ea) / den, std::sin(b) * ea / den};
}

std::array<double, 2> kernel_perp_grad(double x1, double x2) {
  const auto g = kernel_grad(x1, x2);
  return {-g[1], g[0]};
}

ScalarField oscillating_part(const ScalarField& omega) {
  ScalarField s = as_spectral(omega);
  const Grid& g = s.grid();
  auto c = s.coeffs();
  for (int i = 0; i < g.nx(); ++i) c[g.sidx(i, 0)] = 0.0;
  return s;
}

VelocityField velocity_from_vorticity(const ScalarField& omega_osc) {
  const ScalarField w = as_spectral(omega_osc);
  const Grid& g = w.grid();
  const auto wc = w.coeffs();
  double slice = 0.0, all = 0.0;
  for (int i = 0; i < g.nx(); ++i) slice = std::max(slice, std::abs(wc[g.sidx(i, 0)]));
  for (const auto& v : wc) all = std::max(all, std::abs(v));
  if (slice > 1e-12 * all && slice > 0.0)
    fail(ErrorCode::invalid_argument,
         "vorticity has a nonzero vertical average; the oscillating velocity "
         "cannot carry it");

  VelocityField u{ScalarField::spectral(g), ScalarField::spectral(g)};
  auto u1 = u.u1.coeffs();
  auto u2 = u.u2.coeffs();
  const Complex I(0.0, 1.0);
  for (int i = 0; i < g.nx(); ++i) {
    for (int n = 1; n < g.nky(); ++n) {
      const std::size_t k = g.sidx(i, n);
      const double inv = 1.0 / g.k_squared(i, n);
      u1[k] = g.nyquist_col(n) ? Complex{} : I * g.k2(n) * inv * wc[k];
      u2[k] = g.nyquist_row(i) ? Complex{} : -I * g.k1(i) * inv * wc[k];
    }
  }
  return u;
}

Profile mean_flow_from_vorticity(const ScalarField& omega, double m_mean) {
  const ScalarField w = as_spectral(omega);
  const Grid& g = w.grid();
  std::vector<Complex> mh(static_cast<std::size_t>(g.nx() / 2 + 1));
  mh[0] = m_mean;
  for (int i = 1; i <= g.nx() / 2; ++i) {
    if (g.nyquist_row(i)) continue;
    mh[static_cast<std::size_t>(i)] = w.coeff(i, 0) / Complex(0.0, g.k1(i));
  }
  return profile_from_spectrum(g, mh);
}

VelocityField velocity_from_state(const ScalarField& omega, double c, double m_mean) {
  const ScalarField w = as_spectral(omega);
  const Grid& g = w.grid();
  VelocityField u = velocity_from_vorticity(oscillating_part(w));
  auto u1 = u.u1.coeffs();
  auto u2 = u.u2.coeffs();
  u1[g.sidx(0, 0)] = c;
  u2[g.sidx(0, 0)] = m_mean;
  for (int i = 1; i < g.nx(); ++i) {
    if (g.nyquist_row(i)) continue;
    u2[g.sidx(i, 0)] = w.coeff(i, 0) / Complex(0.0, g.k1(i));
  }
  return u;
}

Decomposition decompose(const VelocityField& u, double tol) {
  require(u.u1.grid() == u.u2.grid(), "velocity components on different grids");
  const Grid& g = u.u1.grid();
  ScalarField u1 = as_spectral(u.u1);
  ScalarField u2 = as_spectral(u.u2);
  const double c = u1.coeff(0, 0).real();

  double drift = 0.0;
  for (int i = 1; i < g.nx(); ++i) drift = std::max(drift, std::abs(u1.coeff(i, 0)));
  const double scale = sup_norm(u);
  if (drift > tol * scale && drift > 0.0)
    fail(ErrorCode::invalid_argument,
         "vertical average of u1 is not constant in x1; input is not divergence-free");

  Profile m = vertical_average(u2);
  for (int i = 0; i < g.nx(); ++i) {
    u1.coeffs()[g.sidx(i, 0)] = 0.0;
    u2.coeffs()[g.sidx(i, 0)] = 0.0;
  }
  return {c, std::move(m), {std::move(u1), std::move(u2)}};
}

VelocityField reassemble(const Decomposition& d) {
  const Grid& g = d.m.grid();
  VelocityField u = as_spectral(d.u_hat);
  const auto mh = profile_spectrum(d.m);
  u.u1.coeffs()[g.sidx(0, 0)] += d.c;
  for (int i = 0; i <= g.nx() / 2; ++i) {
    u.u2.coeffs()[g.sidx(i, 0)] += mh[static_cast<std::size_t>(i)];
    if (i > 0 && i < g.nx() / 2)
      u.u2.coeffs()[g.sidx(g.nx() - i, 0)] += std::conj(mh[static_cast<std::size_t>(i)]);
  }
  return u;
}

ScalarField pressure_from_state(const VelocityField& u, const ScalarField& omega) {
  const Grid& g = u.u1.grid();
  const ScalarField a = padded_product(u.u1, u.u1);
  const ScalarField b = padded_product(omega, u.u1);
  ScalarField p = ScalarField::spectral(g);
  auto pc = p.coeffs();
  const Complex I(0.0, 1.0);
  for (int i = 0; i < g.nx(); ++i) {
    for (int n = 0; n < g.nky(); ++n) {
      if (i == 0 && n == 0) continue;
      const std::size_t k = g.sidx(i, n);
      const Complex flux = g.nyquist_col(n) ? Complex{} : I * g.k2(n) * b.coeffs()[k];
      pc[k] = -a.coeffs()[k] + 2.0 * flux / g.k_squared(i, n);
    }
  }
  return to_physical(p);
}

double divergence_identity_residual(const VelocityField& u) {
  const ScalarField u11 = padded_product(u.u1, u.u1);
  const ScalarField u12 = padded_product(u.u1, u.u2);
  const ScalarField u22 = padded_product(u.u2, u.u2);
  const ScalarField omega = curl(u);
  const ScalarField wu1 = padded_product(omega, u.u1);

  const ScalarField t11 = spectral_derivative(u11, 1, 2);
  const ScalarField t12 = 2.0 * spectral_derivative(spectral_derivative(u12, 1, 1), 2, 1);
  const ScalarField t22 = spectral_derivative(u22, 2, 2);
  const ScalarField lhs = t11 + t12 + t22;
  const ScalarField rhs = laplacian(u11) + 2.0 * spectral_derivative(wu1, 2, 1);

  const double scale = std::sqrt(parseval_energy(t11)) + std::sqrt(parseval_energy(t12)) +
                       std::sqrt(parseval_energy(t22));
  if (scale == 0.0) return 0.0;
  return std::sqrt(parseval_energy(lhs - rhs)) / scale;
}

}  // namespace nscyl
