#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "nscyl/spectral.hpp"

namespace nscyl::detail {

// Right-hand side of the transport part: (omega_hat, t) -> spectral tendency.
using Tendency = std::function<ScalarField(const ScalarField&, double)>;

inline double spectral_l2(const ScalarField& s) { return std::sqrt(parseval_energy(s)); }

// Lawson integrating-factor RK4 for d_t w = lap w + N(w, t); the heat
// semigroup is applied exactly. Throws ErrorCode::numerical when the L2 norm
// grows more than tenfold or a coefficient stops being finite.
inline ScalarField if_rk4_step(const ScalarField& w0, double t, double dt,
                               const Tendency& N) {
  const Grid& g = w0.grid();
  const std::size_t size = g.spectral_size();
  std::vector<double> E(size), Eh(size);
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) {
      const double k2 = g.k_squared(i, n);
      E[g.sidx(i, n)] = std::exp(-k2 * dt);
      Eh[g.sidx(i, n)] = std::exp(-0.5 * k2 * dt);
    }

  const auto c0 = w0.coeffs();
  const ScalarField k1 = N(w0, t);
  ScalarField wa = ScalarField::spectral(g);
  {
    auto a = wa.coeffs();
    const auto f = k1.coeffs();
    for (std::size_t k = 0; k < size; ++k) a[k] = Eh[k] * (c0[k] + 0.5 * dt * f[k]);
  }
  const ScalarField k2 = N(wa, t + 0.5 * dt);
  ScalarField wb = ScalarField::spectral(g);
  {
    auto b = wb.coeffs();
    const auto f = k2.coeffs();
    for (std::size_t k = 0; k < size; ++k) b[k] = Eh[k] * c0[k] + 0.5 * dt * f[k];
  }
  const ScalarField k3 = N(wb, t + 0.5 * dt);
  ScalarField wc = ScalarField::spectral(g);
  {
    auto c = wc.coeffs();
    const auto f = k3.coeffs();
    for (std::size_t k = 0; k < size; ++k) c[k] = E[k] * c0[k] + dt * Eh[k] * f[k];
  }
  const ScalarField k4 = N(wc, t + dt);

  ScalarField out = ScalarField::spectral(g);
  auto o = out.coeffs();
  const auto f1 = k1.coeffs(), f2 = k2.coeffs(), f3 = k3.coeffs(), f4 = k4.coeffs();
  bool finite = true;
  for (std::size_t k = 0; k < size; ++k) {
    o[k] = E[k] * c0[k] +
           dt / 6.0 * (E[k] * f1[k] + 2.0 * Eh[k] * (f2[k] + f3[k]) + f4[k]);
    finite = finite && std::isfinite(o[k].real()) && std::isfinite(o[k].imag());
  }
  const double before = spectral_l2(w0);
  const double after = spectral_l2(out);
  if (!finite || (after > 10.0 * before && after > 0.0))
    fail(ErrorCode::numerical, "instability detected: norm grew from " +
                                   std::to_string(before) + " to " +
                                   std::to_string(after) + " in one step");
  return out;
}

}  // namespace nscyl::detail
