#pragma once

#include <array>

#include "nscyl/spectral.hpp"

namespace nscyl {

/// K(x) = (1/4 pi) log(2 cosh(2 pi x1) - 2 cos(2 pi x2)). Throws
/// ErrorCode::domain at the lattice points x1 = 0, x2 integer.
double kernel_K(double x1, double x2);
/// (d1 K, d2 K).
std::array<double, 2> kernel_grad(double x1, double x2);
/// (-d2 K, d1 K), the velocity induced by a unit point vortex.
std::array<double, 2> kernel_perp_grad(double x1, double x2);

/// Oscillating velocity from vorticity with vanishing n = 0 slice:
/// u_hat = i (k2, -k1) omega_hat / |k|^2. Nyquist modes are dropped.
/// Result is spectral.
VelocityField velocity_from_vorticity(const ScalarField& omega_osc);

/// Copy of omega with the n = 0 slice removed.
ScalarField oscillating_part(const ScalarField& omega);

/// Mean vertical speed m(x1) recovered from the n = 0 slice of the full
/// vorticity (d1 m = <omega>) with prescribed spatial mean.
Profile mean_flow_from_vorticity(const ScalarField& omega, double m_mean);

/// Full velocity (c + u_hat1, m + u_hat2). Spectral result.
VelocityField velocity_from_state(const ScalarField& omega, double c, double m_mean);

struct Decomposition {
  double c;
  Profile m;
  VelocityField u_hat;
};

/// Splits u into (c, 0) + (0, m) + u_hat. Throws if <u1> varies in x1 by more
/// than tol relative to sup|u|.
Decomposition decompose(const VelocityField& u, double tol = 1e-9);
VelocityField reassemble(const Decomposition& d);

/// Solves -lap p = lap(u1^2) + 2 d2(omega u1) with zero domain mean.
/// Physical result.
ScalarField pressure_from_state(const VelocityField& u, const ScalarField& omega);

/// Relative L2 mismatch between div((u.grad)u) and lap(u1^2) + 2 d2(omega u1),
/// both sides evaluated with padded products. Normalized by the sum of the
/// L2 norms of the terms on the left; zero when all terms vanish.
double divergence_identity_residual(const VelocityField& u);

}  // namespace nscyl
