#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nscyl/biot_savart.hpp"

namespace nscyl {

struct FlowState {
  double t = 0.0;
  ScalarField omega;  // spectral, full vorticity
  double c = 0.0;
  double m_mean = 0.0;
  double m0_norm = 0.0;

  const Grid& grid() const noexcept { return omega.grid(); }
};

/// Full velocity (c + u_hat1, m + u_hat2) of a state (spectral).
VelocityField velocity(const FlowState& s);
/// Mean vertical speed m(x1).
Profile mean_flow(const FlowState& s);
/// Integral of |u|^2 over the box.
double total_energy(const FlowState& s);

enum class InitKind { shear_eigenmode, vertical_shear, random_bandlimited, laminar_small };

std::string to_string(InitKind k);
InitKind init_kind_from_string(const std::string& s);

struct InitialDataSpec {
  InitKind kind = InitKind::shear_eigenmode;
  std::uint64_t seed = 1;
  /// Unset means the kind's natural value.
  std::optional<double> target_Ru;
  std::optional<double> target_Romega;
  /// Largest excited vertical mode index.
  int band = 2;
  double c = 0.0;
};

/// Builds divergence-free initial data. sup|omega| matches target_Romega
/// exactly; sup|u| is matched within 5% (or an error is raised).
FlowState make_initial_data(const InitialDataSpec& spec, const Grid& grid);

/// min(safety * min(dx/|u1|_inf, dy/|u2|_inf), dt_acc).
double cfl_dt(const FlowState& s, double safety, double dt_acc = 1e-3);

/// One Lawson IF-RK4 step of the vorticity equation.
FlowState step(const FlowState& s, double dt);

struct RunOptions {
  double safety = 0.5;
  double dt_acc = 1e-3;
  /// When set, every step uses this dt (still clipped to diagnostic times).
  std::optional<double> fixed_dt;
};

using StateSink = std::function<void(const FlowState&)>;
using StepObserver = std::function<void(const FlowState& before, const FlowState& after)>;

/// Advances to t_end, landing exactly on every diagnostic time and handing
/// the state at each one to sink.
FlowState run(const FlowState& s0, double t_end, const std::vector<double>& diag_times,
              const StateSink& sink, const RunOptions& opt = {},
              const StepObserver& observer = {});

/// Relative residual of d_t m + c d_1 m + d_1 <u_hat1 u_hat2> - d_1^2 m at
/// s advanced by dt, using a centered difference over two steps of size dt.
/// The flux is truncated to the dealiased band like the solver's tendency.
double mean_flow_residual(const FlowState& s, double dt);

}  // namespace nscyl
