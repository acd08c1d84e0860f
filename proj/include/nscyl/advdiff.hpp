#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nscyl/spectral.hpp"

namespace nscyl {

enum class DriftKind { zero, steady_shear_u1, time_periodic_shear, from_snapshot };

std::string to_string(DriftKind k);
DriftKind drift_kind_from_string(const std::string& s);

/// Divergence-free drift with zero vertical average of u1.
///   steady_shear_u1:     (M sin(2 pi x2), 0)
///   time_periodic_shear: (M sin(2 pi x2) cos(Omega t), 0)
///   from_snapshot:       a frozen velocity field, M = sup|u1|
struct DriftSpec {
  DriftKind kind = DriftKind::zero;
  double M = 0.0;
  double Omega = 0.0;
  std::optional<VelocityField> field;

  static DriftSpec zero();
  static DriftSpec steady_shear(double M);
  static DriftSpec time_periodic(double M, double Omega);
  /// Validates divergence and vertical average of u1 (1e-10 relative).
  static DriftSpec from_snapshot(const VelocityField& u);
};

/// Physical drift on the grid at time t.
VelocityField drift_at(const DriftSpec& d, const Grid& g, double t);

struct AdvDiffOptions {
  /// Upper bound on the step; the advective CFL (safety 0.5) may lower it.
  double dt_max = 5e-3;
};

using FieldSink = std::function<void(double t, const ScalarField& omega)>;

/// Evolves d_t w + v . grad w = lap w from t = 0 to t_end, landing on each
/// of `times` and passing the (spectral) field to sink.
ScalarField advdiff_run(const ScalarField& omega0, const DriftSpec& drift, double t_end,
                        const std::vector<double>& times = {}, const FieldSink& sink = {},
                        const AdvDiffOptions& opt = {});

/// Same with the adjoint drift: v replaced by -v(t_end - t).
ScalarField advdiff_run_adjoint(const ScalarField& omega0, const DriftSpec& drift,
                                double t_end, const AdvDiffOptions& opt = {});

/// Unit-mass periodic Gaussian of width sigma0 centred at y.
ScalarField normalized_gaussian(const Grid& g, std::pair<double, double> y, double sigma0);

/// Approximate Gamma(., y; t, 0): the Gaussian above evolved to t.
ScalarField fundamental_solution(const DriftSpec& drift, const Grid& g,
                                 std::pair<double, double> y, double t, double sigma0,
                                 const AdvDiffOptions& opt = {});

struct LpLqReport {
  double p = 1.0, q = 1.0;
  std::vector<std::pair<double, double>> ratios;  // (t, ||w||_q V^{1/p-1/q} / ||w0||_p)
  double K1 = 0.0;                                // max ratio
};

/// p, q may be +infinity.
LpLqReport check_lp_lq(const DriftSpec& drift, const ScalarField& omega0, double p, double q,
                       const std::vector<double>& times, const AdvDiffOptions& opt = {});

struct EnvelopeFit {
  double K2_est = 0.0;
  /// Fitted slope of log sup_x2 Gamma against |x1 - y1|^2 / (4t).
  double slope = 0.0;
  /// Largest lambda the slope supports, clipped to [0, 1].
  double lambda_eff = 0.0;
  int points = 0;
  bool pass = false;
};

/// pass iff slope <= -lambda / (1 + M^2) and K2_est is finite.
EnvelopeFit check_gaussian_envelope(const ScalarField& gamma, std::pair<double, double> y,
                                    double t, double M, double lambda);

/// |<S f, g> - <f, S* g>| / (||f|| ||g||) over [0, T].
double duality_defect(const DriftSpec& drift, const ScalarField& f, const ScalarField& g,
                      double T, const AdvDiffOptions& opt = {});

}  // namespace nscyl
