#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nscyl/solver.hpp"

namespace nscyl {

struct SupNorms {
  double sup_u = 0.0;
  double sup_omega = 0.0;
  double sup_uhat = 0.0;
  double Ru_t = 0.0;
  double Romega_t = 0.0;
};

SupNorms sup_norms_and_reynolds(const FlowState& s);

/// min(t, sqrt(t)).
double v_volume(double t);

// Vertical averages below are grid quadratures over x2, so the
// Cauchy-Schwarz and Poincare type bounds between them hold literally.

struct EnergyProfiles {
  Profile e, h, d, f;
};
struct EnstrophyProfiles {
  Profile eps, zeta, delta, phi;
};
struct OscillatoryProfiles {
  Profile e_hat, h_hat, d_hat, f_hat, g_hat;
};

/// e = <|u|^2>/2 + M^2/2 with M = s.m0_norm; h = <(p + |u|^2/2) u1>;
/// d = <|grad u|^2>; f = d1 e - h with d1 e = <u . d1 u>.
EnergyProfiles energy_profiles(const FlowState& s);
/// eps = <omega^2>/2; zeta = <omega^2 u1>/2; delta = <|grad omega|^2>;
/// phi = d1 eps - zeta.
EnstrophyProfiles enstrophy_profiles(const FlowState& s);
/// Same construction for the oscillating part, plus g_hat = (d1 m) <u_hat1 u_hat2>.
OscillatoryProfiles oscillatory_profiles(const FlowState& s);

/// Integral of chi(x1) p(x1) with chi = exp(-rho dist(x1, a)) on the
/// periodic box, evaluated exactly on the trigonometric interpolant of p.
double localized_integral(const Profile& p, double rho, double a);

struct LocalizedSums {
  double E_rho = 0.0, D_rho = 0.0, Ens_rho = 0.0, EnsD_rho = 0.0;
};
LocalizedSums localized_sums(const EnergyProfiles& en, const EnstrophyProfiles& ens,
                             double rho, double a);

/// Abscissa of the maximum of a profile (first one on ties).
double argmax_x1(const Profile& p);

struct BalanceResiduals {
  double energy = 0.0, enstrophy = 0.0, oscillatory = 0.0;
};

/// L2(x1) norms of d_t e - d1 f + d, d_t eps - d1 phi + delta and
/// d_t e_hat + c d1 e_hat - d1 f_hat + d_hat + g_hat at each interior snapshot, using
/// centered differences. Snapshots must be equally spaced.
std::vector<BalanceResiduals> balance_residuals(const std::vector<FlowState>& traj);
/// Residuals at s advanced by probe_dt, from two probe steps.
BalanceResiduals probe_balance_residuals(const FlowState& s, double probe_dt);

/// sqrt(sup_a integral over [a-1, a+1] x T of |u_hat|^2), sup over grid points.
double ul2_norm(const VelocityField& u_hat);

enum class RateModel { power, exponential };

struct RateFit {
  RateModel model = RateModel::power;
  /// Power: fitted exponent. Exponential: decay rate (negated slope).
  double exponent_or_rate = 0.0;
  double log_prefactor = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  int samples = 0;
  double rms_log_residual = 0.0;
};

RateFit fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t_lo,
                       double t_hi, RateModel model);

struct DiagnosticsRecord {
  double t = 0.0;
  double sup_u = 0.0, sup_omega = 0.0, sup_uhat = 0.0;
  double Ru_t = 0.0, Romega_t = 0.0;
  double E_rho = 0.0, D_rho = 0.0, Ens_rho = 0.0, EnsD_rho = 0.0;
  double ul2_uhat = 0.0;
  double residual_energy = 0.0, residual_enstrophy = 0.0, residual_oscillatory = 0.0;
};

/// One CSV row. Residual columns come from two probe steps of probe_dt.
DiagnosticsRecord make_record(const FlowState& s, double rho, double a, double probe_dt);

/// Everything the theorem-level checks need at one time.
struct DiagSnapshot {
  double t = 0.0;
  double M = 0.0;
  SupNorms norms;
  EnergyProfiles energy;
  EnstrophyProfiles enstrophy;
  OscillatoryProfiles osc;
  double ul2_uhat = 0.0;
  /// sup over x1 of |d1 <u_hat1 u_hat2>|, the forcing of the mean-flow equation.
  double forcing_sup = 0.0;
};

DiagSnapshot snapshot_diagnostics(const FlowState& s);

/// Worst normalized excess lhs - rhs over x1 of the literal pointwise bounds.
/// Non-positive means the bound holds; scale is the sup of the right side.
struct PointwiseSlack {
  double de_sq_vs_2ed = -1.0;
  double eps_vs_d = -1.0;
  double ehat_vs_dhat = -1.0;
  double ghat_vs_kappa_dhat = -1.0;
};
PointwiseSlack pointwise_slack(const DiagSnapshot& snap);

struct TheoremConfig {
  /// Flux constant; beta = C3 (1 + M)^2.
  double C3 = 1.0;
  std::vector<double> T_list{1.0, 4.0, 16.0};
  /// Center of the localization weight; unset means argmax of e(., 0).
  std::optional<double> center;
  double decay_t_lo = 1.0;
  /// Unset means 0.1 (lambda / 2 pi)^2.
  std::optional<double> decay_t_hi;
  double laminar_t_lo = 0.05;
  double laminar_t_hi = 0.5;
  double tau = 0.1;
};

struct LocalizedBoundRow {
  double T = 0.0;
  double rho = 0.0;
  double energy_ratio = 0.0;      // (E(T) + int_0^T D/2) / (4 e*(0) sqrt(beta T))
  double enstrophy_ratio = 0.0;   // Ens(T) sqrt(T) / ((1+M) e*(0))
  double enstrophy_full_ratio = 0.0;  // (Ens(T) + int_{T/2}^T EnsD/2) sqrt(T) / ((1+M) e*(0))
};

struct TheoremReport {
  bool zero_case = false;
  double M = 0.0;
  double Ru = 0.0;
  double e_star0 = 0.0;
  double sup_u_max = 0.0;
  double velocity_ratio = 0.0;       // (a)
  double vorticity_decay_ratio = 0.0;  // (b)
  double decay_window_lo = 0.0, decay_window_hi = 0.0;
  /// Largest sup|u|(t) / max_{s<=1} sup|u|(s) over t >= 1.
  double late_growth_ratio = 0.0;
  std::vector<LocalizedBoundRow> localized;  // (c)
  double kappa = 0.0;                          // (d)
  std::optional<RateFit> ul2_fit, uhat_sup_fit, forcing_fit;
  std::optional<double> smoothing_ratio;  // (e)
};

/// Evaluates the theorem-shaped quantities on a trajectory of snapshots
/// starting at t = 0.
TheoremReport theorem_checks(const std::vector<DiagSnapshot>& traj, double lambda,
                             const TheoremConfig& cfg);

}  // namespace nscyl
