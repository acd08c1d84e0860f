#include "nscyl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nscyl {

namespace {

// Quadrature average over x2 of a physical field.
Profile row_average(const ScalarField& f) {
  const ScalarField p = as_physical(f);
  const Grid& g = p.grid();
  std::vector<double> out(static_cast<std::size_t>(g.nx()));
  const auto v = p.values();
  for (int i = 0; i < g.nx(); ++i) {
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) s += v[g.pidx(i, j)];
    out[static_cast<std::size_t>(i)] = s / g.ny();
  }
  return Profile(g, std::move(out));
}

// Applies op(values...) pointwise on physical fields of one grid.
template <class Op>
ScalarField pointwise(const Grid& g, Op op, std::initializer_list<const ScalarField*> in) {
  std::vector<ScalarField> phys;
  phys.reserve(in.size());
  for (const ScalarField* f : in) phys.push_back(as_physical(*f));
  ScalarField out = ScalarField::physical(g);
  auto o = out.values();
  std::vector<double> args(phys.size());
  for (std::size_t k = 0; k < o.size(); ++k) {
    for (std::size_t a = 0; a < phys.size(); ++a) args[a] = phys[a].values()[k];
    o[k] = op(args);
  }
  return out;
}

struct Gradients {
  ScalarField d1u1, d2u1, d1u2, d2u2;
};

Gradients gradients(const VelocityField& u) {
  const VelocityField s = as_spectral(u);
  return {to_physical(spectral_derivative(s.u1, 1, 1)), to_physical(spectral_derivative(s.u1, 2, 1)),
          to_physical(spectral_derivative(s.u2, 1, 1)), to_physical(spectral_derivative(s.u2, 2, 1))};
}

double sq(double x) { return x * x; }

}  // namespace

SupNorms sup_norms_and_reynolds(const FlowState& s) {
  SupNorms n;
  n.sup_u = sup_norm(velocity(s));
  n.sup_omega = sup_norm(to_physical(s.omega));
  n.sup_uhat = sup_norm(velocity_from_vorticity(oscillating_part(s.omega)));
  n.Ru_t = n.sup_u;
  n.Romega_t = n.sup_omega;
  return n;
}

double v_volume(double t) {
  if (!(t > 0.0)) fail(ErrorCode::invalid_argument, "V(t) needs t > 0");
  return std::min(t, std::sqrt(t));
}

EnergyProfiles energy_profiles(const FlowState& s) {
  const Grid& g = s.grid();
  const VelocityField us = velocity(s);
  const VelocityField u = as_physical(us);
  const Gradients G = gradients(us);
  const ScalarField p = pressure_from_state(us, s.omega);
  const double M2 = 0.5 * s.m0_norm * s.m0_norm;

  Profile e = row_average(pointwise(g, [](auto& a) { return 0.5 * (sq(a[0]) + sq(a[1])); }, {&u.u1, &u.u2}));
  for (auto& v : e.values()) v += M2;
  Profile h = row_average(pointwise(
      g, [](auto& a) { return (a[2] + 0.5 * (sq(a[0]) + sq(a[1]))) * a[0]; }, {&u.u1, &u.u2, &p}));
  Profile d = row_average(pointwise(
      g, [](auto& a) { return sq(a[0]) + sq(a[1]) + sq(a[2]) + sq(a[3]); },
      {&G.d1u1, &G.d2u1, &G.d1u2, &G.d2u2}));
  Profile de = row_average(pointwise(
      g, [](auto& a) { return a[0] * a[2] + a[1] * a[3]; }, {&u.u1, &u.u2, &G.d1u1, &G.d1u2}));
  Profile f = de - h;
  return {std::move(e), std::move(h), std::move(d), std::move(f)};
}

EnstrophyProfiles enstrophy_profiles(const FlowState& s) {
  const Grid& g = s.grid();
  const VelocityField u = as_physical(velocity(s));
  const ScalarField w = to_physical(s.omega);
  const ScalarField d1w = to_physical(spectral_derivative(s.omega, 1, 1));
  const ScalarField d2w = to_physical(spectral_derivative(s.omega, 2, 1));

  Profile eps = row_average(pointwise(g, [](auto& a) { return 0.5 * sq(a[0]); }, {&w}));
  Profile zeta = row_average(pointwise(g, [](auto& a) { return 0.5 * sq(a[0]) * a[1]; }, {&w, &u.u1}));
  Profile delta = row_average(pointwise(g, [](auto& a) { return sq(a[0]) + sq(a[1]); }, {&d1w, &d2w}));
  Profile deps = row_average(pointwise(g, [](auto& a) { return a[0] * a[1]; }, {&w, &d1w}));
  Profile phi = deps - zeta;
  return {std::move(eps), std::move(zeta), std::move(delta), std::move(phi)};
}

OscillatoryProfiles oscillatory_profiles(const FlowState& s) {
  const Grid& g = s.grid();
  const VelocityField uhs = velocity_from_vorticity(oscillating_part(s.omega));
  const VelocityField uh = as_physical(uhs);
  const Gradients G = gradients(uhs);
  const ScalarField p = pressure_from_state(velocity(s), s.omega);
  const Profile dm = vertical_average(s.omega);

  Profile e = row_average(pointwise(g, [](auto& a) { return 0.5 * (sq(a[0]) + sq(a[1])); }, {&uh.u1, &uh.u2}));
  Profile h = row_average(pointwise(
      g, [](auto& a) { return (a[2] + 0.5 * (sq(a[0]) + sq(a[1]))) * a[0]; }, {&uh.u1, &uh.u2, &p}));
  Profile d = row_average(pointwise(
      g, [](auto& a) { return sq(a[0]) + sq(a[1]) + sq(a[2]) + sq(a[3]); },
      {&G.d1u1, &G.d2u1, &G.d1u2, &G.d2u2}));
  Profile de = row_average(pointwise(
      g, [](auto& a) { return a[0] * a[2] + a[1] * a[3]; }, {&uh.u1, &uh.u2, &G.d1u1, &G.d1u2}));
  Profile f = de - h;
  Profile uu = row_average(pointwise(g, [](auto& a) { return a[0] * a[1]; }, {&uh.u1, &uh.u2}));
  Profile gh = Profile::zeros(g);
  for (std::size_t i = 0; i < gh.size(); ++i) gh[i] = dm[i] * uu[i];
  return {std::move(e), std::move(h), std::move(d), std::move(f), std::move(gh)};
}

double localized_integral(const Profile& p, double rho, double a) {
  require(rho > 0.0, "rho must be positive");
  const Grid& g = p.grid();
  const auto c = profile_spectrum(p);
  const double L = g.lambda();
  const double tail = std::exp(-0.5 * rho * L);
  double sum = 0.0;
  for (int j = 0; j <= g.nx() / 2; ++j) {
    const double k = kTwoPi * j / L;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double chi = 2.0 * rho * (1.0 - sign * tail) / (rho * rho + k * k);
    const Complex phase(std::cos(k * a), std::sin(k * a));
    const double term = (c[static_cast<std::size_t>(j)] * phase).real() * chi;
    sum += (j == 0 || j == g.nx() / 2) ? term : 2.0 * term;
  }
  return sum;
}

LocalizedSums localized_sums(const EnergyProfiles& en, const EnstrophyProfiles& ens,
                             double rho, double a) {
  return {localized_integral(en.e, rho, a), localized_integral(en.d, rho, a),
          localized_integral(ens.eps, rho, a), localized_integral(ens.delta, rho, a)};
}

double argmax_x1(const Profile& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return p.grid().x1(static_cast<int>(best));
}

namespace {

BalanceResiduals residuals_at(const FlowState& s0, const FlowState& s1, const FlowState& s2) {
  const double dt2 = s2.t - s0.t;
  const EnergyProfiles e0 = energy_profiles(s0), e1 = energy_profiles(s1), e2 = energy_profiles(s2);
  const EnstrophyProfiles z0 = enstrophy_profiles(s0), z1 = enstrophy_profiles(s1),
                          z2 = enstrophy_profiles(s2);
  const OscillatoryProfiles o0 = oscillatory_profiles(s0), o1 = oscillatory_profiles(s1),
                            o2 = oscillatory_profiles(s2);
  BalanceResiduals r;
  r.energy = profile_l2((1.0 / dt2) * (e2.e - e0.e) - profile_derivative(e1.f) + e1.d);
  r.enstrophy = profile_l2((1.0 / dt2) * (z2.eps - z0.eps) - profile_derivative(z1.phi) + z1.delta);
  // e_hat and h_hat are taken in the frame where c = 0; c d1 e_hat restores the transport.
  r.oscillatory = profile_l2((1.0 / dt2) * (o2.e_hat - o0.e_hat) + s1.c * profile_derivative(o1.e_hat) -
                             profile_derivative(o1.f_hat) + o1.d_hat + o1.g_hat);
  return r;
}

}  // namespace

std::vector<BalanceResiduals> balance_residuals(const std::vector<FlowState>& traj) {
  require(traj.size() >= 3, "balance residuals need at least three snapshots");
  const double dt = traj[1].t - traj[0].t;
  require(dt > 0.0, "snapshots must advance in time");
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double step = traj[k].t - traj[k - 1].t;
    if (std::abs(step - dt) > 1e-9 * std::max(dt, std::abs(traj[k].t)))
      fail(ErrorCode::invalid_argument, "snapshots are not equally spaced");
    require(traj[k].grid() == traj[0].grid(), "snapshots live on different grids");
  }
  std::vector<BalanceResiduals> out;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k)
    out.push_back(residuals_at(traj[k - 1], traj[k], traj[k + 1]));
  return out;
}

BalanceResiduals probe_balance_residuals(const FlowState& s, double probe_dt) {
  require(probe_dt > 0.0, "probe dt must be positive");
  const FlowState s1 = step(s, probe_dt);
  const FlowState s2 = step(s1, probe_dt);
  return residuals_at(s, s1, s2);
}

double ul2_norm(const VelocityField& u_hat) {
  const Grid& g = u_hat.u1.grid();
  if (g.lambda() < 2.0)
    fail(ErrorCode::invalid_argument, "uniformly local norm needs lambda >= 2");
  const VelocityField u = as_physical(u_hat);
  const Profile q = row_average(pointwise(g, [](auto& a) { return sq(a[0]) + sq(a[1]); }, {&u.u1, &u.u2}));
  auto c = profile_spectrum(q);
  for (int j = 0; j <= g.nx() / 2; ++j) {
    const double k = g.k1(j);
    c[static_cast<std::size_t>(j)] *= j == 0 ? 2.0 : 2.0 * std::sin(k) / k;
  }
  const Profile W = profile_from_spectrum(g, c);
  double best = 0.0;
  for (double v : W.values()) best = std::max(best, v);
  return std::sqrt(best);
}

RateFit fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t_lo,
                       double t_hi, RateModel model) {
  require(t_hi > t_lo, "fit window is empty");
  std::vector<double> xs, ys;
  for (const auto& [t, v] : series) {
    if (t < t_lo || t > t_hi) continue;
    if (!(v > 0.0)) fail(ErrorCode::invalid_argument, "fit requires positive values in the window");
    if (model == RateModel::power && !(t > 0.0))
      fail(ErrorCode::invalid_argument, "power-law fit requires t > 0");
    xs.push_back(model == RateModel::power ? std::log(t) : t);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 8)
    fail(ErrorCode::invalid_argument,
         "fit needs at least 8 samples in the window (got " + std::to_string(xs.size()) + ")");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::invalid_argument, "fit abscissae are degenerate");
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) rss += sq(ys[k] - (icept + slope * xs[k]));
  RateFit r;
  r.model = model;
  r.exponent_or_rate = model == RateModel::power ? slope : -slope;
  r.log_prefactor = icept;
  r.t_lo = t_lo;
  r.t_hi = t_hi;
  r.samples = static_cast<int>(xs.size());
  r.rms_log_residual = std::sqrt(rss / n);
  return r;
}

DiagnosticsRecord make_record(const FlowState& s, double rho, double a, double probe_dt) {
  DiagnosticsRecord r;
  r.t = s.t;
  const SupNorms n = sup_norms_and_reynolds(s);
  r.sup_u = n.sup_u;
  r.sup_omega = n.sup_omega;
  r.sup_uhat = n.sup_uhat;
  r.Ru_t = n.Ru_t;
  r.Romega_t = n.Romega_t;
  const LocalizedSums L = localized_sums(energy_profiles(s), enstrophy_profiles(s), rho, a);
  r.E_rho = L.E_rho;
  r.D_rho = L.D_rho;
  r.Ens_rho = L.Ens_rho;
  r.EnsD_rho = L.EnsD_rho;
  r.ul2_uhat = ul2_norm(velocity_from_vorticity(oscillating_part(s.omega)));
  const BalanceResiduals b = probe_balance_residuals(s, probe_dt);
  r.residual_energy = b.energy;
  r.residual_enstrophy = b.enstrophy;
  r.residual_oscillatory = b.oscillatory;
  return r;
}

DiagSnapshot snapshot_diagnostics(const FlowState& s) {
  const VelocityField uh = velocity_from_vorticity(oscillating_part(s.omega));
  const Profile forcing =
      profile_derivative(vertical_average(dealias(padded_product(uh.u1, uh.u2))), 1);
  return DiagSnapshot{s.t,
                      s.m0_norm,
                      sup_norms_and_reynolds(s),
                      energy_profiles(s),
                      enstrophy_profiles(s),
                      oscillatory_profiles(s),
                      ul2_norm(uh),
                      profile_sup(forcing)};
}

PointwiseSlack pointwise_slack(const DiagSnapshot& snap) {
  const Grid& g = snap.energy.e.grid();
  const std::size_t n = static_cast<std::size_t>(g.nx());
  const auto& E = snap.energy;
  const auto& Z = snap.enstrophy;
  const auto& O = snap.osc;
  const double kappa_t = snap.norms.sup_omega / (4.0 * kPi * kPi);
  auto worst = [n](auto lhs, auto rhs) {
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(rhs(i)));
    double w = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) w = std::max(w, lhs(i) - rhs(i));
    if (scale == 0.0) return w > 0.0 ? std::numeric_limits<double>::infinity() : -1.0;
    return w / scale;
  };
  PointwiseSlack s;
  s.de_sq_vs_2ed = worst([&](std::size_t i) { return sq(E.f[i] + E.h[i]); },
                         [&](std::size_t i) { return 2.0 * E.e[i] * E.d[i]; });
  s.eps_vs_d = worst([&](std::size_t i) { return Z.eps[i]; }, [&](std::size_t i) { return E.d[i]; });
  s.ehat_vs_dhat = worst([&](std::size_t i) { return O.e_hat[i]; },
                         [&](std::size_t i) { return O.d_hat[i] / (8.0 * kPi * kPi); });
  s.ghat_vs_kappa_dhat = worst([&](std::size_t i) { return std::abs(O.g_hat[i]); },
                               [&](std::size_t i) { return kappa_t * O.d_hat[i]; });
  return s;
}

namespace {

const DiagSnapshot& at_time(const std::vector<DiagSnapshot>& traj, double t) {
  for (const auto& s : traj)
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, t)) return s;
  fail(ErrorCode::invalid_argument,
       "missing diagnostics at t = " + std::to_string(t) + " for a requested check");
}

// Trapezoid integral of y over [a, b] on the sample times, with linear
// interpolation at the ends.
template <class Y>
double integrate(const std::vector<DiagSnapshot>& traj, double a, double b, Y y) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : traj) pts.emplace_back(s.t, y(s));
  auto interp = [&](double t) {
    for (std::size_t k = 1; k < pts.size(); ++k)
      if (pts[k].first >= t) {
        const double w = (t - pts[k - 1].first) / (pts[k].first - pts[k - 1].first);
        return (1 - w) * pts[k - 1].second + w * pts[k].second;
      }
    return pts.back().second;
  };
  std::vector<std::pair<double, double>> seg{{a, interp(a)}};
  for (const auto& p : pts)
    if (p.first > a && p.first < b) seg.push_back(p);
  seg.emplace_back(b, interp(b));
  double sum = 0.0;
  for (std::size_t k = 1; k < seg.size(); ++k)
    sum += 0.5 * (seg[k].second + seg[k - 1].second) * (seg[k].first - seg[k - 1].first);
  return sum;
}

}  // namespace

TheoremReport theorem_checks(const std::vector<DiagSnapshot>& traj, double lambda,
                             const TheoremConfig& cfg) {
  require(!traj.empty(), "empty trajectory");
  if (std::abs(traj.front().t) > 1e-12)
    fail(ErrorCode::invalid_argument, "trajectory must start at t = 0");
  for (std::size_t k = 1; k < traj.size(); ++k)
    require(traj[k].t > traj[k - 1].t, "trajectory times must increase");

  TheoremReport r;
  const DiagSnapshot& s0 = traj.front();
  r.M = s0.M;
  r.Ru = s0.norms.sup_u;
  r.e_star0 = profile_sup(s0.energy.e);
  r.kappa = r.M / (4.0 * kPi * kPi);
  if (r.e_star0 == 0.0) {
    r.zero_case = true;
    return r;
  }
  const double M = r.M;
  const double es = r.e_star0;

  double early_max = 0.0;
  for (const auto& s : traj) {
    r.sup_u_max = std::max(r.sup_u_max, s.norms.sup_u);
    if (s.t <= 1.0) early_max = std::max(early_max, s.norms.sup_u);
  }
  r.velocity_ratio = r.sup_u_max / (r.Ru + M + (1 + M) * es);
  for (const auto& s : traj)
    if (s.t >= 1.0 && early_max > 0.0)
      r.late_growth_ratio = std::max(r.late_growth_ratio, s.norms.sup_u / early_max);

  r.decay_window_lo = cfg.decay_t_lo;
  r.decay_window_hi = cfg.decay_t_hi.value_or(0.1 * sq(lambda / kTwoPi));
  for (const auto& s : traj)
    if (s.t >= r.decay_window_lo && s.t <= r.decay_window_hi)
      r.vorticity_decay_ratio =
          std::max(r.vorticity_decay_ratio, sq(s.norms.sup_omega) * std::sqrt(s.t) / ((1 + M) * es));

  const double beta = cfg.C3 * sq(1 + M);
  const double a = cfg.center.value_or(argmax_x1(s0.energy.e));
  for (double T : cfg.T_list) {
    if (T > traj.back().t + 1e-9) continue;
    const DiagSnapshot& sT = at_time(traj, T);
    LocalizedBoundRow row;
    row.T = T;
    row.rho = 1.0 / std::sqrt(beta * T);
    const double rho = row.rho;
    const double ET = localized_integral(sT.energy.e, rho, a);
    const double intD =
        integrate(traj, 0.0, T, [&](const DiagSnapshot& s) { return localized_integral(s.energy.d, rho, a); });
    row.energy_ratio = (ET + 0.5 * intD) / (4.0 * es * std::sqrt(beta * T));
    const double EnsT = localized_integral(sT.enstrophy.eps, rho, a);
    const double intEnsD = integrate(traj, 0.5 * T, T, [&](const DiagSnapshot& s) {
      return localized_integral(s.enstrophy.delta, rho, a);
    });
    row.enstrophy_ratio = EnsT * std::sqrt(T) / ((1 + M) * es);
    row.enstrophy_full_ratio = (EnsT + 0.5 * intEnsD) * std::sqrt(T) / ((1 + M) * es);
    r.localized.push_back(row);
  }

  if (r.kappa < 1.0) {
    std::vector<std::pair<double, double>> ul2, sup_hat, forcing;
    for (const auto& s : traj) {
      ul2.emplace_back(s.t, s.ul2_uhat);
      sup_hat.emplace_back(s.t, s.norms.sup_uhat);
      forcing.emplace_back(s.t, s.forcing_sup);
    }
    auto try_fit = [&](const auto& series) -> std::optional<RateFit> {
      int in = 0;
      bool positive = true;
      for (const auto& [t, v] : series)
        if (t >= cfg.laminar_t_lo && t <= cfg.laminar_t_hi) {
          ++in;
          positive = positive && v > 0.0;
        }
      if (in < 8 || !positive) return std::nullopt;
      return fit_decay_rate(series, cfg.laminar_t_lo, cfg.laminar_t_hi, RateModel::exponential);
    };
    r.ul2_fit = try_fit(ul2);
    r.uhat_sup_fit = try_fit(sup_hat);
    r.forcing_fit = try_fit(forcing);
  }

  for (const auto& s : traj) {
    if (s.ul2_uhat <= 0.0) continue;
    for (const auto& q : traj)
      if (std::abs(q.t - (s.t + cfg.tau)) <= 1e-9 * std::max(1.0, q.t)) {
        const double ratio = q.norms.sup_uhat / s.ul2_uhat;
        r.smoothing_ratio = std::max(r.smoothing_ratio.value_or(0.0), ratio);
      }
  }
  return r;
}

}  // namespace nscyl
