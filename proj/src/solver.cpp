#include "nscyl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ifrk4.hpp"

namespace nscyl {

VelocityField velocity(const FlowState& s) {
  return velocity_from_state(s.omega, s.c, s.m_mean);
}

Profile mean_flow(const FlowState& s) { return mean_flow_from_vorticity(s.omega, s.m_mean); }

double total_energy(const FlowState& s) {
  const VelocityField u = velocity(s);
  return parseval_energy(u.u1) + parseval_energy(u.u2);
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::shear_eigenmode: return "shear_eigenmode";
    case InitKind::vertical_shear: return "vertical_shear";
    case InitKind::random_bandlimited: return "random_bandlimited";
    case InitKind::laminar_small: return "laminar_small";
  }
  return "?";
}

InitKind init_kind_from_string(const std::string& s) {
  for (InitKind k : {InitKind::shear_eigenmode, InitKind::vertical_shear,
                     InitKind::random_bandlimited, InitKind::laminar_small})
    if (to_string(k) == s) return k;
  fail(ErrorCode::invalid_argument, "unknown initial data kind '" + s + "'");
}

namespace {

double sup_velocity(const ScalarField& omega, double c, double m_mean) {
  return sup_norm(velocity_from_state(omega, c, m_mean));
}

ScalarField scaled(const ScalarField& f, double s) { return s * ScalarField(f); }

// Zeroes modes outside |k| <= kmax.
void mask_disk(ScalarField& f, double kmax) {
  const Grid& g = f.grid();
  auto c = f.coeffs();
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n)
      if (g.k_squared(i, n) > kmax * kmax * (1 + 1e-12)) c[g.sidx(i, n)] = 0.0;
}

ScalarField oscillating_modes(const Grid& g, std::uint64_t seed, int band, double kmax) {
  const int jmax = static_cast<int>(std::floor(kmax * g.lambda() / kTwoPi + 1e-9));
  if (3 * jmax > g.nx() || 3 * band > g.ny())
    fail(ErrorCode::invalid_argument,
         "grid too coarse for the requested initial band (need nx >= " +
             std::to_string(3 * jmax) + ", ny >= " + std::to_string(3 * band) + ")");
  ScalarField w = random_bandlimited(g, seed, jmax, band, true);
  mask_disk(w, kmax);
  return w;
}

// Vorticity d1 m of a random low-frequency mean-flow profile.
ScalarField mean_flow_modes(const Grid& g, std::uint64_t seed) {
  constexpr double kEnvelope = 0.5;
  constexpr double kCut = 1.5;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull);
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalarField w = ScalarField::spectral(g);
  auto c = w.coeffs();
  for (int j = 1;; ++j) {
    const double k = kTwoPi * j / g.lambda();
    if (k > kCut) break;
    if (3 * j > g.nx()) fail(ErrorCode::invalid_argument, "grid too coarse for mean flow");
    const double env = std::exp(-(k / kEnvelope) * (k / kEnvelope));
    const Complex m(normal(rng) * env, normal(rng) * env);
    const Complex wj = Complex(0.0, k) * m;
    c[g.sidx(g.row_of(j), 0)] = wj;
    c[g.sidx(g.row_of(-j), 0)] = std::conj(wj);
  }
  return w;
}

// Shifts m_mean >= 0 so that sup|u| reaches target. Requires sup|u| at
// m_mean = 0 not to exceed the target by more than 5%.
double fit_m_mean(const ScalarField& omega, double c, double target) {
  const double r0 = sup_velocity(omega, c, 0.0);
  if (target < 0.95 * r0)
    fail(ErrorCode::invalid_argument,
         "target R_u " + std::to_string(target) + " is below the velocity " +
             std::to_string(r0) + " induced by the requested vorticity");
  if (target <= r0) return 0.0;
  double lo = 0.0, hi = target + r0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sup_velocity(omega, c, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FlowState make_initial_data(const InitialDataSpec& spec, const Grid& grid) {
  if (spec.target_Ru && !(*spec.target_Ru >= 0.0))
    fail(ErrorCode::invalid_argument, "target R_u must be non-negative");
  if (spec.target_Romega && !(*spec.target_Romega >= 0.0))
    fail(ErrorCode::invalid_argument, "target R_omega must be non-negative");
  require(spec.band >= 1, "band must be at least 1");
  require(3 * spec.band <= grid.ny(), "band exceeds the dealiased vertical range");

  FlowState s{0.0, ScalarField::spectral(grid), spec.c, 0.0, 0.0};
  const double L = grid.lambda();

  switch (spec.kind) {
    case InitKind::shear_eigenmode: {
      const double A = spec.target_Romega.value_or(1.0);
      s.omega = to_spectral(
          ScalarField::sample(grid, [&](double, double y) { return A * std::cos(kTwoPi * y); }));
      break;
    }
    case InitKind::vertical_shear: {
      const double k = kTwoPi / L;
      const double a = spec.target_Romega ? *spec.target_Romega / k : 1.0;
      s.omega = to_spectral(
          ScalarField::sample(grid, [&](double x, double) { return a * k * std::cos(k * x); }));
      break;
    }
    case InitKind::laminar_small: {
      const double R = spec.target_Romega.value_or(0.1 * 4.0 * kPi * kPi);
      ScalarField w = oscillating_modes(grid, spec.seed, spec.band, kTwoPi * spec.band);
      const double sw = sup_norm(to_physical(w));
      s.omega = R > 0.0 ? scaled(w, R / sw) : ScalarField::spectral(grid);
      break;
    }
    case InitKind::random_bandlimited: {
      const double R = spec.target_Romega.value_or(1.0);
      if (R == 0.0) {
        if (spec.target_Ru.value_or(0.0) > 0.0)
          fail(ErrorCode::invalid_argument,
               "R_omega = 0 with R_u > 0 is unreachable without a uniform flow");
        break;
      }
      ScalarField wo = oscillating_modes(grid, spec.seed, spec.band, kTwoPi * spec.band);
      ScalarField wm = mean_flow_modes(grid, spec.seed);
      wo = scaled(wo, 1.0 / sup_norm(to_physical(wo)));
      const double wm_sup = sup_norm(to_physical(wm));
      // Boxes too short for any mean-flow mode get oscillating data only.
      if (wm_sup > 0.0) wm = scaled(wm, 1.0 / wm_sup);
      auto build = [&](double log_r) {
        ScalarField w = std::exp(log_r) * ScalarField(wm) + wo;
        return scaled(w, R / sup_norm(to_physical(w)));
      };
      double log_r = 0.0;
      if (spec.target_Ru) {
        const double target = *spec.target_Ru;
        auto f = [&](double lr) { return sup_velocity(build(lr), spec.c, 0.0) - target; };
        double lo = -10.0, hi = 10.0;
        const double flo = f(lo), fhi = f(hi);
        if (flo > 0.0 || fhi < 0.0) {
          log_r = std::abs(flo) < std::abs(fhi) ? lo : hi;
        } else {
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
          }
          log_r = 0.5 * (lo + hi);
        }
      }
      s.omega = build(log_r);
      break;
    }
  }

  // Keep the data exactly inside the dealiased band.
  s.omega = dealias(s.omega);
  s.m0_norm = sup_norm(to_physical(s.omega));

  if (spec.target_Ru) {
    const double target = *spec.target_Ru;
    if (spec.kind != InitKind::random_bandlimited) {
      if (s.m0_norm == 0.0 && target > std::abs(s.c))
        fail(ErrorCode::invalid_argument, "R_omega = 0 with R_u > 0 is unreachable");
      s.m_mean = fit_m_mean(s.omega, s.c, target);
    }
    const double got = sup_velocity(s.omega, s.c, s.m_mean);
    if (std::abs(got - target) > 0.05 * std::max(target, 1e-300) && !(got == 0 && target == 0)) {
      std::ostringstream os;
      os << "cannot reach target R_u " << target << " (best " << got << ")";
      fail(ErrorCode::invalid_argument, os.str());
    }
  }
  return s;
}

double cfl_dt(const FlowState& s, double safety, double dt_acc) {
  require(safety > 0.0 && safety <= 1.0, "CFL safety must lie in (0, 1]");
  require(dt_acc > 0.0, "dt_acc must be positive");
  const VelocityField u = velocity(s);
  const double a = sup_norm(u.u1), b = sup_norm(u.u2);
  const Grid& g = s.grid();
  double limit = dt_acc;
  if (a > 0.0) limit = std::min(limit, safety * g.dx() / a);
  if (b > 0.0) limit = std::min(limit, safety * g.dy() / b);
  return limit;
}

namespace {

ScalarField advection_tendency(const ScalarField& w, double c, double m_mean) {
  const VelocityField u = as_physical(velocity_from_state(w, c, m_mean));
  const ScalarField wp = to_physical(w);
  ScalarField f1 = to_spectral(pointwise_product(u.u1, wp));
  ScalarField f2 = to_spectral(pointwise_product(u.u2, wp));
  const Grid& g = w.grid();
  ScalarField out = ScalarField::spectral(g);
  auto o = out.coeffs();
  const auto a = f1.coeffs(), b = f2.coeffs();
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) {
      const std::size_t k = g.sidx(i, n);
      if (!in_dealiased_band(g, i, n)) continue;
      o[k] = -Complex(0.0, 1.0) * (g.k1(i) * a[k] + g.k2(n) * b[k]);
    }
  return out;
}

}  // namespace

FlowState step(const FlowState& s, double dt) {
  require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
  const double c = s.c, mm = s.m_mean;
  FlowState out = s;
  out.omega = detail::if_rk4_step(
      as_spectral(s.omega), s.t, dt,
      [c, mm](const ScalarField& w, double) { return advection_tendency(w, c, mm); });
  out.t = s.t + dt;
  return out;
}

FlowState run(const FlowState& s0, double t_end, const std::vector<double>& diag_times,
              const StateSink& sink, const RunOptions& opt, const StepObserver& observer) {
  require(t_end >= s0.t, "t_end precedes the initial time");
  for (std::size_t k = 0; k < diag_times.size(); ++k) {
    require(diag_times[k] >= s0.t && diag_times[k] <= t_end,
            "diagnostic times must lie in [t0, t_end]");
    if (k > 0) require(diag_times[k] > diag_times[k - 1], "diagnostic times must increase");
  }
  if (opt.fixed_dt) require(*opt.fixed_dt > 0.0, "fixed dt must be positive");
  FlowState s = s0;
  if (t_end == s0.t) return s;

  std::size_t next = 0;
  // Tolerance for landing on a target time.
  const double eps = 1e-12 * std::max(1.0, t_end);
  while (next < diag_times.size() && diag_times[next] <= s.t + eps) {
    if (sink) sink(s);
    ++next;
  }
  while (s.t < t_end - eps) {
    double dt = opt.fixed_dt ? *opt.fixed_dt : cfl_dt(s, opt.safety, opt.dt_acc);
    const double target = next < diag_times.size() ? diag_times[next] : t_end;
    bool land = false;
    if (s.t + dt >= target - eps) {
      dt = target - s.t;
      land = true;
    }
    FlowState after = [&] {
      try {
        return step(s, dt);
      } catch (const Error& e) {
        std::ostringstream os;
        os << e.what() << " (at t = " << s.t << ")";
        throw Error(e.code(), os.str());
      }
    }();
    if (land) after.t = target;
    if (observer) observer(s, after);
    s = std::move(after);
    while (next < diag_times.size() && diag_times[next] <= s.t + eps) {
      if (sink) sink(s);
      ++next;
    }
  }
  return s;
}

double mean_flow_residual(const FlowState& s, double dt) {
  require(dt > 0.0, "dt must be positive");
  const FlowState s1 = step(s, dt);
  const FlowState s2 = step(s1, dt);
  const Profile dtm = (0.5 / dt) * (mean_flow(s2) - mean_flow(s));
  const Profile m = mean_flow(s1);
  const VelocityField uh =
      velocity_from_vorticity(oscillating_part(s1.omega));
  const Profile flux =
      profile_derivative(vertical_average(dealias(padded_product(uh.u1, uh.u2))), 1);
  const Profile adv = s1.c * profile_derivative(m, 1);
  const Profile diff = profile_derivative(m, 2);
  const Profile res = dtm + adv + flux - diff;
  const double scale = profile_l2(dtm) + profile_l2(adv) + profile_l2(flux) + profile_l2(diff);
  return scale == 0.0 ? 0.0 : profile_l2(res) / scale;
}

}  // namespace nscyl
