#include "nscyl/advdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ifrk4.hpp"

namespace nscyl {

std::string to_string(DriftKind k) {
  switch (k) {
    case DriftKind::zero: return "zero";
    case DriftKind::steady_shear_u1: return "steady_shear_u1";
    case DriftKind::time_periodic_shear: return "time_periodic_shear";
    case DriftKind::from_snapshot: return "from_snapshot";
  }
  return "?";
}

DriftKind drift_kind_from_string(const std::string& s) {
  for (DriftKind k : {DriftKind::zero, DriftKind::steady_shear_u1, DriftKind::time_periodic_shear,
                      DriftKind::from_snapshot})
    if (to_string(k) == s) return k;
  fail(ErrorCode::invalid_argument, "unknown drift kind '" + s + "'");
}

DriftSpec DriftSpec::zero() { return {}; }

DriftSpec DriftSpec::steady_shear(double M) {
  require(M >= 0.0 && std::isfinite(M), "drift amplitude must be non-negative");
  DriftSpec d;
  d.kind = DriftKind::steady_shear_u1;
  d.M = M;
  return d;
}

DriftSpec DriftSpec::time_periodic(double M, double Omega) {
  DriftSpec d = steady_shear(M);
  d.kind = DriftKind::time_periodic_shear;
  d.Omega = Omega;
  return d;
}

DriftSpec DriftSpec::from_snapshot(const VelocityField& u) {
  const VelocityField s = as_spectral(u);
  const double scale = sup_norm(s);
  const Grid& g = s.u1.grid();
  const double gscale = scale * std::max(g.k1(g.nx() / 2), g.k2(g.ny() / 2));
  if (scale > 0.0) {
    if (sup_norm(to_physical(divergence(s))) > 1e-10 * gscale)
      fail(ErrorCode::invalid_argument, "snapshot drift is not divergence-free");
    if (profile_sup(vertical_average(s.u1)) > 1e-10 * scale)
      fail(ErrorCode::invalid_argument, "snapshot drift u1 has a nonzero vertical average");
  }
  DriftSpec d;
  d.kind = DriftKind::from_snapshot;
  d.field = as_physical(s);
  d.M = sup_norm(d.field->u1);
  return d;
}

VelocityField drift_at(const DriftSpec& d, const Grid& g, double t) {
  switch (d.kind) {
    case DriftKind::zero:
      return {ScalarField::physical(g), ScalarField::physical(g)};
    case DriftKind::steady_shear_u1:
    case DriftKind::time_periodic_shear: {
      const double amp = d.kind == DriftKind::steady_shear_u1 ? d.M : d.M * std::cos(d.Omega * t);
      return {ScalarField::sample(g, [amp](double, double y) { return amp * std::sin(kTwoPi * y); }),
              ScalarField::physical(g)};
    }
    case DriftKind::from_snapshot:
      require(d.field.has_value(), "snapshot drift without a field");
      require(d.field->u1.grid() == g, "snapshot drift lives on another grid");
      return *d.field;
  }
  fail(ErrorCode::invalid_argument, "bad drift kind");
}

namespace {

using DriftFn = std::function<VelocityField(double)>;

ScalarField transport(const DriftSpec& drift, const DriftFn& v, const ScalarField& omega0,
                      double t_end, const std::vector<double>& times, const FieldSink& sink,
                      const AdvDiffOptions& opt) {
  require(t_end >= 0.0, "t_end must be non-negative");
  require(opt.dt_max > 0.0, "dt_max must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    require(times[k] >= 0.0 && times[k] <= t_end + 1e-12 * std::max(1.0, t_end),
            "observation time outside [0, t_end]");
    if (k > 0) require(times[k] > times[k - 1], "observation times must increase");
  }
  const Grid& g = omega0.grid();
  const bool moving = drift.kind != DriftKind::zero && drift.M > 0.0;
  const bool has_u2 = drift.kind == DriftKind::from_snapshot;
  double dt = opt.dt_max;
  if (moving) {
    const VelocityField v0 = v(0.0);
    const double s1 = sup_norm(v0.u1), s2 = sup_norm(v0.u2);
    if (s1 > 0.0) dt = std::min(dt, 0.5 * g.dx() / s1);
    if (s2 > 0.0) dt = std::min(dt, 0.5 * g.dy() / s2);
  }

  const detail::Tendency N = [&](const ScalarField& w, double t) {
    ScalarField out = ScalarField::spectral(g);
    if (!moving) return out;
    const VelocityField vt = v(t);
    out -= spectral_derivative(padded_product(vt.u1, w), 1, 1);
    if (has_u2) out -= spectral_derivative(padded_product(vt.u2, w), 2, 1);
    return out;
  };

  ScalarField w = as_spectral(omega0);
  double t = 0.0;
  std::size_t next = 0;
  const double eps = 1e-12 * std::max(1.0, t_end);
  while (next < times.size() && times[next] <= t + eps) {
    if (sink) sink(times[next], w);
    ++next;
  }
  while (t < t_end - eps) {
    double target = next < times.size() ? times[next] : t_end;
    double h = std::min(dt, target - t);
    const bool lands = h == target - t;
    w = detail::if_rk4_step(w, t, h, N);
    t = lands ? target : t + h;
    while (next < times.size() && times[next] <= t + eps) {
      if (sink) sink(times[next], w);
      ++next;
    }
  }
  return w;
}

}  // namespace

ScalarField advdiff_run(const ScalarField& omega0, const DriftSpec& drift, double t_end,
                        const std::vector<double>& times, const FieldSink& sink,
                        const AdvDiffOptions& opt) {
  const Grid& g = omega0.grid();
  const DriftFn v = [&](double t) { return drift_at(drift, g, t); };
  return transport(drift, v, omega0, t_end, times, sink, opt);
}

ScalarField advdiff_run_adjoint(const ScalarField& omega0, const DriftSpec& drift,
                                double t_end, const AdvDiffOptions& opt) {
  const Grid& g = omega0.grid();
  const DriftFn v = [&](double t) {
    VelocityField u = drift_at(drift, g, t_end - t);
    u.u1 *= -1.0;
    u.u2 *= -1.0;
    return u;
  };
  return transport(drift, v, omega0, t_end, {}, {}, opt);
}

ScalarField normalized_gaussian(const Grid& g, std::pair<double, double> y, double sigma0) {
  if (!(sigma0 >= 2.0 * std::max(g.dx(), g.dy()) * (1 - 1e-12)))
    fail(ErrorCode::invalid_argument, "sigma0 is below twice the grid spacing");
  const double L = g.lambda();
  const int images2 = static_cast<int>(std::ceil(6.0 * sigma0)) + 1;
  ScalarField f = ScalarField::sample(g, [&](double x1, double x2) {
    double s = 0.0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -images2; b <= images2; ++b) {
        const double d1 = x1 - y.first + a * L;
        const double d2 = x2 - y.second + b;
        s += std::exp(-(d1 * d1 + d2 * d2) / (2.0 * sigma0 * sigma0));
      }
    return s;
  });
  f *= 1.0 / integral(f);
  return f;
}

ScalarField fundamental_solution(const DriftSpec& drift, const Grid& g,
                                 std::pair<double, double> y, double t, double sigma0,
                                 const AdvDiffOptions& opt) {
  require(t > 0.0, "fundamental solution needs t > 0");
  const ScalarField gamma = to_physical(advdiff_run(normalized_gaussian(g, y, sigma0), drift, t, {}, {}, opt));
  const double mass = integral(gamma);
  if (std::abs(mass - 1.0) > 1e-6)
    fail(ErrorCode::numerical, "fundamental solution lost mass: " + std::to_string(mass));
  return gamma;
}

LpLqReport check_lp_lq(const DriftSpec& drift, const ScalarField& omega0, double p, double q,
                       const std::vector<double>& times, const AdvDiffOptions& opt) {
  require(p >= 1.0 && q >= p, "need 1 <= p <= q");
  require(!times.empty(), "no observation times");
  LpLqReport r;
  r.p = p;
  r.q = q;
  const double n0 = lp_norm(omega0, p);
  require(n0 > 0.0, "initial data vanishes");
  const double expo = (std::isinf(p) ? 0.0 : 1.0 / p) - (std::isinf(q) ? 0.0 : 1.0 / q);
  advdiff_run(omega0, drift, times.back(), times,
              [&](double t, const ScalarField& w) {
                if (t <= 0.0) return;
                const double ratio = lp_norm(w, q) * std::pow(std::min(t, std::sqrt(t)), expo) / n0;
                r.ratios.emplace_back(t, ratio);
                r.K1 = std::max(r.K1, ratio);
              },
              opt);
  return r;
}

EnvelopeFit check_gaussian_envelope(const ScalarField& gamma, std::pair<double, double> y,
                                    double t, double M, double lambda) {
  require(t > 0.0, "envelope needs t > 0");
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  const ScalarField G = as_physical(gamma);
  const Grid& g = G.grid();
  const double L = g.lambda();
  std::vector<double> prof(static_cast<std::size_t>(g.nx()), -std::numeric_limits<double>::infinity());
  double top = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      prof[static_cast<std::size_t>(i)] = std::max(prof[static_cast<std::size_t>(i)], G.value(i, j));
      top = std::max(top, G.value(i, j));
    }
  std::vector<double> xs, ys;
  for (int i = 0; i < g.nx(); ++i) {
    const double v = prof[static_cast<std::size_t>(i)];
    if (!(v > 1e-10 * top)) continue;
    double d = std::fmod(std::abs(g.x1(i) - y.first), L);
    d = std::min(d, L - d);
    xs.push_back(d * d / (4.0 * t));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 8) fail(ErrorCode::numerical, "envelope fit has fewer than 8 usable points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::numerical, "envelope fit is degenerate");
  EnvelopeFit f;
  f.points = static_cast<int>(xs.size());
  f.slope = sxy / sxx;
  f.lambda_eff = std::clamp(-f.slope * (1.0 + M * M), 0.0, 1.0);
  const double V = std::min(t, std::sqrt(t));
  for (std::size_t k = 0; k < xs.size(); ++k)
    f.K2_est = std::max(f.K2_est, std::exp(ys[k]) * V * std::exp(lambda * xs[k] / (1.0 + M * M)));
  f.pass = std::isfinite(f.K2_est) && f.slope <= -lambda / (1.0 + M * M);
  return f;
}

double duality_defect(const DriftSpec& drift, const ScalarField& f, const ScalarField& g,
                      double T, const AdvDiffOptions& opt) {
  const ScalarField Sf = to_physical(advdiff_run(f, drift, T, {}, {}, opt));
  const ScalarField Sg = to_physical(advdiff_run_adjoint(g, drift, T, opt));
  const double lhs = integral(pointwise_product(Sf, g));
  const double rhs = integral(pointwise_product(f, Sg));
  return std::abs(lhs - rhs) / (l2_norm(f) * l2_norm(g));
}

}  // namespace nscyl
