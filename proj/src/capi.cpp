#include "nscyl.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

#include "nscyl/advdiff.hpp"
#include "nscyl/expkit.hpp"
#include "nscyl/inequalities.hpp"

struct nscyl_grid {
  nscyl::Grid g;
};
struct nscyl_field {
  nscyl::ScalarField f;
};
struct nscyl_state {
  nscyl::FlowState s;
};

namespace {

thread_local std::string g_last_error;

template <class F>
int guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NSCYL_OK;
  } catch (const nscyl::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NSCYL_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NSCYL_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) nscyl::fail(nscyl::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<double> opt(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

nscyl::DriftSpec drift_of(const nscyl_drift* d) {
  need(d, "drift");
  need(d->kind, "drift kind");
  switch (nscyl::drift_kind_from_string(d->kind)) {
    case nscyl::DriftKind::zero: return nscyl::DriftSpec::zero();
    case nscyl::DriftKind::steady_shear_u1: return nscyl::DriftSpec::steady_shear(d->M);
    case nscyl::DriftKind::time_periodic_shear: return nscyl::DriftSpec::time_periodic(d->M, d->Omega);
    case nscyl::DriftKind::from_snapshot:
      need(d->snapshot, "drift snapshot");
      return nscyl::DriftSpec::from_snapshot(
          nscyl::velocity_from_vorticity(nscyl::oscillating_part(d->snapshot->s.omega)));
  }
  nscyl::fail(nscyl::ErrorCode::invalid_argument, "bad drift");
}

double rate_or_nan(const std::optional<nscyl::RateFit>& f) {
  return f ? f->exponent_or_rate : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

extern "C" {

const char* nscyl_last_error(void) { return g_last_error.c_str(); }
const char* nscyl_version(void) { return "1.0.0"; }

void nscyl_string_free(char* s) { std::free(s); }
void nscyl_array_free(double* a) { std::free(a); }

int nscyl_grid_create(int nx, int ny, double lambda, nscyl_grid** out) {
  return guarded([&] {
    need(out, "out");
    *out = new nscyl_grid{nscyl::Grid(nx, ny, lambda)};
  });
}

void nscyl_grid_destroy(nscyl_grid* g) { delete g; }

int nscyl_state_create(const nscyl_grid* g, const char* init_kind, uint64_t seed, double target_Ru,
                       double target_Romega, int band, double c, nscyl_state** out) {
  return guarded([&] {
    need(g, "grid");
    need(init_kind, "init_kind");
    need(out, "out");
    nscyl::InitialDataSpec spec;
    spec.kind = nscyl::init_kind_from_string(init_kind);
    spec.seed = seed;
    spec.target_Ru = opt(target_Ru);
    spec.target_Romega = opt(target_Romega);
    spec.band = band;
    spec.c = c;
    *out = new nscyl_state{nscyl::make_initial_data(spec, g->g)};
  });
}

void nscyl_state_destroy(nscyl_state* s) { delete s; }

int nscyl_state_advance(nscyl_state* s, double t_end) {
  return guarded([&] {
    need(s, "state");
    s->s = nscyl::run(s->s, t_end, {}, {});
  });
}

int nscyl_state_save(const nscyl_state* s, const char* path) {
  return guarded([&] {
    need(s, "state");
    need(path, "path");
    nscyl::write_state(s->s, path);
  });
}

int nscyl_state_load(const char* path, nscyl_state** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nscyl_state{nscyl::read_state(path)};
  });
}

int nscyl_state_info_get(const nscyl_state* s, nscyl_state_info* out) {
  return guarded([&] {
    need(s, "state");
    need(out, "out");
    const auto n = nscyl::sup_norms_and_reynolds(s->s);
    *out = {s->s.t, n.sup_u, n.sup_omega, n.sup_uhat, nscyl::total_energy(s->s), s->s.m_mean, s->s.c};
  });
}

int nscyl_simulate(const char* config_text, nscyl_sim_summary* out) {
  return guarded([&] {
    need(config_text, "config");
    need(out, "out");
    const auto r = nscyl::run_simulation(nscyl::parse_config(config_text));
    nscyl_sim_summary o{};
    o.t_final = r.t_final;
    o.steps = r.steps;
    o.records = r.records;
    o.max_principle_violations = r.max_principle_violations;
    o.energy_violations = r.energy_violations;
    o.max_m_mean_drift = r.max_m_mean_drift;
    o.slack_de_sq_vs_2ed = r.worst_slack.de_sq_vs_2ed;
    o.slack_eps_vs_d = r.worst_slack.eps_vs_d;
    o.slack_ehat_vs_dhat = r.worst_slack.ehat_vs_dhat;
    o.slack_ghat_vs_kappa_dhat = r.worst_slack.ghat_vs_kappa_dhat;
    o.max_residual_energy = r.max_residual_energy;
    o.max_residual_enstrophy = r.max_residual_enstrophy;
    o.max_residual_oscillatory = r.max_residual_oscillatory;
    o.C3_used = r.C3_used;
    o.C3_from_ledger = r.C3_from_ledger;
    const auto& th = r.theorem;
    o.zero_case = th.zero_case;
    o.M = th.M;
    o.e_star0 = th.e_star0;
    o.velocity_ratio = th.velocity_ratio;
    o.vorticity_decay_ratio = th.vorticity_decay_ratio;
    o.late_growth_ratio = th.late_growth_ratio;
    for (const auto& row : th.localized) {
      o.max_localized_energy_ratio = std::max(o.max_localized_energy_ratio, row.energy_ratio);
      o.max_localized_enstrophy_ratio = std::max(o.max_localized_enstrophy_ratio, row.enstrophy_ratio);
    }
    o.kappa = th.kappa;
    o.ul2_rate = rate_or_nan(th.ul2_fit);
    o.uhat_sup_rate = rate_or_nan(th.uhat_sup_fit);
    o.forcing_rate = rate_or_nan(th.forcing_fit);
    o.smoothing_ratio = th.smoothing_ratio.value_or(std::numeric_limits<double>::quiet_NaN());
    o.C3_empirical = r.flux.C3.max_ratio;
    o.C4_empirical = r.flux.C4.max_ratio;
    o.C8_empirical = r.flux.C8.max_ratio;
    o.g_hat_excess = r.flux.g_hat_excess;
    o.invariants_pass = r.invariants_pass;
    *out = o;
  });
}

int nscyl_config_normalize(const char* config_text, char** out) {
  return guarded([&] {
    need(config_text, "config");
    need(out, "out");
    *out = dup_string(nscyl::serialize_config(nscyl::parse_config(config_text)));
  });
}

int nscyl_kernel(double x1, double x2, double out[3]) {
  return guarded([&] {
    need(out, "out");
    const double K = nscyl::kernel_K(x1, x2);
    const auto g = nscyl::kernel_perp_grad(x1, x2);
    out[0] = K;
    out[1] = g[0];
    out[2] = g[1];
  });
}

int nscyl_fit_rate(const double* t, const double* v, size_t n, double t_lo, double t_hi, int model,
                   nscyl_rate_fit* out) {
  return guarded([&] {
    need(t, "t");
    need(v, "v");
    need(out, "out");
    if (model != 0 && model != 1) nscyl::fail(nscyl::ErrorCode::invalid_argument, "model must be 0 or 1");
    std::vector<std::pair<double, double>> series;
    for (size_t k = 0; k < n; ++k) series.emplace_back(t[k], v[k]);
    const auto r = nscyl::fit_decay_rate(series, t_lo, t_hi,
                                         model == 0 ? nscyl::RateModel::power : nscyl::RateModel::exponential);
    *out = {r.exponent_or_rate, r.log_prefactor, r.samples, r.rms_log_residual};
  });
}

int nscyl_csv_column(const char* path, const char* column, double** values, size_t* n) {
  return guarded([&] {
    need(path, "path");
    need(column, "column");
    need(values, "values");
    need(n, "n");
    const auto rows = nscyl::read_csv_records(path);
    const auto& cols = nscyl::kCsvColumns;
    std::size_t idx = cols.size();
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] == column) idx = k;
    if (idx == cols.size()) nscyl::fail(nscyl::ErrorCode::invalid_argument, std::string("unknown column '") + column + "'");
    double* buf = static_cast<double*>(std::malloc(std::max<std::size_t>(1, rows.size()) * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& x = rows[r];
      const double all[] = {x.t,       x.sup_u,    x.sup_omega, x.sup_uhat,        x.E_rho,              x.D_rho,
                            x.Ens_rho, x.EnsD_rho, x.ul2_uhat,  x.residual_energy, x.residual_enstrophy, x.residual_oscillatory};
      buf[r] = all[idx];
    }
    *values = buf;
    *n = rows.size();
  });
}

int nscyl_gaussian(const nscyl_grid* g, double y1, double y2, double sigma0, nscyl_field** out) {
  return guarded([&] {
    need(g, "grid");
    need(out, "out");
    *out = new nscyl_field{nscyl::normalized_gaussian(g->g, {y1, y2}, sigma0)};
  });
}

int nscyl_fundamental_solution(const nscyl_grid* g, const nscyl_drift* drift, double y1, double y2,
                               double t, double sigma0, nscyl_field** out) {
  return guarded([&] {
    need(g, "grid");
    need(out, "out");
    *out = new nscyl_field{nscyl::fundamental_solution(drift_of(drift), g->g, {y1, y2}, t, sigma0)};
  });
}

void nscyl_field_destroy(nscyl_field* f) { delete f; }

int nscyl_field_stats_get(const nscyl_field* f, nscyl_field_stats* out) {
  return guarded([&] {
    need(f, "field");
    need(out, "out");
    const auto p = nscyl::as_physical(f->f);
    double mn = std::numeric_limits<double>::infinity();
    for (double v : p.values()) mn = std::min(mn, v);
    *out = {nscyl::sup_norm(p), mn, nscyl::integral(p)};
  });
}

int nscyl_envelope(const nscyl_field* gamma, double y1, double y2, double t, double M, double lambda,
                   nscyl_envelope_fit* out) {
  return guarded([&] {
    need(gamma, "gamma");
    need(out, "out");
    const auto r = nscyl::check_gaussian_envelope(gamma->f, {y1, y2}, t, M, lambda);
    *out = {r.K2_est, r.slope, r.lambda_eff, r.points, r.pass};
  });
}

int nscyl_lp_lq(const nscyl_field* omega0, const nscyl_drift* drift, double p, double q,
                const double* times, size_t n, double* ratios_out, double* K1_out) {
  return guarded([&] {
    need(omega0, "omega0");
    need(times, "times");
    need(ratios_out, "ratios_out");
    const auto r = nscyl::check_lp_lq(drift_of(drift), omega0->f, p, q, std::vector<double>(times, times + n));
    for (size_t k = 0; k < n; ++k) ratios_out[k] = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [t, v] : r.ratios)
      for (size_t k = 0; k < n; ++k)
        if (times[k] == t) ratios_out[k] = v;
    if (K1_out) *K1_out = r.K1;
  });
}

int nscyl_verify_inequalities(const nscyl_grid* g, int count, uint64_t seed, const char* csv_path,
                              nscyl_inequality_summary* out) {
  return guarded([&] {
    need(g, "grid");
    need(out, "out");
    const auto r = nscyl::nash_suite(g->g, count, seed);
    const auto p = nscyl::poincare_suite(g->g, std::max(1, count / 10), seed);
    if (csv_path) {
      std::ofstream f(csv_path, std::ios::trunc);
      if (!f) nscyl::fail(nscyl::ErrorCode::io, std::string("cannot write '") + csv_path + "'");
      f << "family,seed,l2,l1,grad_l2,branch1,branch2,ratio,dominant_branch,psi_C\n";
      f.precision(17);
      for (const auto& s : r.samples)
        f << nscyl::to_string(s.family) << "," << s.seed << "," << s.result.lhs << "," << s.result.l1 << ","
          << s.result.grad_l2 << "," << s.result.rhs_branch1 << "," << s.result.rhs_branch2 << ","
          << s.result.ratio << "," << s.result.dominant_branch << "," << s.psi_C << "\n";
      if (!f) nscyl::fail(nscyl::ErrorCode::io, std::string("write failed for '") + csv_path + "'");
    }
    *out = {r.nash.samples,     r.nash.max_ratio,    r.max_first_half,      r.max_second_half,
            r.branch1_dominant, r.branch2_dominant,  r.psi.min_ratio,       r.psi_identity_defect,
            p.samples,          p.max_ratio,         p.first_mode_defect};
  });
}

int nscyl_nondimensionalize(double u_phys, double omega_phys, double nu, double L, double out[3]) {
  return guarded([&] {
    need(out, "out");
    const auto d = nscyl::nondimensionalize(u_phys, omega_phys, nu, L);
    out[0] = d.R_u;
    out[1] = d.R_omega;
    out[2] = d.time_scale;
  });
}

int nscyl_report(const char* csv_path, const char* ledger_path, double lambda, char** out) {
  return guarded([&] {
    need(csv_path, "csv_path");
    need(ledger_path, "ledger_path");
    need(out, "out");
    *out = dup_string(nscyl::make_report(csv_path, ledger_path, lambda));
  });
}

int nscyl_ledger_set(const char* path, const char* name, double value, const char* grid, double lambda) {
  return guarded([&] {
    need(path, "path");
    need(name, "name");
    auto L = nscyl::ConstantsLedger::load(path);
    nscyl::EstimatedConstant c;
    c.name = name;
    c.value = value;
    c.grid = grid ? grid : "";
    c.lambda = lambda;
    L.set(c);
    L.save(path);
  });
}

}  // extern "C"
