#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nscyl.h"

namespace {

constexpr int kExitCheckFailed = 2;

int report_error(int status, const char* what) {
  std::fprintf(stderr, "nscyl %s: %s (status %d)\n", what, nscyl_last_error(), status);
  return status == NSCYL_INVALID_ARGUMENT ? 64 : 70;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_pq(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

void kv(const char* k, double v) { std::printf("%-30s %.10g\n", k, v); }

struct GridArgs {
  int nx = 256;
  int ny = 32;
  double lambda = 16.0;
};

void add_grid(CLI::App* c, GridArgs& g) {
  c->add_option("--nx", g.nx, "points in x1")->capture_default_str();
  c->add_option("--ny", g.ny, "points in x2")->capture_default_str();
  c->add_option("--lambda", g.lambda, "box length in x1")->capture_default_str();
}

struct GridHandle {
  nscyl_grid* g = nullptr;
  ~GridHandle() { nscyl_grid_destroy(g); }
};

struct FieldHandle {
  nscyl_field* f = nullptr;
  ~FieldHandle() { nscyl_field_destroy(f); }
};

struct StateHandle {
  nscyl_state* s = nullptr;
  ~StateHandle() { nscyl_state_destroy(s); }
};

int cmd_simulate(const std::string& config, bool check, bool dry_run) {
  const std::string text = slurp(config);
  if (dry_run) {
    char* norm = nullptr;
    if (int st = nscyl_config_normalize(text.c_str(), &norm)) return report_error(st, "simulate");
    std::fputs(norm, stdout);
    nscyl_string_free(norm);
    return 0;
  }
  nscyl_sim_summary s{};
  if (int st = nscyl_simulate(text.c_str(), &s)) return report_error(st, "simulate");
  kv("t_final", s.t_final);
  kv("steps", s.steps);
  kv("records", s.records);
  kv("max_principle_violations", s.max_principle_violations);
  kv("energy_violations", s.energy_violations);
  kv("max_m_mean_drift", s.max_m_mean_drift);
  kv("slack_de_sq_vs_2ed", s.slack_de_sq_vs_2ed);
  kv("slack_eps_vs_d", s.slack_eps_vs_d);
  kv("slack_ehat_vs_dhat", s.slack_ehat_vs_dhat);
  kv("slack_ghat_vs_kappa_dhat", s.slack_ghat_vs_kappa_dhat);
  kv("max_residual_energy", s.max_residual_energy);
  kv("max_residual_enstrophy", s.max_residual_enstrophy);
  kv("max_residual_oscillatory", s.max_residual_oscillatory);
  kv("C3_used", s.C3_used);
  kv("C3_from_ledger", s.C3_from_ledger);
  kv("zero_case", s.zero_case);
  kv("M", s.M);
  kv("e_star0", s.e_star0);
  kv("velocity_ratio", s.velocity_ratio);
  kv("vorticity_decay_ratio", s.vorticity_decay_ratio);
  kv("late_growth_ratio", s.late_growth_ratio);
  kv("max_localized_energy_ratio", s.max_localized_energy_ratio);
  kv("max_localized_enstrophy_ratio", s.max_localized_enstrophy_ratio);
  kv("kappa", s.kappa);
  kv("ul2_rate", s.ul2_rate);
  kv("uhat_sup_rate", s.uhat_sup_rate);
  kv("forcing_rate", s.forcing_rate);
  kv("smoothing_ratio", s.smoothing_ratio);
  kv("C3_empirical", s.C3_empirical);
  kv("C4_empirical", s.C4_empirical);
  kv("C8_empirical", s.C8_empirical);
  kv("g_hat_excess", s.g_hat_excess);
  kv("invariants_pass", s.invariants_pass);
  if (check && !s.invariants_pass) {
    std::fprintf(stderr, "simulate: invariant checks failed\n");
    return kExitCheckFailed;
  }
  return 0;
}

struct AdvArgs {
  GridArgs grid;
  std::string drift = "zero";
  double M = 1.0;
  double Omega = 1.0;
  std::string snapshot;
  double y1 = -1.0;
  double y2 = 0.5;
  double sigma0 = 0.0;
  std::vector<double> times{0.5, 1.0, 2.0};
  std::string p = "1";
  std::string q = "inf";
  double envelope_lambda = 0.9;
  bool envelope = false;
  std::string csv;
  bool check = false;
};

int cmd_advdiff(const AdvArgs& a) {
  GridHandle g;
  if (int st = nscyl_grid_create(a.grid.nx, a.grid.ny, a.grid.lambda, &g.g)) return report_error(st, "advdiff");
  StateHandle snap;
  if (!a.snapshot.empty())
    if (int st = nscyl_state_load(a.snapshot.c_str(), &snap.s)) return report_error(st, "advdiff");
  const nscyl_drift d{a.drift.c_str(), a.M, a.Omega, snap.s};
  const double y1 = a.y1 < 0 ? 0.5 * a.grid.lambda : a.y1;
  const double dx = a.grid.lambda / a.grid.nx, dy = 1.0 / a.grid.ny;
  const double sigma0 = a.sigma0 > 0 ? a.sigma0 : 3.0 * std::max(dx, dy);

  FieldHandle g0;
  if (int st = nscyl_gaussian(g.g, y1, a.y2, sigma0, &g0.f)) return report_error(st, "advdiff");
  std::vector<double> ratios(a.times.size());
  double K1 = 0;
  if (int st = nscyl_lp_lq(g0.f, &d, parse_pq(a.p), parse_pq(a.q), a.times.data(), a.times.size(),
                           ratios.data(), &K1))
    return report_error(st, "advdiff");

  std::FILE* out = stdout;
  if (!a.csv.empty()) {
    out = std::fopen(a.csv.c_str(), "w");
    if (!out) {
      std::fprintf(stderr, "advdiff: cannot write '%s'\n", a.csv.c_str());
      return 70;
    }
  }
  std::fprintf(out, "t,lp_lq_ratio,sup,mass,min,K2_est,slope,lambda_eff,points,envelope_pass\n");
  bool ok = std::isfinite(K1);
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    std::fprintf(out, "%.10g,%.10g", a.times[k], ratios[k]);
    ok = ok && std::isfinite(ratios[k]);
    if (a.envelope) {
      FieldHandle gam;
      if (int st = nscyl_fundamental_solution(g.g, &d, y1, a.y2, a.times[k], sigma0, &gam.f)) {
        if (out != stdout) std::fclose(out);
        return report_error(st, "advdiff");
      }
      nscyl_field_stats fs{};
      nscyl_field_stats_get(gam.f, &fs);
      nscyl_envelope_fit e{};
      if (int st = nscyl_envelope(gam.f, y1, a.y2, a.times[k], a.M, a.envelope_lambda, &e)) {
        if (out != stdout) std::fclose(out);
        return report_error(st, "advdiff");
      }
      std::fprintf(out, ",%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d,%d\n", fs.sup, fs.mass, fs.min, e.K2_est,
                   e.slope, e.lambda_eff, e.points, e.pass);
      ok = ok && e.pass;
    } else {
      std::fprintf(out, ",,,,,,,,\n");
    }
  }
  if (out != stdout) std::fclose(out);
  std::printf("K1 %.10g\n", K1);
  if (a.check && !ok) {
    std::fprintf(stderr, "advdiff: checks failed\n");
    return kExitCheckFailed;
  }
  return 0;
}

int cmd_inequalities(const GridArgs& ga, int count, std::uint64_t seed, const std::string& csv, bool check) {
  GridHandle g;
  if (int st = nscyl_grid_create(ga.nx, ga.ny, ga.lambda, &g.g)) return report_error(st, "verify-inequalities");
  nscyl_inequality_summary s{};
  if (int st = nscyl_verify_inequalities(g.g, count, seed, csv.empty() ? nullptr : csv.c_str(), &s))
    return report_error(st, "verify-inequalities");
  kv("samples", s.samples);
  kv("nash_max", s.nash_max);
  kv("nash_max_first_half", s.nash_max_first_half);
  kv("nash_max_second_half", s.nash_max_second_half);
  kv("branch1_dominant", s.branch1_dominant);
  kv("branch2_dominant", s.branch2_dominant);
  kv("psi_C_min", s.psi_C_min);
  kv("psi_identity_defect", s.psi_identity_defect);
  kv("poincare_samples", s.poincare_samples);
  kv("poincare_max", s.poincare_max);
  kv("poincare_first_mode_defect", s.poincare_first_mode_defect);
  const double hi = std::max(s.nash_max_first_half, s.nash_max_second_half);
  const double lo = std::min(s.nash_max_first_half, s.nash_max_second_half);
  const bool ok = std::isfinite(s.nash_max) && lo > 0 && hi / lo - 1 <= 0.15 && s.poincare_max <= 1 + 1e-12 &&
                  s.poincare_first_mode_defect <= 1e-12 && s.psi_identity_defect <= 1e-10;
  if (check && !ok) {
    std::fprintf(stderr, "verify-inequalities: checks failed\n");
    return kExitCheckFailed;
  }
  return 0;
}

int cmd_kernel_table(double x1_min, double x1_max, int n1, int n2, const std::string& csv) {
  std::FILE* out = csv.empty() ? stdout : std::fopen(csv.c_str(), "w");
  if (!out) {
    std::fprintf(stderr, "kernel-table: cannot write '%s'\n", csv.c_str());
    return 70;
  }
  std::fprintf(out, "x1,x2,K,perp_grad_1,perp_grad_2\n");
  for (int i = 0; i < n1; ++i) {
    const double x1 = n1 == 1 ? x1_min : x1_min + (x1_max - x1_min) * i / (n1 - 1);
    for (int j = 0; j < n2; ++j) {
      const double x2 = static_cast<double>(j) / n2;
      double k[3];
      const int st = nscyl_kernel(x1, x2, k);
      if (st == NSCYL_DOMAIN) {
        k[0] = k[1] = k[2] = std::numeric_limits<double>::quiet_NaN();
      } else if (st) {
        if (out != stdout) std::fclose(out);
        return report_error(st, "kernel-table");
      }
      std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x1, x2, k[0], k[1], k[2]);
    }
  }
  if (out != stdout) std::fclose(out);
  return 0;
}

int cmd_fit_rates(const std::string& csv, const std::string& column, double lo, double hi,
                  const std::string& model, double min_rate) {
  double* t = nullptr;
  double* v = nullptr;
  size_t n = 0, m = 0;
  if (int st = nscyl_csv_column(csv.c_str(), "t", &t, &n)) return report_error(st, "fit-rates");
  if (int st = nscyl_csv_column(csv.c_str(), column.c_str(), &v, &m)) {
    nscyl_array_free(t);
    return report_error(st, "fit-rates");
  }
  nscyl_rate_fit f{};
  const int st = nscyl_fit_rate(t, v, n, lo, hi, model == "power" ? 0 : 1, &f);
  nscyl_array_free(t);
  nscyl_array_free(v);
  if (st) return report_error(st, "fit-rates");
  std::printf("column %s model %s window [%g, %g]\n", column.c_str(), model.c_str(), lo, hi);
  kv(model == "power" ? "exponent" : "rate", f.exponent_or_rate);
  kv("log_prefactor", f.log_prefactor);
  kv("samples", f.samples);
  kv("rms_log_residual", f.rms_log_residual);
  const double decay = model == "power" ? -f.exponent_or_rate : f.exponent_or_rate;
  if (std::isfinite(min_rate) && !(decay >= min_rate)) {
    std::fprintf(stderr, "fit-rates: decay %g below required %g\n", decay, min_rate);
    return kExitCheckFailed;
  }
  return 0;
}

int cmd_report(const std::string& csv, const std::string& ledger, double lambda,
               const std::vector<std::string>& set) {
  if (!set.empty()) {
    if (set.size() % 2) {
      std::fprintf(stderr, "report: --set takes NAME VALUE pairs\n");
      return 64;
    }
    for (std::size_t k = 0; k < set.size(); k += 2)
      if (int st = nscyl_ledger_set(ledger.c_str(), set[k].c_str(), std::stod(set[k + 1]), "", lambda))
        return report_error(st, "report");
  }
  char* json = nullptr;
  if (int st = nscyl_report(csv.c_str(), ledger.c_str(), lambda, &json)) return report_error(st, "report");
  std::puts(json);
  nscyl_string_free(json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Navier-Stokes on a long periodic channel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nscyl_version()));

  std::string config;
  bool sim_check = false, dry_run = false;
  auto* sim = app.add_subcommand("simulate", "run a configured simulation");
  sim->add_option("config", config, "key = value configuration file")->required()->check(CLI::ExistingFile);
  sim->add_flag("--check", sim_check, "exit nonzero unless the invariant checks pass");
  sim->add_flag("--dry-run", dry_run, "print the normalized configuration and stop");

  AdvArgs adv;
  auto* ad = app.add_subcommand("advdiff", "linear advection-diffusion experiments");
  add_grid(ad, adv.grid);
  ad->add_option("--drift", adv.drift, "zero | steady_shear_u1 | time_periodic_shear | from_snapshot")
      ->capture_default_str();
  ad->add_option("--M", adv.M, "drift amplitude")->capture_default_str();
  ad->add_option("--Omega", adv.Omega, "drift frequency")->capture_default_str();
  ad->add_option("--snapshot", adv.snapshot, "state file for from_snapshot")->check(CLI::ExistingFile);
  ad->add_option("--y1", adv.y1, "source x1 (default: box center)");
  ad->add_option("--y2", adv.y2, "source x2")->capture_default_str();
  ad->add_option("--sigma0", adv.sigma0, "initial Gaussian width (default: 3 grid spacings)");
  ad->add_option("--times", adv.times, "output times")->delimiter(',')->capture_default_str();
  ad->add_option("--p", adv.p, "source exponent")->capture_default_str();
  ad->add_option("--q", adv.q, "target exponent ('inf' allowed)")->capture_default_str();
  ad->add_flag("--envelope", adv.envelope, "fit the Gaussian envelope at every time");
  ad->add_option("--envelope-lambda", adv.envelope_lambda, "envelope exponent in (0,1)")->capture_default_str();
  ad->add_option("--csv", adv.csv, "output CSV (default: stdout)");
  ad->add_flag("--check", adv.check, "exit nonzero if a ratio is non-finite or an envelope fit fails");

  GridArgs ineq_grid{128, 64, 16.0};
  int count = 1000;
  std::uint64_t seed = 1;
  std::string ineq_csv;
  bool ineq_check = false;
  auto* iq = app.add_subcommand("verify-inequalities", "sample the Nash and Poincare inequalities");
  add_grid(iq, ineq_grid);
  iq->add_option("--count", count, "number of Nash samples")->capture_default_str()->check(CLI::PositiveNumber);
  iq->add_option("--seed", seed, "first seed")->capture_default_str();
  iq->add_option("--csv", ineq_csv, "per-sample CSV");
  iq->add_flag("--check", ineq_check, "exit nonzero unless the suites are consistent");

  double x1_min = -4, x1_max = 4;
  int n1 = 81, n2 = 32;
  std::string kt_csv;
  auto* kt = app.add_subcommand("kernel-table", "tabulate the periodic Biot-Savart kernel");
  kt->add_option("--x1-min", x1_min)->capture_default_str();
  kt->add_option("--x1-max", x1_max)->capture_default_str();
  kt->add_option("--n1", n1, "samples in x1")->capture_default_str()->check(CLI::PositiveNumber);
  kt->add_option("--n2", n2, "samples in x2 over [0,1)")->capture_default_str()->check(CLI::PositiveNumber);
  kt->add_option("--csv", kt_csv, "output CSV (default: stdout)");

  std::string fr_csv, column = "sup_omega", model = "power";
  double lo = 1.0, hi = 1e300, min_rate = std::numeric_limits<double>::quiet_NaN();
  auto* fr = app.add_subcommand("fit-rates", "fit a decay law to a diagnostics column");
  fr->add_option("csv", fr_csv, "diagnostics CSV")->required()->check(CLI::ExistingFile);
  fr->add_option("--column", column)->capture_default_str();
  fr->add_option("--t-lo", lo)->capture_default_str();
  fr->add_option("--t-hi", hi);
  fr->add_option("--model", model)->check(CLI::IsMember({"power", "exp"}))->capture_default_str();
  fr->add_option("--min-decay", min_rate,
                 "exit nonzero when the decay (minus the exponent, or the rate) is below this");

  std::string rp_csv, ledger = "constants.json";
  double rp_lambda = 16.0;
  std::vector<std::string> set;
  auto* rp = app.add_subcommand("report", "summarize a diagnostics CSV and the constants ledger");
  rp->add_option("csv", rp_csv, "diagnostics CSV")->required()->check(CLI::ExistingFile);
  rp->add_option("--ledger", ledger)->capture_default_str();
  rp->add_option("--lambda", rp_lambda)->capture_default_str();
  rp->add_option("--set", set, "NAME VALUE pairs to record in the ledger first")->expected(2, -1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(config, sim_check, dry_run);
    if (*ad) return cmd_advdiff(adv);
    if (*iq) return cmd_inequalities(ineq_grid, count, seed, ineq_csv, ineq_check);
    if (*kt) return cmd_kernel_table(x1_min, x1_max, n1, n2, kt_csv);
    if (*fr) return cmd_fit_rates(fr_csv, column, lo, hi, model, min_rate);
    if (*rp) return cmd_report(rp_csv, ledger, rp_lambda, set);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nscyl: %s\n", e.what());
    return 70;
  }
  return 0;
}
