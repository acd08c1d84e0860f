#ifndef NSCYL_H
#define NSCYL_H

#include <stddef.h>
#include <stdint.h>

#if defined(NSCYL_BUILDING)
#define NSCYL_API __attribute__((visibility("default")))
#else
#define NSCYL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning int returns one of these. */
enum {
  NSCYL_OK = 0,
  NSCYL_INVALID_ARGUMENT = 1,
  NSCYL_DOMAIN = 2,
  NSCYL_IO = 3,
  NSCYL_NUMERICAL = 4,
  NSCYL_CHECK_FAILED = 5,
  NSCYL_INTERNAL = 6
};

typedef struct nscyl_grid nscyl_grid;
typedef struct nscyl_field nscyl_field;
typedef struct nscyl_state nscyl_state;

/* Message of the last failure on this thread ("" if none). */
NSCYL_API const char* nscyl_last_error(void);
NSCYL_API const char* nscyl_version(void);

NSCYL_API void nscyl_string_free(char* s);
NSCYL_API void nscyl_array_free(double* a);

/* Grid */
NSCYL_API int nscyl_grid_create(int nx, int ny, double lambda, nscyl_grid** out);
NSCYL_API void nscyl_grid_destroy(nscyl_grid* g);

/* Flow states. NaN targets mean "natural value of the kind". */
NSCYL_API int nscyl_state_create(const nscyl_grid* g, const char* init_kind, uint64_t seed,
                                 double target_Ru, double target_Romega, int band, double c,
                                 nscyl_state** out);
NSCYL_API void nscyl_state_destroy(nscyl_state* s);
NSCYL_API int nscyl_state_advance(nscyl_state* s, double t_end);
NSCYL_API int nscyl_state_save(const nscyl_state* s, const char* path);
NSCYL_API int nscyl_state_load(const char* path, nscyl_state** out);

typedef struct {
  double t;
  double sup_u;
  double sup_omega;
  double sup_uhat;
  double energy;
  double m_mean;
  double c;
} nscyl_state_info;

NSCYL_API int nscyl_state_info_get(const nscyl_state* s, nscyl_state_info* out);

/* Configured simulation */
typedef struct {
  double t_final;
  int steps;
  int records;
  int max_principle_violations;
  int energy_violations;
  double max_m_mean_drift;
  double slack_de_sq_vs_2ed;
  double slack_eps_vs_d;
  double slack_ehat_vs_dhat;
  double slack_ghat_vs_kappa_dhat;
  double max_residual_energy;
  double max_residual_enstrophy;
  double max_residual_oscillatory;
  double C3_used;
  int C3_from_ledger;
  int zero_case;
  double M;
  double e_star0;
  double velocity_ratio;
  double vorticity_decay_ratio;
  double late_growth_ratio;
  double max_localized_energy_ratio;
  double max_localized_enstrophy_ratio;
  double kappa;
  double ul2_rate;       /* NaN when no fit */
  double uhat_sup_rate;  /* NaN when no fit */
  double forcing_rate;   /* NaN when no fit */
  double smoothing_ratio; /* NaN when unavailable */
  double C3_empirical;
  double C4_empirical;
  double C8_empirical;
  double g_hat_excess;
  int invariants_pass;
} nscyl_sim_summary;

/* Parses a key = value configuration text and runs it. */
NSCYL_API int nscyl_simulate(const char* config_text, nscyl_sim_summary* out);
/* Validates a configuration and returns its normalized serialization. */
NSCYL_API int nscyl_config_normalize(const char* config_text, char** out);

/* Periodic Biot-Savart kernel: out = {K, (grad K)^perp_1, (grad K)^perp_2}. */
NSCYL_API int nscyl_kernel(double x1, double x2, double out[3]);

/* Decay fits. model: 0 power, 1 exponential. */
typedef struct {
  double exponent_or_rate;
  double log_prefactor;
  int samples;
  double rms_log_residual;
} nscyl_rate_fit;

NSCYL_API int nscyl_fit_rate(const double* t, const double* v, size_t n, double t_lo,
                             double t_hi, int model, nscyl_rate_fit* out);
/* Reads one named column of a diagnostics CSV. Free with nscyl_array_free. */
NSCYL_API int nscyl_csv_column(const char* path, const char* column, double** values, size_t* n);

/* Advection-diffusion. kind: "zero", "steady_shear_u1", "time_periodic_shear",
   "from_snapshot" (uses the oscillating velocity of snapshot). */
typedef struct {
  const char* kind;
  double M;
  double Omega;
  const nscyl_state* snapshot;
} nscyl_drift;

NSCYL_API int nscyl_gaussian(const nscyl_grid* g, double y1, double y2, double sigma0,
                             nscyl_field** out);
NSCYL_API int nscyl_fundamental_solution(const nscyl_grid* g, const nscyl_drift* drift, double y1,
                                         double y2, double t, double sigma0, nscyl_field** out);
NSCYL_API void nscyl_field_destroy(nscyl_field* f);

typedef struct {
  double sup;
  double min;
  double mass;
} nscyl_field_stats;

NSCYL_API int nscyl_field_stats_get(const nscyl_field* f, nscyl_field_stats* out);

typedef struct {
  double K2_est;
  double slope;
  double lambda_eff;
  int points;
  int pass;
} nscyl_envelope_fit;

NSCYL_API int nscyl_envelope(const nscyl_field* gamma, double y1, double y2, double t, double M,
                             double lambda, nscyl_envelope_fit* out);
/* ratios_out has n entries; p or q may be INFINITY. */
NSCYL_API int nscyl_lp_lq(const nscyl_field* omega0, const nscyl_drift* drift, double p, double q,
                          const double* times, size_t n, double* ratios_out, double* K1_out);

/* Functional inequalities */
typedef struct {
  int samples;
  double nash_max;
  double nash_max_first_half;
  double nash_max_second_half;
  int branch1_dominant;
  int branch2_dominant;
  double psi_C_min;
  double psi_identity_defect;
  int poincare_samples;
  double poincare_max;
  double poincare_first_mode_defect;
} nscyl_inequality_summary;

/* Runs the Nash and Poincare suites; per-sample rows go to csv_path when non-NULL. */
NSCYL_API int nscyl_verify_inequalities(const nscyl_grid* g, int count, uint64_t seed,
                                        const char* csv_path, nscyl_inequality_summary* out);

/* Units: out = {R_u, R_omega, time_scale}. */
NSCYL_API int nscyl_nondimensionalize(double u_phys, double omega_phys, double nu, double L,
                                      double out[3]);

/* Report and constants ledger */
NSCYL_API int nscyl_report(const char* csv_path, const char* ledger_path, double lambda,
                           char** out);
NSCYL_API int nscyl_ledger_set(const char* path, const char* name, double value,
                               const char* grid, double lambda);

#ifdef __cplusplus
}
#endif

#endif
