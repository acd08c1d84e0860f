#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nscyl/diagnostics.hpp"
#include "nscyl/inequalities.hpp"

namespace nscyl {

/// Flat key = value run configuration. Only init_kind is required.
struct RunConfig {
  int nx = 128;
  int ny = 32;
  double lambda = 16.0;

  double t_end = 1.0;
  double dt_acc = 1e-3;
  double safety = 0.5;
  /// Uniform diagnostics spacing; ignored when diag_times is non-empty.
  double diag_dt = 0.1;
  std::vector<double> diag_times;

  InitKind init_kind = InitKind::random_bandlimited;
  std::uint64_t seed = 1;
  std::optional<double> target_Ru;
  std::optional<double> target_Romega;
  int band = 2;
  double c = 0.0;

  std::vector<double> rho_list{0.25};
  /// Unset: argmax of e at t = 0.
  std::optional<double> center;
  std::optional<double> fit_t_lo;
  std::optional<double> fit_t_hi;
  double laminar_t_lo = 0.05;
  double laminar_t_hi = 0.5;
  double envelope_lambda = 0.9;
  double probe_dt = 1e-4;
  double tau = 0.1;
  std::vector<double> T_list{1.0, 4.0, 16.0};

  std::optional<double> nu;
  std::optional<double> L_phys;
  std::optional<double> rho_density;

  std::string csv_path = "diagnostics.csv";
  std::string snapshot_prefix;
  std::string ledger_path = "constants.json";

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Diagnostics times in (0, t_end]: diag_times, or multiples of diag_dt.
std::vector<double> diag_schedule(const RunConfig& cfg);
Grid grid_of(const RunConfig& cfg);
InitialDataSpec initial_data_of(const RunConfig& cfg);

struct Dimensionless {
  double R_u = 0.0;
  double R_omega = 0.0;
  double time_scale = 0.0;
};

/// R_u = L u / nu, R_omega = L^2 omega / nu, time_scale = L^2 / nu.
Dimensionless nondimensionalize(double u_phys, double omega_phys, double nu, double L);

struct PhysicalScales {
  double u_phys = 0.0;
  double omega_phys = 0.0;
  double time_scale = 0.0;
};
PhysicalScales dimensionalize(double R_u, double R_omega, double nu, double L);

extern const std::vector<std::string> kCsvColumns;

void write_csv_records(const std::vector<DiagnosticsRecord>& records, const std::string& path);
std::vector<DiagnosticsRecord> read_csv_records(const std::string& path);

/// Raw little-endian float64 data at path, key = value sidecar at path + ".meta".
void write_field(const ScalarField& f, const std::string& path, double t);
ScalarField read_field(const std::string& path, double* t = nullptr);

/// Field snapshot of omega plus c, m_mean, m0_norm in the sidecar.
void write_state(const FlowState& s, const std::string& path);
FlowState read_state(const std::string& path);

struct EstimatedConstant {
  std::string name;
  double value = 0.0;
  std::string grid;
  double lambda = 0.0;
  std::vector<std::uint64_t> seeds;
  std::string date;
};

/// Single JSON file of empirical constants keyed by name.
class ConstantsLedger {
 public:
  /// Missing file gives an empty ledger.
  static ConstantsLedger load(const std::string& path);
  void save(const std::string& path) const;
  /// Value must be finite and positive; an empty date is filled with today's.
  void set(EstimatedConstant c);
  std::optional<EstimatedConstant> get(const std::string& name) const;
  const std::map<std::string, EstimatedConstant>& entries() const { return entries_; }

 private:
  std::map<std::string, EstimatedConstant> entries_;
};

std::string today_utc();

struct SimulationSummary {
  double t_final = 0.0;
  int steps = 0;
  int records = 0;
  int max_principle_violations = 0;
  int energy_violations = 0;
  double max_m_mean_drift = 0.0;
  /// Componentwise worst pointwise slack over all diagnostics times.
  PointwiseSlack worst_slack;
  double max_residual_energy = 0.0;
  double max_residual_enstrophy = 0.0;
  double max_residual_oscillatory = 0.0;
  double C3_used = 1.0;
  bool C3_from_ledger = false;
  TheoremReport theorem;
  FluxConstants flux;
  /// Max principle (1e-8 relative per step), energy monotonicity,
  /// m_mean drift <= 1e-12 and pointwise slack <= 1e-8.
  bool invariants_pass = false;
};

/// Runs a configured simulation: CSV rows at t = 0 and every diagnostics
/// time (one file per rho; extra files get a _rho<k> suffix), optional
/// snapshots, invariant tracking and the theorem-level checks.
SimulationSummary run_simulation(const RunConfig& cfg);

/// JSON summary of a diagnostics CSV (row count, residual maxima, decay
/// fits when enough rows fall in the windows) plus the constants ledger.
std::string make_report(const std::string& csv_path, const std::string& ledger_path,
                        double lambda);

}  // namespace nscyl
