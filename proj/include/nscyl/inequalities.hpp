#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nscyl/diagnostics.hpp"

namespace nscyl {

struct InequalityReport {
  std::string name;
  int samples = 0;
  /// Points dropped because a denominator fell below 1e-14.
  int skipped = 0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  /// (level, value) for levels 0.5, 0.9, 0.99.
  std::vector<std::pair<double, double>> quantiles;
  std::string config;
};

/// Builds a report from raw ratios (max, min, quantiles).
InequalityReport summarize_ratios(std::string name, const std::vector<double>& ratios,
                                  int skipped, std::string config);

struct NashResult {
  double lhs = 0.0;          // ||f||_2
  double rhs_branch1 = 0.0;  // ||grad f||^{1/3} ||f||_1^{2/3}
  double rhs_branch2 = 0.0;  // ||grad f||^{1/2} ||f||_1^{1/2}
  double ratio = 0.0;        // lhs / max(branches)
  double l1 = 0.0;
  double grad_l2 = 0.0;
  int dominant_branch = 1;
};

NashResult nash_check(const ScalarField& f);

/// Largest C with ||grad f|| >= C ||f||_2 min(a, a^2), a = ||f||_2 / ||f||_1.
double psi_nash_check(const ScalarField& f);

/// int |f|^2 / ((1/4 pi^2) int |d2 f|^2); f must have zero vertical average.
double poincare_check(const ScalarField& f);

/// ||omega0||_inf / (4 pi^2).
double kappa_of(const ScalarField& omega0);

struct FluxConstants {
  InequalityReport C3;  // |f|^2 / ((1+M)^2 e d)
  InequalityReport C4;  // |phi|^2 / ((1+M)^2 eps delta)
  InequalityReport C8;  // |f_hat|^2 / (kappa_t^2 d_hat)
  InequalityReport g_hat;  // |g_hat| / d_hat
  /// max over sampled points of |g_hat| / d_hat - kappa_t; must be <= 0.
  double g_hat_excess = 0.0;
};

FluxConstants flux_bound_constants(const std::vector<DiagSnapshot>& traj,
                                   const std::string& config = "");

enum class NashFamily { broad, narrow, vertical };

std::string to_string(NashFamily f);

/// Deterministic test function of the given family.
///   broad:    exp(-(x1-c)^2 / 2w^2) (1 + a cos(2 pi x2 + phi)), w in [1, lambda/8]
///   narrow:   1 to 3 signed isotropic bumps of width in [3 max(dx,dy), 0.15]
///   vertical: sum of cos(2 pi n x2 + phi_n), n = 1..4, random amplitudes
ScalarField nash_sample(const Grid& g, NashFamily family, std::uint64_t seed);

struct NashSample {
  NashFamily family = NashFamily::broad;
  std::uint64_t seed = 0;
  NashResult result;
  double psi_C = 0.0;
};

struct NashSuiteReport {
  std::vector<NashSample> samples;
  InequalityReport nash;
  InequalityReport psi;  // min_ratio is the empirical admissible C
  int branch1_dominant = 0;
  int branch2_dominant = 0;
  /// Max Nash ratio over the first and second halves of the seed range.
  double max_first_half = 0.0;
  double max_second_half = 0.0;
  /// Max |psi C - psi(a/r) / (r psi(a))| over samples.
  double psi_identity_defect = 0.0;
};

/// count samples cycling through the three families, seeds seed .. seed+count-1.
NashSuiteReport nash_suite(const Grid& g, int count, std::uint64_t seed);

struct PoincareSuiteReport {
  int samples = 0;
  double max_ratio = 0.0;
  /// |ratio - 1| on a field built from |n| = 1 modes only.
  double first_mode_defect = 0.0;
};

/// Random mean-zero band-limited fields, seeds seed .. seed+count-1.
PoincareSuiteReport poincare_suite(const Grid& g, int count, std::uint64_t seed);

}  // namespace nscyl
