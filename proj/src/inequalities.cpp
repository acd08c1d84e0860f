#include "nscyl/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nscyl {

namespace {

constexpr double kThreshold = 1e-14;

double psi(double x) { return std::min(x, x * x); }

double grad_l2(const ScalarField& f) {
  const ScalarField s = as_spectral(f);
  return std::sqrt(parseval_energy(spectral_derivative(s, 1, 1)) +
                   parseval_energy(spectral_derivative(s, 2, 1)));
}

double quantile(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

InequalityReport summarize_ratios(std::string name, const std::vector<double>& ratios,
                                  int skipped, std::string config) {
  InequalityReport r;
  r.name = std::move(name);
  r.config = std::move(config);
  r.samples = static_cast<int>(ratios.size());
  r.skipped = skipped;
  if (ratios.empty()) return r;
  r.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  r.min_ratio = *std::min_element(ratios.begin(), ratios.end());
  for (double level : {0.5, 0.9, 0.99}) r.quantiles.emplace_back(level, quantile(ratios, level));
  return r;
}

NashResult nash_check(const ScalarField& f) {
  NashResult r;
  r.lhs = l2_norm(f);
  if (r.lhs == 0.0) fail(ErrorCode::invalid_argument, "Nash check of a zero field");
  r.l1 = lp_norm(f, 1.0);
  r.grad_l2 = grad_l2(f);
  r.rhs_branch1 = std::cbrt(r.grad_l2) * std::pow(r.l1, 2.0 / 3.0);
  r.rhs_branch2 = std::sqrt(r.grad_l2 * r.l1);
  r.dominant_branch = r.rhs_branch1 >= r.rhs_branch2 ? 1 : 2;
  r.ratio = r.lhs / std::max(r.rhs_branch1, r.rhs_branch2);
  return r;
}

double psi_nash_check(const ScalarField& f) {
  const double L = l2_norm(f);
  if (L == 0.0) fail(ErrorCode::invalid_argument, "psi-Nash check of a zero field");
  const double a = L / lp_norm(f, 1.0);
  return grad_l2(f) / (L * psi(a));
}

double poincare_check(const ScalarField& f) {
  const ScalarField s = as_spectral(f);
  const double scale = sup_norm(f);
  if (scale == 0.0) fail(ErrorCode::invalid_argument, "Poincare check of a zero field");
  if (profile_sup(vertical_average(s)) > 1e-12 * scale)
    fail(ErrorCode::invalid_argument, "Poincare check needs a zero vertical average");
  const double d2 = parseval_energy(spectral_derivative(s, 2, 1));
  return parseval_energy(s) / (d2 / (4.0 * kPi * kPi));
}

double kappa_of(const ScalarField& omega0) { return sup_norm(omega0) / (4.0 * kPi * kPi); }

FluxConstants flux_bound_constants(const std::vector<DiagSnapshot>& traj,
                                   const std::string& config) {
  std::vector<double> c3, c4, c8, gh;
  int s3 = 0, s4 = 0, s8 = 0, sg = 0;
  double excess = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj) {
    const double M2 = (1 + s.M) * (1 + s.M);
    const double kt = s.norms.sup_omega / (4.0 * kPi * kPi);
    const auto& E = s.energy;
    const auto& Z = s.enstrophy;
    const auto& O = s.osc;
    for (std::size_t i = 0; i < E.e.size(); ++i) {
      if (E.d[i] > kThreshold && E.e[i] > 0.0)
        c3.push_back(E.f[i] * E.f[i] / (M2 * E.e[i] * E.d[i]));
      else
        ++s3;
      if (Z.delta[i] > kThreshold && Z.eps[i] > 0.0)
        c4.push_back(Z.phi[i] * Z.phi[i] / (M2 * Z.eps[i] * Z.delta[i]));
      else
        ++s4;
      if (O.d_hat[i] > kThreshold) {
        const double g = std::abs(O.g_hat[i]) / O.d_hat[i];
        gh.push_back(g);
        excess = std::max(excess, g - kt);
        if (kt > 0.0)
          c8.push_back(O.f_hat[i] * O.f_hat[i] / (kt * kt * O.d_hat[i]));
        else
          ++s8;
      } else {
        ++sg;
        ++s8;
      }
    }
  }
  FluxConstants r;
  r.C3 = summarize_ratios("C3", c3, s3, config);
  r.C4 = summarize_ratios("C4", c4, s4, config);
  r.C8 = summarize_ratios("C8", c8, s8, config);
  r.g_hat = summarize_ratios("g_hat", gh, sg, config);
  r.g_hat_excess = gh.empty() ? 0.0 : excess;
  return r;
}

std::string to_string(NashFamily f) {
  switch (f) {
    case NashFamily::broad: return "broad";
    case NashFamily::narrow: return "narrow";
    case NashFamily::vertical: return "vertical";
  }
  return "?";
}

ScalarField nash_sample(const Grid& g, NashFamily family, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 3 + static_cast<std::uint64_t>(family));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double L = g.lambda();
  auto periodic_d1 = [L](double x, double c) {
    double d = std::fmod(x - c, L);
    if (d > L / 2) d -= L;
    if (d < -L / 2) d += L;
    return d;
  };
  switch (family) {
    case NashFamily::broad: {
      const double wmax = std::max(1.0, L / 8);
      const double w = 1.0 + (wmax - 1.0) * U(rng);
      const double c = L * U(rng);
      const double a = 0.9 * U(rng);
      const double phi = kTwoPi * U(rng);
      return ScalarField::sample(g, [=](double x, double y) {
        const double d = periodic_d1(x, c);
        return std::exp(-d * d / (2 * w * w)) * (1 + a * std::cos(kTwoPi * y + phi));
      });
    }
    case NashFamily::narrow: {
      const double smin = 3.0 * std::max(g.dx(), g.dy());
      const int count = 1 + static_cast<int>(3 * U(rng)) % 3;
      struct Bump {
        double c1, c2, s, amp;
      };
      std::vector<Bump> bumps;
      for (int k = 0; k < count; ++k) {
        const double s = smin + (std::max(smin, 0.15) - smin) * U(rng);
        bumps.push_back({L * U(rng), U(rng), s, (U(rng) < 0.3 ? -1.0 : 1.0) * (0.5 + U(rng))});
      }
      return ScalarField::sample(g, [=](double x, double y) {
        double v = 0.0;
        for (const auto& b : bumps) {
          const double d1 = periodic_d1(x, b.c1);
          for (int m = -1; m <= 1; ++m) {
            const double d2 = y - b.c2 + m;
            v += b.amp * std::exp(-(d1 * d1 + d2 * d2) / (2 * b.s * b.s));
          }
        }
        return v;
      });
    }
    case NashFamily::vertical: {
      double amp[4], ph[4];
      for (int n = 0; n < 4; ++n) {
        amp[n] = (U(rng) - 0.5) * std::pow(0.5, n);
        ph[n] = kTwoPi * U(rng);
      }
      amp[0] += amp[0] >= 0 ? 0.5 : -0.5;
      return ScalarField::sample(g, [=](double, double y) {
        double v = 0.0;
        for (int n = 0; n < 4; ++n) v += amp[n] * std::cos(kTwoPi * (n + 1) * y + ph[n]);
        return v;
      });
    }
  }
  fail(ErrorCode::invalid_argument, "bad Nash family");
}

NashSuiteReport nash_suite(const Grid& g, int count, std::uint64_t seed) {
  require(count >= 2, "Nash suite needs at least two samples");
  std::vector<double> ratios, cs;
  NashSuiteReport r;
  const NashFamily fams[3] = {NashFamily::broad, NashFamily::narrow, NashFamily::vertical};
  for (int k = 0; k < count; ++k) {
    const ScalarField f = nash_sample(g, fams[k % 3], seed + static_cast<std::uint64_t>(k));
    const NashResult n = nash_check(f);
    const double C = psi_nash_check(f);
    const double a = n.lhs / n.l1;
    r.psi_identity_defect =
        std::max(r.psi_identity_defect, std::abs(C - psi(a / n.ratio) / (n.ratio * psi(a))) / C);
    ratios.push_back(n.ratio);
    cs.push_back(C);
    r.samples.push_back({fams[k % 3], seed + static_cast<std::uint64_t>(k), n, C});
    (n.dominant_branch == 1 ? r.branch1_dominant : r.branch2_dominant) += 1;
    (k < count / 2 ? r.max_first_half : r.max_second_half) =
        std::max(k < count / 2 ? r.max_first_half : r.max_second_half, n.ratio);
  }
  const std::string config = "nx=" + std::to_string(g.nx()) + " ny=" + std::to_string(g.ny()) +
                             " lambda=" + std::to_string(g.lambda()) +
                             " seed=" + std::to_string(seed) + " count=" + std::to_string(count);
  r.nash = summarize_ratios("nash", ratios, 0, config);
  r.psi = summarize_ratios("psi_nash", cs, 0, config);
  return r;
}

PoincareSuiteReport poincare_suite(const Grid& g, int count, std::uint64_t seed) {
  require(count >= 1, "Poincare suite needs at least one sample");
  PoincareSuiteReport r;
  const int mj = std::max(1, g.nx() / 4), mn = std::max(1, g.ny() / 4);
  for (int k = 0; k < count; ++k) {
    const ScalarField f = random_bandlimited(g, seed + static_cast<std::uint64_t>(k), mj, mn, true);
    r.max_ratio = std::max(r.max_ratio, poincare_check(f));
    ++r.samples;
  }
  ScalarField first = as_spectral(random_bandlimited(g, seed, mj, 1, true));
  r.first_mode_defect = std::abs(poincare_check(first) - 1.0);
  return r;
}

}  // namespace nscyl
