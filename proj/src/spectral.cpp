#include "nscyl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fft.hpp"

namespace nscyl {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int nx, int ny, double lambda) : nx_(nx), ny_(ny), lambda_(lambda) {
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
    fail(ErrorCode::invalid_argument,
         "grid sizes must be even and >= 8 (got nx=" + std::to_string(nx) +
             ", ny=" + std::to_string(ny) + ")");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::invalid_argument, "grid period lambda must be positive");
  auto k1 = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i)
    (*k1)[static_cast<std::size_t>(i)] = kTwoPi * signed_j(i) / lambda;
  k1_ = std::move(k1);
}

Grid make_grid(int nx, int ny, double lambda) { return Grid(nx, ny, lambda); }

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(const Grid& grid, Repr repr) : grid_(grid), repr_(repr) {
  if (repr == Repr::physical)
    phys_.assign(grid.physical_size(), 0.0);
  else
    spec_.assign(grid.spectral_size(), Complex{});
}

ScalarField ScalarField::physical(const Grid& grid) {
  return ScalarField(grid, Repr::physical);
}

ScalarField ScalarField::spectral(const Grid& grid) {
  return ScalarField(grid, Repr::spectral);
}

std::span<double> ScalarField::values() {
  if (repr_ != Repr::physical)
    fail(ErrorCode::invalid_argument, "field is not in physical representation");
  return phys_;
}

std::span<const double> ScalarField::values() const {
  if (repr_ != Repr::physical)
    fail(ErrorCode::invalid_argument, "field is not in physical representation");
  return phys_;
}

std::span<Complex> ScalarField::coeffs() {
  if (repr_ != Repr::spectral)
    fail(ErrorCode::invalid_argument, "field is not in spectral representation");
  return spec_;
}

std::span<const Complex> ScalarField::coeffs() const {
  if (repr_ != Repr::spectral)
    fail(ErrorCode::invalid_argument, "field is not in spectral representation");
  return spec_;
}

namespace {

void check_compatible(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid()))
    fail(ErrorCode::invalid_argument, "fields live on different grids");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  check_compatible(*this, other);
  if (repr_ == Repr::physical) {
    auto o = as_physical(other);
    auto ov = o.values();
    for (std::size_t k = 0; k < phys_.size(); ++k) phys_[k] += ov[k];
  } else {
    auto o = as_spectral(other);
    auto oc = o.coeffs();
    for (std::size_t k = 0; k < spec_.size(); ++k) spec_[k] += oc[k];
  }
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  check_compatible(*this, other);
  if (repr_ == Repr::physical) {
    auto o = as_physical(other);
    auto ov = o.values();
    for (std::size_t k = 0; k < phys_.size(); ++k) phys_[k] -= ov[k];
  } else {
    auto o = as_spectral(other);
    auto oc = o.coeffs();
    for (std::size_t k = 0; k < spec_.size(); ++k) spec_[k] -= oc[k];
  }
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (auto& v : phys_) v *= s;
  for (auto& c : spec_) c *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField to_spectral(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out = ScalarField::spectral(g);
  detail::r2c_2d(g.nx(), g.ny(), f.values(), out.coeffs());
  out *= 1.0 / static_cast<double>(g.physical_size());
  return out;
}

ScalarField to_physical(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out = ScalarField::physical(g);
  detail::c2r_2d(g.nx(), g.ny(), f.coeffs(), out.values());
  return out;
}

ScalarField as_spectral(ScalarField f) {
  return f.repr() == Repr::spectral ? f : to_spectral(f);
}

ScalarField as_physical(ScalarField f) {
  return f.repr() == Repr::physical ? f : to_physical(f);
}

ScalarField spectral_derivative(const ScalarField& f, int axis, int order) {
  require(axis == 1 || axis == 2, "derivative axis must be 1 or 2");
  require(order >= 1, "derivative order must be positive");
  const Repr input_repr = f.repr();
  ScalarField s = as_spectral(f);
  const Grid& g = s.grid();
  auto c = s.coeffs();
  // (i k)^order = i^order k^order
  static const Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = kPowI[order % 4];
  const bool odd = order % 2 == 1;
  for (int i = 0; i < g.nx(); ++i) {
    for (int n = 0; n < g.nky(); ++n) {
      const double k = axis == 1 ? g.k1(i) : g.k2(n);
      const bool nyq = axis == 1 ? g.nyquist_row(i) : g.nyquist_col(n);
      Complex& v = c[g.sidx(i, n)];
      if (odd && nyq)
        v = 0.0;
      else
        v *= phase * std::pow(k, order);
    }
  }
  return input_repr == Repr::physical ? to_physical(s) : s;
}

ScalarField laplacian(const ScalarField& f) {
  const Repr input_repr = f.repr();
  ScalarField s = as_spectral(f);
  const Grid& g = s.grid();
  auto c = s.coeffs();
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) c[g.sidx(i, n)] *= -g.k_squared(i, n);
  return input_repr == Repr::physical ? to_physical(s) : s;
}

int dealias_max_j(const Grid& grid) noexcept { return grid.nx() / 3; }
int dealias_max_n(const Grid& grid) noexcept { return grid.ny() / 3; }

bool in_dealiased_band(const Grid& grid, int i, int n) noexcept {
  const int j = std::abs(grid.signed_j(i));
  return 3 * j <= grid.nx() && 3 * n <= grid.ny();
}

ScalarField dealias(const ScalarField& f) {
  ScalarField s = as_spectral(f);
  const Grid& g = s.grid();
  auto c = s.coeffs();
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n)
      if (!in_dealiased_band(g, i, n)) c[g.sidx(i, n)] = 0.0;
  return s;
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  check_compatible(a, b);
  ScalarField pa = as_physical(a);
  const ScalarField pb = as_physical(b);
  auto av = pa.values();
  auto bv = pb.values();
  for (std::size_t k = 0; k < av.size(); ++k) av[k] *= bv[k];
  return pa;
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  return dealias(to_spectral(pointwise_product(a, b)));
}

namespace {

// Copies the modes |j| < nx/2, |n| < ny/2 between spectra of different sizes.
void transfer_modes(const Grid& from, std::span<const Complex> src, int to_nx,
                    int to_nky, std::span<Complex> dst, int keep_j, int keep_n) {
  const int from_nky = from.nky();
  for (int j = -keep_j; j <= keep_j; ++j) {
    const int si = j >= 0 ? j : j + from.nx();
    const int di = j >= 0 ? j : j + to_nx;
    for (int n = 0; n <= keep_n; ++n)
      dst[static_cast<std::size_t>(di) * to_nky + n] =
          src[static_cast<std::size_t>(si) * from_nky + n];
  }
}

}  // namespace

ScalarField padded_product(const ScalarField& a, const ScalarField& b) {
  check_compatible(a, b);
  const Grid& g = a.grid();
  const int px = 3 * g.nx() / 2 + (3 * g.nx() / 2) % 2;
  const int py = 3 * g.ny() / 2 + (3 * g.ny() / 2) % 2;
  const int pky = py / 2 + 1;
  const int keep_j = g.nx() / 2 - 1;
  const int keep_n = g.ny() / 2 - 1;
  const std::size_t preal = static_cast<std::size_t>(px) * py;
  const std::size_t pcplx = static_cast<std::size_t>(px) * pky;

  auto to_padded_physical = [&](const ScalarField& f) {
    const ScalarField s = as_spectral(f);
    std::vector<Complex> padded(pcplx, Complex{});
    transfer_modes(g, s.coeffs(), px, pky, padded, keep_j, keep_n);
    std::vector<double> phys(preal);
    detail::c2r_2d(px, py, padded, phys);
    return phys;
  };
  std::vector<double> pa = to_padded_physical(a);
  const std::vector<double> pb = to_padded_physical(b);
  for (std::size_t k = 0; k < preal; ++k) pa[k] *= pb[k];

  std::vector<Complex> prod(pcplx);
  detail::r2c_2d(px, py, pa, prod);
  const double norm = 1.0 / static_cast<double>(preal);
  for (auto& c : prod) c *= norm;

  ScalarField out = ScalarField::spectral(g);
  const Grid padded_grid(px, py, g.lambda());
  transfer_modes(padded_grid, prod, g.nx(), g.nky(), out.coeffs(), keep_j,
                 keep_n);
  return out;
}

// ---------------------------------------------------------------------------
// Profile

Profile::Profile(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid.nx()))
    fail(ErrorCode::invalid_argument, "profile length must equal nx");
}

Profile Profile::zeros(const Grid& grid) {
  return Profile(grid, std::vector<double>(static_cast<std::size_t>(grid.nx()), 0.0));
}

Profile& Profile::operator+=(const Profile& other) {
  require(grid_ == other.grid_, "profiles live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Profile& Profile::operator-=(const Profile& other) {
  require(grid_ == other.grid_, "profiles live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Profile& Profile::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Profile operator+(Profile a, const Profile& b) { return a += b; }
Profile operator-(Profile a, const Profile& b) { return a -= b; }
Profile operator*(double s, Profile a) { return a *= s; }

Profile vertical_average(const ScalarField& f) {
  const ScalarField s = as_spectral(f);
  const Grid& g = s.grid();
  std::vector<Complex> slice(static_cast<std::size_t>(g.nx() / 2 + 1));
  for (int i = 0; i <= g.nx() / 2; ++i) slice[static_cast<std::size_t>(i)] = s.coeff(i, 0);
  return profile_from_spectrum(g, slice);
}

std::vector<Complex> profile_spectrum(const Profile& p) {
  const int nx = p.grid().nx();
  std::vector<Complex> out(static_cast<std::size_t>(nx / 2 + 1));
  detail::r2c_1d(nx, p.values(), out);
  for (auto& c : out) c /= static_cast<double>(nx);
  return out;
}

Profile profile_from_spectrum(const Grid& grid, std::span<const Complex> coeffs) {
  require(coeffs.size() == static_cast<std::size_t>(grid.nx() / 2 + 1),
          "profile spectrum has wrong length");
  std::vector<double> values(static_cast<std::size_t>(grid.nx()));
  detail::c2r_1d(grid.nx(), coeffs, values);
  return Profile(grid, std::move(values));
}

Profile profile_derivative(const Profile& p, int order) {
  require(order >= 1, "derivative order must be positive");
  const Grid& g = p.grid();
  auto c = profile_spectrum(p);
  static const Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i <= g.nx() / 2; ++i) {
    if (order % 2 == 1 && g.nyquist_row(i))
      c[static_cast<std::size_t>(i)] = 0.0;
    else
      c[static_cast<std::size_t>(i)] *= kPowI[order % 4] * std::pow(g.k1(i), order);
  }
  return profile_from_spectrum(g, c);
}

double profile_integral(const Profile& p) {
  double s = 0.0;
  for (double v : p.values()) s += v;
  return s * p.grid().dx();
}

double profile_sup(const Profile& p) {
  double m = 0.0;
  for (double v : p.values()) m = std::max(m, std::abs(v));
  return m;
}

double profile_l2(const Profile& p) {
  double s = 0.0;
  for (double v : p.values()) s += v * v;
  return std::sqrt(s * p.grid().dx());
}

// ---------------------------------------------------------------------------
// Vector fields and norms

VelocityField as_spectral(VelocityField u) {
  return {as_spectral(std::move(u.u1)), as_spectral(std::move(u.u2))};
}

VelocityField as_physical(VelocityField u) {
  return {as_physical(std::move(u.u1)), as_physical(std::move(u.u2))};
}

ScalarField divergence(const VelocityField& u) {
  return spectral_derivative(as_spectral(u.u1), 1, 1) +
         spectral_derivative(as_spectral(u.u2), 2, 1);
}

ScalarField curl(const VelocityField& u) {
  return spectral_derivative(as_spectral(u.u2), 1, 1) -
         spectral_derivative(as_spectral(u.u1), 2, 1);
}

ScalarField magnitude(const VelocityField& u) {
  ScalarField a = as_physical(u.u1);
  const ScalarField b = as_physical(u.u2);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) av[k] = std::hypot(av[k], bv[k]);
  return a;
}

double sup_norm(const VelocityField& u) { return sup_norm(magnitude(u)); }

double l2_norm(const VelocityField& u) {
  const double a = l2_norm(u.u1), b = l2_norm(u.u2);
  return std::sqrt(a * a + b * b);
}

double integral(const ScalarField& f) {
  if (f.repr() == Repr::spectral) return f.coeff(0, 0).real() * f.grid().lambda();
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_area();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().lambda(); }

double lp_norm(const ScalarField& f, double p) {
  require(p >= 1.0, "L^p exponent must be >= 1");
  const ScalarField phys = as_physical(f);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : phys.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 1.0) {
    for (double v : phys.values()) s += std::abs(v);
    return s * f.grid().cell_area();
  }
  if (p == 2.0) {
    for (double v : phys.values()) s += v * v;
    return std::sqrt(s * f.grid().cell_area());
  }
  for (double v : phys.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_area(), 1.0 / p);
}

double sup_norm(const ScalarField& f) {
  return lp_norm(f, std::numeric_limits<double>::infinity());
}

double l2_norm(const ScalarField& f) { return lp_norm(f, 2.0); }

double parseval_energy(const ScalarField& f) {
  const ScalarField s = as_spectral(f);
  const Grid& g = s.grid();
  double sum = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int n = 0; n < g.nky(); ++n) {
      const double w = (n == 0 || g.nyquist_col(n)) ? 1.0 : 2.0;
      sum += w * std::norm(s.coeff(i, n));
    }
  return sum * g.lambda();
}

double hermitian_defect(const ScalarField& f) {
  const Grid& g = f.grid();
  double defect = 0.0, scale = 0.0;
  for (int n : {0, g.ny() / 2}) {
    for (int i = 0; i < g.nx(); ++i) {
      const int partner = (g.nx() - i) % g.nx();
      defect = std::max(defect, std::abs(f.coeff(i, n) - std::conj(f.coeff(partner, n))));
    }
  }
  for (const auto& c : f.coeffs()) scale = std::max(scale, std::abs(c));
  return scale > 0.0 ? defect / scale : 0.0;
}

ScalarField random_bandlimited(const Grid& grid, std::uint64_t seed, int max_j,
                               int max_n, bool zero_vertical_mean) {
  require(max_j >= 0 && max_n >= 0, "band limits must be non-negative");
  require(2 * max_j < grid.nx() && 2 * max_n < grid.ny(),
          "requested band exceeds the grid's resolved modes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalarField out = ScalarField::spectral(grid);
  auto c = out.coeffs();
  for (int n = 0; n <= max_n; ++n) {
    for (int j = -max_j; j <= max_j; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (n == 0 && (zero_vertical_mean || j < 0)) continue;
      const int i = grid.row_of(j);
      if (n == 0 && j == 0) {
        c[grid.sidx(i, 0)] = re;
      } else if (n == 0) {
        c[grid.sidx(i, 0)] = Complex(re, im);
        c[grid.sidx(grid.row_of(-j), 0)] = Complex(re, -im);
      } else {
        c[grid.sidx(i, n)] = Complex(re, im);
      }
    }
  }
  return out;
}

}  // namespace nscyl
