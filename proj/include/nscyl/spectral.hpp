#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "nscyl/error.hpp"

namespace nscyl {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Discretization of the truncated cylinder [0, lambda) x [0, 1), periodic in
/// both directions. Physical arrays are row-major with x1 outer and x2 inner.
/// Spectral arrays hold the r2c half-spectrum: nx rows of ny/2 + 1 modes,
/// normalized so that a constant field c has coefficient c at (0, 0).
class Grid {
 public:
  Grid(int nx, int ny, double lambda);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lambda() const noexcept { return lambda_; }
  double dx() const noexcept { return lambda_ / nx_; }
  double dy() const noexcept { return 1.0 / ny_; }
  double cell_area() const noexcept { return dx() * dy(); }

  /// Number of stored vertical modes, ny/2 + 1.
  int nky() const noexcept { return ny_ / 2 + 1; }
  std::size_t physical_size() const noexcept {
    return static_cast<std::size_t>(nx_) * ny_;
  }
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(nx_) * nky();
  }
  std::size_t pidx(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * ny_ + j;
  }
  std::size_t sidx(int i, int n) const noexcept {
    return static_cast<std::size_t>(i) * nky() + n;
  }

  /// Signed horizontal mode index of storage row i; the Nyquist row maps to +nx/2.
  int signed_j(int i) const noexcept { return i <= nx_ / 2 ? i : i - nx_; }
  /// Storage row of signed horizontal mode j, |j| < nx/2 (or j == nx/2).
  int row_of(int j) const noexcept { return j >= 0 ? j : j + nx_; }
  bool nyquist_row(int i) const noexcept { return i == nx_ / 2; }
  bool nyquist_col(int n) const noexcept { return n == ny_ / 2; }

  /// Horizontal wavenumber 2 pi j / lambda of storage row i.
  double k1(int i) const noexcept { return (*k1_)[static_cast<std::size_t>(i)]; }
  /// Vertical wavenumber 2 pi n of stored column n.
  double k2(int n) const noexcept { return kTwoPi * n; }
  double k_squared(int i, int n) const noexcept {
    const double a = k1(i), b = k2(n);
    return a * a + b * b;
  }
  std::span<const double> k1_table() const noexcept { return *k1_; }

  double x1(int i) const noexcept { return i * dx(); }
  double x2(int j) const noexcept { return j * dy(); }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.lambda_ == b.lambda_;
  }

 private:
  int nx_;
  int ny_;
  double lambda_;
  std::shared_ptr<const std::vector<double>> k1_;
};

Grid make_grid(int nx, int ny, double lambda);

enum class Repr { physical, spectral };

/// Real scalar field on a Grid, held either as grid values or as its
/// half-spectrum. Hermitian symmetry of the spectrum is implied by the r2c
/// layout.
class ScalarField {
 public:
  static ScalarField physical(const Grid& grid);
  static ScalarField spectral(const Grid& grid);

  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    ScalarField out = physical(grid);
    for (int i = 0; i < grid.nx(); ++i)
      for (int j = 0; j < grid.ny(); ++j)
        out.phys_[grid.pidx(i, j)] = f(grid.x1(i), grid.x2(j));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  Repr repr() const noexcept { return repr_; }
  bool is_physical() const noexcept { return repr_ == Repr::physical; }

  std::span<double> values();
  std::span<const double> values() const;
  std::span<Complex> coeffs();
  std::span<const Complex> coeffs() const;

  double value(int i, int j) const { return values()[grid_.pidx(i, j)]; }
  Complex coeff(int i, int n) const { return coeffs()[grid_.sidx(i, n)]; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  ScalarField(const Grid& grid, Repr repr);

  Grid grid_;
  Repr repr_;
  std::vector<double> phys_;
  std::vector<Complex> spec_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

ScalarField to_spectral(const ScalarField& f);
ScalarField to_physical(const ScalarField& f);
/// Converts only when needed.
ScalarField as_spectral(ScalarField f);
ScalarField as_physical(ScalarField f);

/// Multiplies by (i k_axis)^order. Odd orders zero the Nyquist mode of that
/// axis. The result has the representation of the input.
ScalarField spectral_derivative(const ScalarField& f, int axis, int order);
ScalarField laplacian(const ScalarField& f);

/// Two-thirds rule: keeps modes with 3|j| <= nx and 3|n| <= ny.
bool in_dealiased_band(const Grid& grid, int i, int n) noexcept;
ScalarField dealias(const ScalarField& f);
/// Largest signed mode indices kept by dealias().
int dealias_max_j(const Grid& grid) noexcept;
int dealias_max_n(const Grid& grid) noexcept;

/// Product evaluated on a 3/2-padded grid and truncated to modes
/// |j| < nx/2, |n| < ny/2 of the base grid. Exact on retained modes when both
/// factors lie in the dealiased band. Result is spectral.
ScalarField padded_product(const ScalarField& a, const ScalarField& b);
/// Pointwise product on the base grid, followed by two-thirds truncation.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);
/// Pointwise product on the base grid (physical result).
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);

/// Function of x1 only, sampled at the nx grid abscissae.
class Profile {
 public:
  Profile(const Grid& grid, std::vector<double> values);
  static Profile zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  Profile& operator+=(const Profile& other);
  Profile& operator-=(const Profile& other);
  Profile& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Profile operator+(Profile a, const Profile& b);
Profile operator-(Profile a, const Profile& b);
Profile operator*(double s, Profile a);

/// <f>(x1) = integral of f over the vertical period, taken from the n = 0
/// spectral slice.
Profile vertical_average(const ScalarField& f);
/// Normalized spectrum of a profile, nx/2 + 1 coefficients.
std::vector<Complex> profile_spectrum(const Profile& p);
Profile profile_from_spectrum(const Grid& grid, std::span<const Complex> coeffs);
Profile profile_derivative(const Profile& p, int order = 1);
double profile_integral(const Profile& p);
double profile_sup(const Profile& p);
double profile_l2(const Profile& p);

/// Divergence-free vector field (u1, u2) on one grid.
struct VelocityField {
  ScalarField u1;
  ScalarField u2;
};

VelocityField as_spectral(VelocityField u);
VelocityField as_physical(VelocityField u);
ScalarField divergence(const VelocityField& u);
/// d1 u2 - d2 u1.
ScalarField curl(const VelocityField& u);
/// Pointwise Euclidean magnitude (physical result).
ScalarField magnitude(const VelocityField& u);
double sup_norm(const VelocityField& u);
double l2_norm(const VelocityField& u);

double integral(const ScalarField& f);
double mean(const ScalarField& f);
/// L^p norm by grid quadrature; p = infinity gives the grid maximum of |f|.
double lp_norm(const ScalarField& f, double p);
double sup_norm(const ScalarField& f);
double l2_norm(const ScalarField& f);
/// Integral of |f|^2 computed from the spectral coefficients.
double parseval_energy(const ScalarField& f);
/// Relative size of the non-Hermitian part of a spectral field's implied
/// spectrum; only the n = 0 and n = ny/2 columns can violate symmetry.
double hermitian_defect(const ScalarField& f);

/// Random field whose spectrum is supported on |j| <= max_j, |n| <= max_n
/// with independent Gaussian coefficients. Modes are drawn in a
/// grid-independent order, so two grids containing the band give the same
/// function. With zero_vertical_mean the n = 0 slice is left empty.
ScalarField random_bandlimited(const Grid& grid, std::uint64_t seed, int max_j,
                               int max_n, bool zero_vertical_mean);

}  // namespace nscyl
