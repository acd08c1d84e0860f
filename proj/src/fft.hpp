#pragma once

#include <complex>
#include <span>

namespace nscyl::detail {

// Thin wrappers over cached FFTW plans. Plans are created once per size under
// a lock and executed through the new-array interface, which is thread-safe.
// All transforms are unnormalized, like FFTW itself.

void r2c_2d(int nx, int ny, std::span<const double> in,
            std::span<std::complex<double>> out);
// Destroys nothing: the input is copied before the c2r call.
void c2r_2d(int nx, int ny, std::span<const std::complex<double>> in,
            std::span<double> out);

void r2c_1d(int n, std::span<const double> in,
            std::span<std::complex<double>> out);
void c2r_1d(int n, std::span<const std::complex<double>> in,
            std::span<double> out);

}  // namespace nscyl::detail
