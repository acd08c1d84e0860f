#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace nscyl::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Key: (nx, ny); 1D plans use ny == 0.
const PlanPair& plans(int nx, int ny) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find({nx, ny});
  if (it != cache.end()) return it->second;

  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (ny > 0) {
    const std::size_t nreal = static_cast<std::size_t>(nx) * ny;
    const std::size_t ncplx = static_cast<std::size_t>(nx) * (ny / 2 + 1);
    double* r = fftw_alloc_real(nreal);
    fftw_complex* c = fftw_alloc_complex(ncplx);
    p.forward = fftw_plan_dft_r2c_2d(nx, ny, r, c, flags);
    p.backward = fftw_plan_dft_c2r_2d(nx, ny, c, r, flags);
    fftw_free(r);
    fftw_free(c);
  } else {
    double* r = fftw_alloc_real(nx);
    fftw_complex* c = fftw_alloc_complex(nx / 2 + 1);
    p.forward = fftw_plan_dft_r2c_1d(nx, r, c, flags);
    p.backward = fftw_plan_dft_c2r_1d(nx, c, r, flags);
    fftw_free(r);
    fftw_free(c);
  }
  return cache.emplace(std::make_pair(nx, ny), p).first->second;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

void r2c_2d(int nx, int ny, std::span<const double> in,
            std::span<std::complex<double>> out) {
  const PlanPair& p = plans(nx, ny);
  // r2c does not modify its input, but the FFTW signature is non-const.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       as_fftw(out.data()));
}

void c2r_2d(int nx, int ny, std::span<const std::complex<double>> in,
            std::span<double> out) {
  const PlanPair& p = plans(nx, ny);
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(p.backward, as_fftw(scratch.data()), out.data());
}

void r2c_1d(int n, std::span<const double> in,
            std::span<std::complex<double>> out) {
  const PlanPair& p = plans(n, 0);
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       as_fftw(out.data()));
}

void c2r_1d(int n, std::span<const std::complex<double>> in,
            std::span<double> out) {
  const PlanPair& p = plans(n, 0);
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(p.backward, as_fftw(scratch.data()), out.data());
}

}  // namespace nscyl::detail
