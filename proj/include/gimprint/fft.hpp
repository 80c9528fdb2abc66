// Unitary 2-D discrete Fourier transforms, backed by FFTW3.
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <tuple>

#include "gimprint/core.hpp"

namespace gimprint::fft {

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan is.
inline fftw_plan plan_for(std::size_t nx, std::size_t nz, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mu);
  auto key = std::make_tuple(nx, nz, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  auto* scratch = fftw_alloc_complex(nx * nz);
  fftw_plan p = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(nz), scratch,
                                 scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  plans.emplace(key, p);
  return p;
}

inline void transform(std::span<cplx> data, std::size_t nx, std::size_t nz, int sign) {
  require(data.size() == nx * nz, "fft: buffer size does not match grid");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(nx, nz, sign), buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nx * nz));
  for (auto& v : data) v *= scale;
}

}  // namespace detail

/// In-place forward transform, psi~(k) = N^{-1/2} sum_r psi(r) exp(-i k.(r - r0)),
/// with r0 the first grid point.
inline void forward(std::span<cplx> data, std::size_t nx, std::size_t nz) {
  detail::transform(data, nx, nz, FFTW_FORWARD);
}

/// In-place inverse of forward().
inline void inverse(std::span<cplx> data, std::size_t nx, std::size_t nz) {
  detail::transform(data, nx, nz, FFTW_BACKWARD);
}

}  // namespace gimprint::fft
