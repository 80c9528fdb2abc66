// Uniform periodic x-z lattice and its reciprocal lattice.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "gimprint/core.hpp"

namespace gimprint {

/// Periodic grid of nx * nz points covering [x0, x0 + lx) x [z0, z0 + lz).
///
/// Storage order everywhere in the library is row-major with x outer and z
/// inner: flat index = i * nz + j.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t nz, double lx, double lz)
      : Grid2D(nx, nz, lx, lz, -0.5 * lx, -0.5 * lz) {}

  Grid2D(std::size_t nx, std::size_t nz, double lx, double lz, double x0, double z0)
      : nx_(nx), nz_(nz), lx_(lx), lz_(lz), x0_(x0), z0_(z0) {
    require(nx >= 2 && std::has_single_bit(nx), "grid: nx must be a power of two >= 2");
    require(nz >= 2 && std::has_single_bit(nz), "grid: nz must be a power of two >= 2");
    require(lx > 0.0 && lz > 0.0 && std::isfinite(lx) && std::isfinite(lz),
            "grid: extents must be positive and finite");
  }

  std::size_t nx() const { return nx_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return nx_ * nz_; }
  double lx() const { return lx_; }
  double lz() const { return lz_; }
  double x0() const { return x0_; }
  double z0() const { return z0_; }
  double dx() const { return lx_ / static_cast<double>(nx_); }
  double dz() const { return lz_ / static_cast<double>(nz_); }
  double cell_area() const { return dx() * dz(); }

  std::size_t index(std::size_t i, std::size_t j) const { return i * nz_ + j; }

  double x(std::size_t i) const { return x0_ + static_cast<double>(i) * dx(); }
  double z(std::size_t j) const { return z0_ + static_cast<double>(j) * dz(); }
  Vec2 position(std::size_t i, std::size_t j) const { return {x(i), z(j)}; }
  Vec2 position(std::size_t flat) const { return position(flat / nz_, flat % nz_); }

  /// Reciprocal value of bin i in standard FFT order.
  double kx(std::size_t i) const { return fft_frequency(i, nx_, lx_); }
  double kz(std::size_t j) const { return fft_frequency(j, nz_, lz_); }
  Vec2 wavevector(std::size_t i, std::size_t j) const { return {kx(i), kz(j)}; }
  Vec2 wavevector(std::size_t flat) const { return wavevector(flat / nz_, flat % nz_); }

  double dkx() const { return 2.0 * std::numbers::pi / lx_; }
  double dkz() const { return 2.0 * std::numbers::pi / lz_; }

  /// Shortest periodic displacement from a to b.
  Vec2 minimal_image(Vec2 a, Vec2 b) const {
    return {wrap(b.x - a.x, lx_), wrap(b.z - a.z, lz_)};
  }

  /// Largest distance of any grid point from the origin.
  double max_radius() const {
    const double xm = std::max(std::abs(x0_), std::abs(x0_ + (nx_ - 1) * dx()));
    const double zm = std::max(std::abs(z0_), std::abs(z0_ + (nz_ - 1) * dz()));
    return std::hypot(xm, zm);
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

  static double fft_frequency(std::size_t i, std::size_t n, double l) {
    const auto j = static_cast<double>(i);
    const auto nn = static_cast<double>(n);
    return 2.0 * std::numbers::pi * (i < n / 2 ? j : j - nn) / l;
  }

 private:
  static double wrap(double d, double l) { return d - l * std::nearbyint(d / l); }

  std::size_t nx_, nz_;
  double lx_, lz_, x0_, z0_;
};

}  // namespace gimprint
