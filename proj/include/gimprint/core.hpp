// Basic vocabulary shared by every gimprint module: complex scalars, planar
// vectors, natural-unit constants and the error hierarchy.
//
// Units: hbar = m = kappa = 1. Lengths are in 1/kappa, times in m/(hbar kappa^2),
// momenta in hbar kappa and energies in hbar^2 kappa^2 / m.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gimprint {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Point or vector in the x-z plane.
struct Vec2 {
  double x = 0.0;
  double z = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.z}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.z); }

// Error categories. The CLI maps them onto exit codes 2, 3 and 4.

/// A precondition on the inputs was violated.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid too coarse for the requested feature.
class ResolutionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Zero norm or zero weight vector where a normalizable object is required.
class DegenerateInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Population escaped the dark subspace during an adiabatic sweep.
class AdiabaticityError : public std::runtime_error {
 public:
  AdiabaticityError(const std::string& what, double leakage)
      : std::runtime_error(what), leakage_(leakage) {}
  double leakage() const noexcept { return leakage_; }

 private:
  double leakage_;
};

/// Self-check of a derived quantity failed (signals a broken dark frame).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace gimprint
