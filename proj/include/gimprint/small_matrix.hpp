// Fixed-size complex matrices used per grid point.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "gimprint/core.hpp"

namespace gimprint {

template <std::size_t N>
using CVec = std::array<cplx, N>;

/// Row-major N x N complex matrix.
template <std::size_t N>
struct CMat {
  std::array<cplx, N * N> a{};

  cplx& operator()(std::size_t r, std::size_t c) { return a[r * N + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a[r * N + c]; }

  static CMat identity() {
    CMat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  CMat adjoint() const {
    CMat m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
  }

  friend CMat operator*(const CMat& x, const CMat& y) {
    CMat m;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t c = 0; c < N; ++c) m(r, c) += x(r, k) * y(k, c);
    return m;
  }
  friend CVec<N> operator*(const CMat& x, const CVec<N>& v) {
    CVec<N> out{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out[r] += x(r, c) * v[c];
    return out;
  }
  friend CMat operator+(CMat x, const CMat& y) {
    for (std::size_t i = 0; i < N * N; ++i) x.a[i] += y.a[i];
    return x;
  }
  friend CMat operator-(CMat x, const CMat& y) {
    for (std::size_t i = 0; i < N * N; ++i) x.a[i] -= y.a[i];
    return x;
  }
  friend CMat operator*(cplx s, CMat x) {
    for (auto& v : x.a) v *= s;
    return x;
  }
};

using Mat2 = CMat<2>;
using Mat4 = CMat<4>;
using Spinor2 = CVec<2>;
using Spinor4 = CVec<4>;

template <std::size_t N>
cplx vdot(const CVec<N>& a, const CVec<N>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

template <std::size_t N>
double max_abs(const CMat<N>& m) {
  double r = 0.0;
  for (const auto& v : m.a) r = std::max(r, std::abs(v));
  return r;
}

namespace pauli {
inline Mat2 x() { return Mat2{{0.0, 1.0, 1.0, 0.0}}; }
inline Mat2 y() { return Mat2{{0.0, -kI, kI, 0.0}}; }
inline Mat2 z() { return Mat2{{1.0, 0.0, 0.0, -1.0}}; }
}  // namespace pauli

/// exp(-i t (a 1 + bx sx + bz sz)) in closed form.
inline Mat2 exp_pauli_xz(double t, double a, double bx, double bz) {
  const double b = std::hypot(bx, bz);
  const cplx phase = std::polar(1.0, -t * a);
  const double c = std::cos(t * b);
  // sin(t b)/b with the b -> 0 limit
  const double sinc = b > 0.0 ? std::sin(t * b) / b : t;
  Mat2 m;
  m(0, 0) = phase * cplx(c, -sinc * bz);
  m(1, 1) = phase * cplx(c, sinc * bz);
  m(0, 1) = phase * cplx(0.0, -sinc * bx);
  m(1, 0) = m(0, 1);
  return m;
}

}  // namespace gimprint
