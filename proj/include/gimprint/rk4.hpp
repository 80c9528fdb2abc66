// Classical fourth-order Runge-Kutta for linear Schroedinger-type ODEs
//   i dc/dl = G(l) c
// with a fixed step count.
#pragma once

#include <cstddef>

#include "gimprint/core.hpp"
#include "gimprint/small_matrix.hpp"

namespace gimprint {

/// Propagates c from l0 to l1. G(l) must return a CMat<N>.
template <std::size_t N, class Generator>
CVec<N> rk4_integrate(Generator&& gen, double l0, double l1, std::size_t steps, CVec<N> c) {
  require(steps >= 1, "rk4: need at least one step");
  const double h = (l1 - l0) / static_cast<double>(steps);
  auto rhs = [&](double l, const CVec<N>& v) {
    CVec<N> out = gen(l) * v;
    for (auto& o : out) o *= -kI;
    return out;
  };
  auto axpy = [](const CVec<N>& a, double s, const CVec<N>& b) {
    CVec<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  for (std::size_t n = 0; n < steps; ++n) {
    const double l = l0 + h * static_cast<double>(n);
    const CVec<N> k1 = rhs(l, c);
    const CVec<N> k2 = rhs(l + 0.5 * h, axpy(c, 0.5 * h, k1));
    const CVec<N> k3 = rhs(l + 0.5 * h, axpy(c, 0.5 * h, k2));
    const CVec<N> k4 = rhs(l + h, axpy(c, h, k3));
    for (std::size_t i = 0; i < N; ++i) c[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return c;
}

/// Propagator U with c(l1) = U c(l0), integrated column by column.
template <std::size_t N, class Generator>
CMat<N> rk4_propagator(Generator&& gen, double l0, double l1, std::size_t steps) {
  require(steps >= 1, "rk4: need at least one step");
  const double h = (l1 - l0) / static_cast<double>(steps);
  CMat<N> u = CMat<N>::identity();
  auto rhs = [&](double l, const CMat<N>& m) { return cplx(0.0, -1.0) * (gen(l) * m); };
  for (std::size_t n = 0; n < steps; ++n) {
    const double l = l0 + h * static_cast<double>(n);
    const CMat<N> k1 = rhs(l, u);
    const CMat<N> k2 = rhs(l + 0.5 * h, u + cplx(0.5 * h) * k1);
    const CMat<N> k3 = rhs(l + 0.5 * h, u + cplx(0.5 * h) * k2);
    const CMat<N> k4 = rhs(l + h, u + cplx(h) * k3);
    u = u + cplx(h / 6.0) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
  }
  return u;
}

}  // namespace gimprint
