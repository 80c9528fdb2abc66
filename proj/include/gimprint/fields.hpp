// Field construction, spectral transforms and basic observables.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "gimprint/core.hpp"
#include "gimprint/fft.hpp"
#include "gimprint/grid.hpp"
#include "gimprint/parallel.hpp"
#include "gimprint/spinor_field.hpp"
#include "gimprint/summation.hpp"

namespace gimprint {

/// N[psi] = sum_c sum_grid |psi_c|^2 dx dz.
inline double norm(const SpinorField& f) {
  CompensatedSum acc;
  for (const auto& v : f.data()) acc += std::norm(v);
  return acc.value() * f.measure();
}

/// <a|b> including the area element.
inline cplx inner(const SpinorField& a, const SpinorField& b) {
  require_same_shape(a, b, "inner");
  CompensatedSum re, im;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t n = 0; n < da.size(); ++n) {
    const cplx p = std::conj(da[n]) * db[n];
    re += p.real();
    im += p.imag();
  }
  return cplx{re.value(), im.value()} * a.measure();
}

inline SpinorField normalized(SpinorField f) {
  const double n = norm(f);
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateInputError("normalize: field has zero norm");
  f *= 1.0 / std::sqrt(n);
  return f;
}

inline SpinorField to_momentum(SpinorField f) {
  require(f.representation() == Representation::Position, "to_momentum: field already in momentum space");
  for (std::size_t c = 0; c < f.n_comp(); ++c)
    fft::forward(f.component(c), f.grid().nx(), f.grid().nz());
  f.set_representation(Representation::Momentum);
  return f;
}

inline SpinorField from_momentum(SpinorField f) {
  require(f.representation() == Representation::Momentum, "from_momentum: field already in position space");
  for (std::size_t c = 0; c < f.n_comp(); ++c)
    fft::inverse(f.component(c), f.grid().nx(), f.grid().nz());
  f.set_representation(Representation::Position);
  return f;
}

/// Single-component copy of component c.
inline SpinorField extract_component(const SpinorField& f, std::size_t c) {
  require(c < f.n_comp(), "extract_component: component index out of range");
  SpinorField out(f.grid(), 1, f.representation());
  std::copy(f.component(c).begin(), f.component(c).end(), out.component(0).begin());
  return out;
}

/// L2 distance sqrt(N[a - b]).
inline double distance(const SpinorField& a, const SpinorField& b) {
  require_same_shape(a, b, "distance");
  CompensatedSum acc;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t n = 0; n < da.size(); ++n) acc += std::norm(da[n] - db[n]);
  return std::sqrt(acc.value() * a.measure());
}

/// Normalized Gaussian wavepacket
///   psi_c(r) = w_c exp(-|r - center|^2 / (4 sigma^2)) exp(i k.r)
/// with |r - center| the periodic minimal-image distance. sigma = +inf gives a
/// plane wave.
inline SpinorField make_gaussian(const Grid2D& grid, Vec2 center, double sigma, Vec2 k,
                                 std::span<const cplx> spinor) {
  require(sigma > 0.0, "make_gaussian: sigma must be positive");
  if (sigma < 4.0 * std::max(grid.dx(), grid.dz()))
    throw ResolutionError("make_gaussian: sigma below 4 grid spacings");
  double w2 = 0.0;
  for (const auto& w : spinor) w2 += std::norm(w);
  if (!(w2 > 0.0)) throw DegenerateInputError("make_gaussian: zero spinor weight vector");
  const double inv_w = 1.0 / std::sqrt(w2);

  SpinorField f(grid, spinor.size());
  const double inv4s2 = std::isinf(sigma) ? 0.0 : 1.0 / (4.0 * sigma * sigma);
  parallel::for_each_index(0, grid.size(), [&](std::size_t n) {
    const Vec2 r = grid.position(n);
    const Vec2 d = grid.minimal_image(center, r);
    const cplx env = std::exp(-dot(d, d) * inv4s2) * std::polar(1.0, dot(k, r));
    for (std::size_t c = 0; c < spinor.size(); ++c) f.at(c, n) = spinor[c] * inv_w * env;
  });
  return normalized(std::move(f));
}

/// Spectral derivatives (d/dx psi, d/dz psi) of a position-space field. The
/// Nyquist bins carry no derivative.
inline std::pair<SpinorField, SpinorField> gradient(const SpinorField& f) {
  const Grid2D& g = f.grid();
  SpinorField fk = to_momentum(f);
  SpinorField gx = fk;
  SpinorField gz = fk;
  for (std::size_t c = 0; c < f.n_comp(); ++c) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double kx = (i == g.nx() / 2) ? 0.0 : g.kx(i);
      for (std::size_t j = 0; j < g.nz(); ++j) {
        const double kz = (j == g.nz() / 2) ? 0.0 : g.kz(j);
        const std::size_t n = g.index(i, j);
        gx.at(c, n) *= kI * kx;
        gz.at(c, n) *= kI * kz;
      }
    }
  }
  return {from_momentum(std::move(gx)), from_momentum(std::move(gz))};
}

struct Observables {
  double norm = 0.0;
  std::vector<double> populations;  // integral of |psi_c|^2 per component
  Vec2 centroid;
  Vec2 mean_momentum;  // canonical, from the momentum-space distribution
};

/// Density-weighted centroid on a periodic grid: circular mean for a reference
/// point, then the minimal-image mean displacement about it.
template <class Density>
Vec2 periodic_centroid(const Grid2D& g, Density&& rho) {
  CompensatedSum cx, sx, cz, sz, total;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double w = rho(n);
    const Vec2 r = g.position(n);
    const double ax = 2.0 * std::numbers::pi * (r.x - g.x0()) / g.lx();
    const double az = 2.0 * std::numbers::pi * (r.z - g.z0()) / g.lz();
    cx += w * std::cos(ax);
    sx += w * std::sin(ax);
    cz += w * std::cos(az);
    sz += w * std::sin(az);
    total += w;
  }
  // Fraction of a period in [0, 1), so every point lies inside the grid box.
  auto turn = [](double s, double c) {
    const double f = std::atan2(s, c) / (2.0 * std::numbers::pi);
    return f < 0.0 ? f + 1.0 : f;
  };
  const Vec2 ref{g.x0() + g.lx() * turn(sx.value(), cx.value()), g.z0() + g.lz() * turn(sz.value(), cz.value())};
  CompensatedSum mx, mz;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double w = rho(n);
    const Vec2 d = g.minimal_image(ref, g.position(n));
    mx += w * d.x;
    mz += w * d.z;
  }
  auto wrap = [](double v, double lo, double l) { return v - l * std::floor((v - lo) / l); };
  return {wrap(ref.x + mx.value() / total.value(), g.x0(), g.lx()),
          wrap(ref.z + mz.value() / total.value(), g.z0(), g.lz())};
}

inline Vec2 mean_momentum(const SpinorField& f) {
  const SpinorField fk = f.representation() == Representation::Momentum ? f : to_momentum(f);
  const Grid2D& g = f.grid();
  CompensatedSum px, pz, total;
  for (std::size_t c = 0; c < fk.n_comp(); ++c) {
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double w = std::norm(fk.at(c, n));
      const Vec2 k = g.wavevector(n);
      px += w * k.x;
      pz += w * k.z;
      total += w;
    }
  }
  if (!(total.value() > 0.0)) throw DegenerateInputError("mean_momentum: zero-norm field");
  return {px.value() / total.value(), pz.value() / total.value()};
}

inline Observables observables(const SpinorField& f) {
  require(f.representation() == Representation::Position, "observables: expects a position-space field");
  Observables obs;
  obs.norm = norm(f);
  if (!(obs.norm > 0.0)) throw DegenerateInputError("observables: zero-norm field");
  for (std::size_t c = 0; c < f.n_comp(); ++c) {
    CompensatedSum acc;
    for (const auto& v : f.component(c)) acc += std::norm(v);
    obs.populations.push_back(acc.value() * f.measure());
  }
  obs.centroid = periodic_centroid(f.grid(), [&](std::size_t n) { return f.density_at(n); });
  obs.mean_momentum = mean_momentum(f);
  return obs;
}

}  // namespace gimprint
