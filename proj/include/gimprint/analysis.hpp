// Turning fields into testable numbers: branch decomposition, packet
// statistics, fidelity and dark-subspace leakage.
#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "gimprint/core.hpp"
#include "gimprint/fields.hpp"
#include "gimprint/tripod.hpp"

namespace gimprint::analysis {

using tripod::Branch;
using tripod::TripodParams;

struct BranchDecomposition {
  double w_plus = 0.0;
  double w_minus = 0.0;
  /// Per-bin branch amplitudes in momentum space: component 0 = '+', 1 = '-'.
  SpinorField amplitudes;
  TripodParams params;
};

inline BranchDecomposition branch_decompose(const SpinorField& c, const TripodParams& p) {
  require(c.n_comp() == 2, "branch_decompose: expects a 2-component field");
  const SpinorField ck = c.representation() == Representation::Momentum ? c : to_momentum(c);
  const Grid2D& g = c.grid();
  SpinorField amp(g, 2, Representation::Momentum);
  CompensatedSum wp, wm;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double phi = tripod::wavevector_angle(g.wavevector(n), p);
    const Spinor2 v = {ck.at(0, n), ck.at(1, n)};
    amp.at(0, n) = vdot(tripod::dark_spinor(Branch::Plus, phi), v);
    amp.at(1, n) = vdot(tripod::dark_spinor(Branch::Minus, phi), v);
    wp += std::norm(amp.at(0, n));
    wm += std::norm(amp.at(1, n));
  }
  const double m = g.cell_area();
  return {wp.value() * m, wm.value() * m, std::move(amp), p};
}

/// Position-space dark field rebuilt from selected branch amplitudes.
inline SpinorField branch_recombine(const BranchDecomposition& d, bool plus = true, bool minus = true) {
  const Grid2D& g = d.amplitudes.grid();
  SpinorField ck(g, 2, Representation::Momentum);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double phi = tripod::wavevector_angle(g.wavevector(n), d.params);
    const Spinor2 sp = tripod::dark_spinor(Branch::Plus, phi);
    const Spinor2 sm = tripod::dark_spinor(Branch::Minus, phi);
    const cplx ap = plus ? d.amplitudes.at(0, n) : 0.0;
    const cplx am = minus ? d.amplitudes.at(1, n) : 0.0;
    ck.at(0, n) = ap * sp[0] + am * sm[0];
    ck.at(1, n) = ap * sp[1] + am * sm[1];
  }
  return from_momentum(std::move(ck));
}

/// |<a|b>|^2 / (N[a] N[b]).
inline double fidelity(const SpinorField& a, const SpinorField& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateInputError("fidelity: zero-norm field");
  return std::min(1.0, std::norm(inner(a, b)) / (na * nb));
}

inline double adiabaticity_leakage(const SpinorField& psi, const TripodParams& p) {
  return tripod::project_dark(psi, p).leakage;
}

struct Packet {
  Vec2 centroid;
  double weight = 0.0;       // norm of the packet's region
  double core_weight = 0.0;  // norm above the detection threshold
  Vec2 momentum;             // mean momentum over the region
};

/// Momentum density j_a(r) = Re psi^dag (-i d_a) psi, plus Re c^dag A_a c
/// when a dark-representation gauge is given (mechanical momentum).
inline std::pair<std::vector<double>, std::vector<double>> momentum_density(
    const SpinorField& f, const std::optional<TripodParams>& gauge) {
  const Grid2D& g = f.grid();
  const auto [gx, gz] = gradient(f);
  std::vector<double> jx(g.size(), 0.0), jz(g.size(), 0.0);
  for (std::size_t c = 0; c < f.n_comp(); ++c)
    for (std::size_t n = 0; n < g.size(); ++n) {
      jx[n] += (std::conj(f.at(c, n)) * gx.at(c, n)).imag();
      jz[n] += (std::conj(f.at(c, n)) * gz.at(c, n)).imag();
    }
  if (gauge) {
    require(f.n_comp() == 2, "momentum_density: gauge term needs a 2-component dark field");
    const auto [ax, az] = tripod::gauge_matrices(*gauge);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Spinor2 v = {f.at(0, n), f.at(1, n)};
      jx[n] += vdot(v, ax * v).real();
      jz[n] += vdot(v, az * v).real();
    }
  }
  return {std::move(jx), std::move(jz)};
}

/// Labels 4-connected regions (periodic) where the density reaches
/// threshold * max, then grows the labels breadth-first over the rest of the
/// grid so every point belongs to its nearest packet. Packets are returned in
/// scan order of their first core point.
inline std::vector<Packet> count_packets(const SpinorField& f, double threshold,
                                         const std::optional<TripodParams>& gauge = std::nullopt) {
  require(threshold > 0.0 && threshold < 1.0, "count_packets: threshold must lie in (0, 1)");
  require(f.representation() == Representation::Position, "count_packets: expects a position-space field");
  const Grid2D& g = f.grid();
  const std::size_t nx = g.nx(), nz = g.nz();
  std::vector<double> rho(g.size());
  double peak = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    rho[n] = f.density_at(n);
    peak = std::max(peak, rho[n]);
  }
  if (!(peak > 0.0)) return {};
  const double cut = threshold * peak;

  auto neighbours = [&](std::size_t n) {
    const std::size_t i = n / nz, j = n % nz;
    return std::array<std::size_t, 4>{g.index((i + 1) % nx, j), g.index((i + nx - 1) % nx, j),
                                      g.index(i, (j + 1) % nz), g.index(i, (j + nz - 1) % nz)};
  };

  constexpr int kNone = -1;
  std::vector<int> label(g.size(), kNone);
  std::vector<bool> core(g.size(), false);
  int blobs = 0;
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (rho[s] < cut || label[s] != kNone) continue;
    label[s] = blobs;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t n = queue.front();
      queue.pop_front();
      core[n] = true;
      for (std::size_t m : neighbours(n))
        if (label[m] == kNone && rho[m] >= cut) {
          label[m] = blobs;
          queue.push_back(m);
        }
    }
    ++blobs;
  }
  if (blobs == 0) return {};

  // Grow into the sub-threshold tail.
  for (std::size_t n = 0; n < g.size(); ++n)
    if (core[n]) queue.push_back(n);
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    for (std::size_t m : neighbours(n))
      if (label[m] == kNone) {
        label[m] = label[n];
        queue.push_back(m);
      }
  }

  const auto [jx, jz] = momentum_density(f, gauge);
  std::vector<std::size_t> argmax(blobs, g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto b = static_cast<std::size_t>(label[n]);
    if (argmax[b] == g.size() || rho[n] > rho[argmax[b]]) argmax[b] = n;
  }
  std::vector<CompensatedSum> w(blobs), wc(blobs), mx(blobs), mz(blobs), px(blobs), pz(blobs);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto b = static_cast<std::size_t>(label[n]);
    const Vec2 d = g.minimal_image(g.position(argmax[b]), g.position(n));
    w[b] += rho[n];
    if (core[n]) wc[b] += rho[n];
    mx[b] += rho[n] * d.x;
    mz[b] += rho[n] * d.z;
    px[b] += jx[n];
    pz[b] += jz[n];
  }
  const double m = g.cell_area();
  std::vector<Packet> out;
  for (std::size_t b = 0; b < static_cast<std::size_t>(blobs); ++b) {
    const double wt = w[b].value();
    const Vec2 ref = g.position(argmax[b]);
    out.push_back({{ref.x + mx[b].value() / wt, ref.z + mz[b].value() / wt},
                   wt * m,
                   wc[b].value() * m,
                   {px[b].value() / wt, pz[b].value() / wt}});
  }
  return out;
}

/// Packets of the '+' and '-' branch fields counted separately; overlapping
/// packets of different branches stay distinguishable.
inline std::vector<Packet> count_branch_packets(const SpinorField& c, const TripodParams& p,
                                                double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "count_branch_packets: threshold must lie in (0, 1)");
  const BranchDecomposition d = branch_decompose(c, p);
  const std::array<SpinorField, 2> parts = {branch_recombine(d, true, false),
                                            branch_recombine(d, false, true)};
  // One detection level for both branches, relative to the larger peak.
  std::array<double, 2> peaks{};
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t n = 0; n < c.grid().size(); ++n)
      peaks[b] = std::max(peaks[b], parts[b].density_at(n));
  const double level = threshold * std::max(peaks[0], peaks[1]);
  std::vector<Packet> out;
  for (std::size_t b = 0; b < 2; ++b) {
    if (!(peaks[b] > level)) continue;
    auto packets = count_packets(parts[b], level / peaks[b], p);
    out.insert(out.end(), packets.begin(), packets.end());
  }
  return out;
}

}  // namespace gimprint::analysis
