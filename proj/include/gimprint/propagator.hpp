// Time evolution of spinor matter waves.
//
//  * evolve_dark_exact   - dark-representation H = (P^D)^2/2, exact in time
//  * free_propagate      - free particle, per component
//  * evolve_full_splitstep / adiabatic_imprint_full
//                        - -lap/2 + H_RWA4(r, t) + V_s, Strang splitting
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gimprint/core.hpp"
#include "gimprint/fields.hpp"
#include "gimprint/small_matrix.hpp"
#include "gimprint/tripod.hpp"

namespace gimprint::propagator {

using tripod::TripodParams;

/// Momentum-space 2x2 effective Hamiltonian
/// (1/2)[(k^2 + 2 kappa^2) + 2 kappa (k'_x sigma_x + k'_z sigma_z)], k' in the beam frame.
inline Mat2 dark_hamiltonian(Vec2 k, const TripodParams& p) {
  const double kap = p.kappa();
  const Vec2 kb = tripod::lab_to_beam(p, k);
  const double a = 0.5 * (dot(k, k) + 2.0 * kap * kap);
  return cplx(a) * Mat2::identity() + cplx(kap * kb.x) * pauli::x() + cplx(kap * kb.z) * pauli::z();
}

inline SpinorField evolve_dark_exact(const SpinorField& c, const TripodParams& p, double t) {
  require(c.n_comp() == 2 && c.representation() == Representation::Position,
          "evolve_dark_exact: expects a 2-component position-space field");
  SpinorField ck = to_momentum(c);
  const Grid2D& g = c.grid();
  const double kap = p.kappa();
  parallel::for_each_index(0, g.size(), [&](std::size_t n) {
    const Vec2 k = g.wavevector(n);
    const Vec2 kb = tripod::lab_to_beam(p, k);
    const Mat2 u = exp_pauli_xz(t, 0.5 * (dot(k, k) + 2.0 * kap * kap), kap * kb.x, kap * kb.z);
    const Spinor2 v = u * Spinor2{ck.at(0, n), ck.at(1, n)};
    ck.at(0, n) = v[0];
    ck.at(1, n) = v[1];
  });
  return from_momentum(std::move(ck));
}

/// <c|H_D^eff|c> / <c|c>.
inline double dark_energy(const SpinorField& c, const TripodParams& p) {
  const SpinorField ck = to_momentum(c);
  const Grid2D& g = c.grid();
  CompensatedSum e, total;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Spinor2 v = {ck.at(0, n), ck.at(1, n)};
    e += vdot(v, dark_hamiltonian(g.wavevector(n), p) * v).real();
    total += std::norm(v[0]) + std::norm(v[1]);
  }
  if (!(total.value() > 0.0)) throw DegenerateInputError("dark_energy: zero-norm field");
  return e.value() / total.value();
}

/// Exact free evolution exp(-i k^2 t / 2) for every component.
inline SpinorField free_propagate(const SpinorField& f, double t) {
  require(f.representation() == Representation::Position, "free_propagate: expects a position-space field");
  SpinorField fk = to_momentum(f);
  const Grid2D& g = f.grid();
  for (std::size_t c = 0; c < f.n_comp(); ++c) {
    auto comp = fk.component(c);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec2 k = g.wavevector(n);
      comp[n] *= std::polar(1.0, -0.5 * dot(k, k) * t);
    }
  }
  return from_momentum(std::move(fk));
}

// ---------------------------------------------------------------------------
// Full four-level Hamiltonian

struct EvolutionSpec {
  double dt = 1e-4;
  double t_end = 0.0;
  std::vector<double> snapshot_times;  // observation times within [0, t_end]
};

/// Beam configuration as a function of time.
using Schedule = std::function<TripodParams(double)>;

struct MetricsRow {
  double t = 0.0;
  double norm = 0.0;
  std::vector<double> populations;
  Vec2 centroid;
  Vec2 momentum;
  double leakage = 0.0;
};

struct FullRun {
  SpinorField psi;
  std::vector<MetricsRow> trail;
};

using Observer = std::function<void(double t, const SpinorField& psi, const TripodParams& p)>;

/// Largest change of any laser phase on the grid allowed between consecutive
/// schedule samples.
inline constexpr double kMaxPhaseJump = 1.0;

inline MetricsRow metrics_row(double t, const SpinorField& psi, const TripodParams& p) {
  const Observables obs = observables(psi);
  MetricsRow row{t, obs.norm, obs.populations, obs.centroid, obs.mean_momentum, 0.0};
  if (psi.n_comp() == 4) row.leakage = tripod::project_dark(psi, p).leakage;
  return row;
}

namespace detail {

/// exp(-i tau H_RWA4) at every point, using the {0, 0, +-Omega} spectrum of
/// the coupling between |0> and the bright combination of ground states.
inline void internal_step(SpinorField& psi, const TripodParams& p, double tau) {
  const Grid2D& g = psi.grid();
  const double k = p.k_r_l;
  const double cg = std::cos(p.gamma);
  const double sg = std::sin(p.gamma);
  const double side = p.omega0 * std::sin(p.xi) / std::numbers::sqrt2;
  const double axial = p.omega0 * std::cos(p.xi);
  const double total = std::sqrt(2.0 * side * side + axial * axial);
  if (total == 0.0) return;
  // e^{i k x'} and e^{i k z'} factor into per-x and per-z tables
  std::vector<cplx> ex(g.nx()), ex3(g.nx()), ez(g.nz()), ez3(g.nz());
  for (std::size_t i = 0; i < g.nx(); ++i) {
    ex[i] = std::polar(1.0, k * g.x(i) * cg);
    ex3[i] = std::polar(1.0, k * g.x(i) * sg);
  }
  for (std::size_t j = 0; j < g.nz(); ++j) {
    const double z = g.z(j) + p.dz_shift;
    ez[j] = std::polar(1.0, -k * z * sg);
    ez3[j] = std::polar(1.0, k * z * cg);
  }
  const double c = std::cos(total * tau);
  const double s = std::sin(total * tau);
  auto p0 = psi.component(0);
  auto p1 = psi.component(1);
  auto p2 = psi.component(2);
  auto p3 = psi.component(3);
  parallel::for_each_index(0, g.nx(), [&](std::size_t i) {
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const std::size_t n = g.index(i, j);
      const cplx eb = ex[i] * ez[j];
      const cplx e3 = ex3[i] * ez3[j];
      const cplx o1 = side * std::conj(eb);
      const cplx o2 = side * eb;
      const cplx o3 = axial * e3;
      const cplx b = (o1 * p1[n] + o2 * p2[n] + o3 * p3[n]) / total;
      const cplx a0 = p0[n];
      p0[n] = c * a0 - kI * s * b;
      const cplx db = (c * b - kI * s * a0 - b) / total;
      p1[n] += db * std::conj(o1);
      p2[n] += db * std::conj(o2);
      p3[n] += db * std::conj(o3);
    }
  });
}

/// exp(-i tau (k^2/2 + vs |3><3|)); vs is constant so it commutes with the
/// kinetic term.
inline void kinetic_step(SpinorField& psi, const std::vector<double>& half_k2, double vs, double tau) {
  const Grid2D& g = psi.grid();
  for (std::size_t c = 0; c < psi.n_comp(); ++c) {
    auto comp = psi.component(c);
    fft::forward(comp, g.nx(), g.nz());
    const double shift = (c == 3) ? vs : 0.0;
    parallel::for_each_index(0, g.size(), [&](std::size_t n) {
      comp[n] *= std::polar(1.0, -tau * (half_k2[n] + shift));
    });
    fft::inverse(comp, g.nx(), g.nz());
  }
}

inline double phase_jump(const TripodParams& a, const TripodParams& b, double r_max) {
  return std::max(a.k_r_l, b.k_r_l) *
         (std::abs(a.dz_shift - b.dz_shift) + r_max * std::abs(a.gamma - b.gamma));
}

}  // namespace detail

/// Strang-split evolution under -lap/2 + H_RWA4(r, t) + vs |3><3|. The beam
/// schedule is sampled at step midpoints. The observer (and the metrics trail)
/// sees the field at t = 0, at every snapshot time and at t_end.
inline FullRun evolve_full_splitstep(SpinorField psi, const EvolutionSpec& spec,
                                     const Schedule& schedule, double vs,
                                     const Observer& observer = {}) {
  require(psi.n_comp() == 4 && psi.representation() == Representation::Position,
          "evolve_full_splitstep: expects a 4-component position-space field");
  require(spec.dt > 0.0 && spec.t_end >= 0.0, "evolve_full_splitstep: need dt > 0 and t_end >= 0");
  const Grid2D& g = psi.grid();
  const auto steps = static_cast<std::size_t>(std::ceil(spec.t_end / spec.dt - 1e-9));
  const double dt = steps > 0 ? spec.t_end / static_cast<double>(steps) : spec.dt;

  // Preconditions: Rabi scale resolved, schedule continuous.
  const double r_max = g.max_radius();
  TripodParams prev = schedule(0.5 * dt);
  for (std::size_t s = 0; s < steps; ++s) {
    const TripodParams cur = schedule((static_cast<double>(s) + 0.5) * dt);
    tripod::validate(cur);
    if (cur.omega0 > 0.0 && dt > 0.1 / cur.omega0 * (1.0 + 1e-12))
      throw ValidationError("evolve_full_splitstep: dt = " + std::to_string(dt) +
                            " exceeds 0.1/omega0 = " + std::to_string(0.1 / cur.omega0));
    if (detail::phase_jump(prev, cur, r_max) > kMaxPhaseJump)
      throw ValidationError("evolve_full_splitstep: schedule discontinuity at t = " +
                            std::to_string(s * dt));
    prev = cur;
  }
  for (double ts : spec.snapshot_times)
    require(ts >= 0.0 && ts <= spec.t_end * (1.0 + 1e-12), "evolve_full_splitstep: snapshot time outside [0, t_end]");

  std::vector<bool> observe(steps + 1, false);
  observe.front() = true;
  observe.back() = true;
  for (double ts : spec.snapshot_times)
    observe[std::min(steps, static_cast<std::size_t>(std::llround(ts / dt)))] = true;

  std::vector<double> half_k2(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec2 k = g.wavevector(n);
    half_k2[n] = 0.5 * dot(k, k);
  }

  FullRun run{std::move(psi), {}};
  auto emit = [&](std::size_t s) {
    const double t = static_cast<double>(s) * dt;
    const TripodParams p = schedule(t);
    run.trail.push_back(metrics_row(t, run.psi, p));
    if (observer) observer(t, run.psi, p);
  };

  emit(0);
  if (steps == 0) return run;
  detail::kinetic_step(run.psi, half_k2, vs, 0.5 * dt);
  for (std::size_t s = 0; s < steps; ++s) {
    detail::internal_step(run.psi, schedule((static_cast<double>(s) + 0.5) * dt), dt);
    const bool last = (s + 1 == steps);
    if (last || observe[s + 1]) {
      detail::kinetic_step(run.psi, half_k2, vs, 0.5 * dt);
      emit(s + 1);
      if (!last) detail::kinetic_step(run.psi, half_k2, vs, 0.5 * dt);
    } else {
      detail::kinetic_step(run.psi, half_k2, vs, dt);
    }
  }
  return run;
}

struct ImprintPath {
  enum class Kind { Translation, Rotation };
  Kind kind = Kind::Translation;
  double amount = 0.0;  // d_z for translations, alpha for rotations
  int sign = 1;         // translation direction, +1 = beams move along -z
};

/// Beam parameters after sweeping fraction f in [0, 1] of the path.
inline TripodParams along_path(const TripodParams& start, const ImprintPath& path, double f) {
  TripodParams q = start;
  if (path.kind == ImprintPath::Kind::Translation)
    q.dz_shift += static_cast<double>(path.sign) * path.amount * f;
  else
    q.gamma += path.amount * f;
  return q;
}

struct AdiabaticImprint {
  SpinorField psi;
  TripodParams params;  // at the end of the sweep
  double leakage;       // bright-state population fraction at the end
  std::vector<MetricsRow> trail;
};

/// Maximum tolerated bright-state leakage after a sweep.
inline constexpr double kMaxLeakage = 0.05;

/// Sweeps the beams linearly along `path` over `duration` under the full
/// Hamiltonian.
inline AdiabaticImprint adiabatic_imprint_full(const SpinorField& psi, const ImprintPath& path,
                                               double duration, const TripodParams& start,
                                               double dt, std::optional<double> vs = std::nullopt,
                                               const Observer& observer = {}) {
  require(duration >= 0.0, "adiabatic_imprint_full: duration must be non-negative");
  const double shift = vs ? *vs : tripod::vs_shift(start);
  const Schedule sched = [&](double t) {
    return along_path(start, path, duration > 0.0 ? std::clamp(t / duration, 0.0, 1.0) : 1.0);
  };
  FullRun run = evolve_full_splitstep(psi, {dt, duration, {}}, sched, shift, observer);
  const TripodParams end = along_path(start, path, 1.0);
  const double leak = tripod::project_dark(run.psi, end).leakage;
  if (leak > kMaxLeakage)
    throw AdiabaticityError("adiabatic_imprint_full: dark-state leakage " + std::to_string(leak) +
                                " exceeds " + std::to_string(kMaxLeakage) +
                                " (increase omega0 or the sweep duration)",
                            leak);
  return {std::move(run.psi), end, leak, std::move(run.trail)};
}

}  // namespace gimprint::propagator
