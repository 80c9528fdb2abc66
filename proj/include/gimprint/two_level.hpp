// Abelian geometric phases of a two-level atom dressed by one plane-wave laser.
//
// H(r) = (Delta/2)(|1><1| - |2><2|)
//      + (Omega0/2)(exp(-i k_l.r)|1><2| + exp(i k_l.r)|2><1|)
#pragma once

#include <cmath>
#include <utility>

#include "gimprint/core.hpp"
#include "gimprint/fields.hpp"
#include "gimprint/quadrature.hpp"
#include "gimprint/small_matrix.hpp"

namespace gimprint::two_level {

struct TwoLevelParams {
  double omega0 = 1.0;  // Rabi frequency, > 0
  double delta = 0.0;   // detuning
  Vec2 k_l{};           // laser wavevector
  double k_r_l = 1.0;   // |k_l| at resonance
  double gamma = 0.0;   // beam rotation, clockwise from +x
};

/// k_r^l (cos gamma, -sin gamma).
inline Vec2 rotated_wavevector(double k_r_l, double gamma) {
  return {k_r_l * std::cos(gamma), -k_r_l * std::sin(gamma)};
}

inline void validate(const TwoLevelParams& p) {
  require(p.omega0 > 0.0 && std::isfinite(p.omega0), "two_level: omega0 must be positive");
  require(std::isfinite(p.delta), "two_level: detuning must be finite");
}

/// Normalization chi(Delta) = sqrt(Omega0^2 + (sqrt(Omega0^2 + Delta^2) + Delta)^2).
inline double chi(double omega0, double delta) {
  const double s = std::hypot(omega0, delta) + delta;
  return std::hypot(omega0, s);
}

inline Mat2 hamiltonian(const TwoLevelParams& p, Vec2 r) {
  const cplx e = std::polar(1.0, dot(p.k_l, r));
  Mat2 h;
  h(0, 0) = 0.5 * p.delta;
  h(1, 1) = -0.5 * p.delta;
  h(0, 1) = 0.5 * p.omega0 * std::conj(e);
  h(1, 0) = 0.5 * p.omega0 * e;
  return h;
}

inline double energy_plus(const TwoLevelParams& p) { return 0.5 * std::hypot(p.omega0, p.delta); }

/// Upper dressed state (sqrt(Omega0^2+Delta^2) + Delta, Omega0 e^{i k_l.r}) / chi.
inline Spinor2 eigenstate_plus(const TwoLevelParams& p, Vec2 r) {
  validate(p);
  const double c = chi(p.omega0, p.delta);
  const double a = std::hypot(p.omega0, p.delta) + p.delta;
  return {cplx(a / c), (p.omega0 / c) * std::polar(1.0, dot(p.k_l, r))};
}

/// Lower dressed state; gauge fixed by a real non-negative first component.
inline Spinor2 eigenstate_minus(const TwoLevelParams& p, Vec2 r) {
  validate(p);
  const double c = chi(p.omega0, p.delta);
  const double a = std::hypot(p.omega0, p.delta) + p.delta;
  return {cplx(p.omega0 / c), -(a / c) * std::polar(1.0, dot(p.k_l, r))};
}

// ---------------------------------------------------------------------------
// Chirped detuning sweep

/// Detuning swept from delta1 to delta2 with the laser wavevector magnitude
/// varying linearly between k1 (at delta1) and k2 (at delta2), along a fixed
/// direction.
struct ChirpSweep {
  double delta1 = 20.0;
  double delta2 = -20.0;
  double k1 = 1.2;
  double k2 = 0.8;

  double dk_ddelta() const { return (k2 - k1) / (delta2 - delta1); }
  /// Wavevector magnitude where the sweep crosses resonance.
  double k_resonant() const { return k1 - delta1 * dk_ddelta(); }
  ChirpSweep reversed() const { return {delta2, delta1, k2, k1}; }
};

/// Integrand Omega0^2 / chi^2(Delta) of the chirp phase.
inline double chirp_connection_weight(double omega0, double delta) {
  const double c = chi(omega0, delta);
  return omega0 * omega0 / (c * c);
}

inline constexpr std::size_t kDefaultPanels = 10000;

/// integral_{from}^{to} Omega0^2/chi^2 dDelta by composite Simpson.
inline double chirp_phase_integral(double omega0, double from, double to,
                                   std::size_t panels = kDefaultPanels) {
  return simpson([omega0](double d) { return chirp_connection_weight(omega0, d); }, from, to, panels);
}

/// Phase-gradient magnitude g with beta(r) = -(r.k_hat) g, for any sweep
/// (including null and same-sign ones).
inline double chirp_phase_gradient(const ChirpSweep& s, double omega0,
                                   std::size_t panels = kDefaultPanels) {
  if (s.delta1 == s.delta2) return 0.0;
  return s.dk_ddelta() * chirp_phase_integral(omega0, s.delta1, s.delta2, panels);
}

/// Geometric phase beta(r) = i int <phi+| d/dDelta |phi+> dDelta for a sweep
/// that crosses resonance.
inline double chirp_berry_phase(const ChirpSweep& s, double omega0, Vec2 r, Vec2 k_hat,
                                std::size_t panels = kDefaultPanels) {
  require(s.delta1 * s.delta2 < 0.0, "chirp_berry_phase: detunings must lie on opposite sides of resonance");
  require(panels >= 1000, "chirp_berry_phase: need at least 1000 quadrature panels");
  require(omega0 > 0.0, "chirp_berry_phase: omega0 must be positive");
  return -dot(r, k_hat) * chirp_phase_gradient(s, omega0, panels);
}

/// Large-detuning limit -r.(k2 - k_r) k_hat.
inline double chirp_asymptotic_phase(const ChirpSweep& s, Vec2 r, Vec2 k_hat) {
  return -dot(r, k_hat) * (s.k2 - s.k_resonant());
}

/// env(r) |phi+(delta1, r)>: the state before the sweep.
inline SpinorField chirp_initial_state(const ChirpSweep& s, double omega0, Vec2 k_hat,
                                       const SpinorField& envelope) {
  require(envelope.n_comp() == 1, "chirp: envelope must be a scalar field");
  const TwoLevelParams p{omega0, s.delta1, s.k1 * k_hat, s.k_resonant(), 0.0};
  const Grid2D& g = envelope.grid();
  SpinorField out(g, 2);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Spinor2 v = eigenstate_plus(p, g.position(n));
    out.at(0, n) = envelope.at(0, n) * v[0];
    out.at(1, n) = envelope.at(0, n) * v[1];
  }
  return out;
}

struct ChirpResult {
  SpinorField field;
  double population_defect;  // 1 - (population of |2>) / norm
};

/// Imprints the chirp phase onto env(r) and follows the dressed state to
/// delta2, neglecting motion during the sweep and the global dynamical phase.
inline ChirpResult chirp_final_state(const ChirpSweep& s, double omega0, Vec2 k_hat,
                                     const SpinorField& envelope,
                                     std::size_t panels = kDefaultPanels) {
  require(envelope.n_comp() == 1, "chirp: envelope must be a scalar field");
  require(omega0 > 0.0, "chirp: omega0 must be positive");
  const double grad = chirp_phase_gradient(s, omega0, panels);
  const TwoLevelParams p{omega0, s.delta2, s.k2 * k_hat, s.k_resonant(), 0.0};
  const Grid2D& g = envelope.grid();
  SpinorField out(g, 2);
  parallel::for_each_index(0, g.size(), [&](std::size_t n) {
    const Vec2 r = g.position(n);
    const Spinor2 v = eigenstate_plus(p, r);
    const cplx a = envelope.at(0, n) * std::polar(1.0, -dot(r, k_hat) * grad);
    out.at(0, n) = a * v[0];
    out.at(1, n) = a * v[1];
  });
  const Observables obs = observables(out);
  return {std::move(out), 1.0 - obs.populations[1] / obs.norm};
}

/// Plane-wave variant: envelope exp(i k.r), normalized on the grid.
inline ChirpResult chirp_final_state(const ChirpSweep& s, double omega0, Vec2 k_hat, Vec2 carrier,
                                     const Grid2D& grid, std::size_t panels = kDefaultPanels) {
  const cplx one[] = {1.0};
  return chirp_final_state(s, omega0, k_hat,
                           make_gaussian(grid, {}, std::numeric_limits<double>::infinity(), carrier, one),
                           panels);
}

// ---------------------------------------------------------------------------
// Resonant beam rotation

/// i <phi+| d/dgamma |phi+> at polar point (R, theta), Delta = 0.
inline double rotation_connection(double k_r_l, double radius, double theta, double gamma) {
  return 0.5 * k_r_l * radius * std::sin(theta + gamma);
}

/// Closed-form phase for rotating the beam from 0 to alpha:
/// (k_r/2) [R cos theta - R cos(theta + alpha)].
inline double rotation_berry_phase(double alpha, double k_r_l, double radius, double theta) {
  return 0.5 * k_r_l * radius * (std::cos(theta) - std::cos(theta + alpha));
}

/// Phase gradients of the two components after the rotation (k = 0):
/// first = |1>, second = |2>.
inline std::pair<Vec2, Vec2> rotation_branch_wavevectors(double alpha, double k_r_l) {
  const double s = std::sin(0.5 * alpha);
  const double c = std::cos(0.5 * alpha);
  return {k_r_l * s * Vec2{s, c}, k_r_l * c * Vec2{c, -s}};
}

/// env(r) exp(i beta(r)) |phi+(gamma = alpha)>, with env carrying any carrier
/// wavevector. Requires a resonant laser.
inline SpinorField rotation_final_state(double alpha, const TwoLevelParams& p,
                                        const SpinorField& envelope) {
  validate(p);
  require(p.delta == 0.0, "rotation_final_state: detuning must be zero");
  require(envelope.n_comp() == 1, "rotation_final_state: envelope must be a scalar field");
  TwoLevelParams at_end = p;
  at_end.gamma = alpha;
  at_end.k_l = rotated_wavevector(p.k_r_l, alpha);
  const Grid2D& g = envelope.grid();
  SpinorField out(g, 2);
  parallel::for_each_index(0, g.size(), [&](std::size_t n) {
    const Vec2 r = g.position(n);
    const double beta =
        rotation_berry_phase(alpha, p.k_r_l, norm(r), std::atan2(r.z, r.x));
    const Spinor2 v = eigenstate_plus(at_end, r);
    const cplx a = envelope.at(0, n) * std::polar(1.0, beta);
    out.at(0, n) = a * v[0];
    out.at(1, n) = a * v[1];
  });
  return out;
}

}  // namespace gimprint::two_level
