// Invariant suite behind `gimprint verify`: every module property checked on
// reduced grids, each reported with its measured residual.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gimprint/analysis.hpp"
#include "gimprint/config.hpp"
#include "gimprint/fields.hpp"
#include "gimprint/parallel.hpp"
#include "gimprint/propagator.hpp"
#include "gimprint/quadrature.hpp"
#include "gimprint/rk4.hpp"
#include "gimprint/runner.hpp"
#include "gimprint/snapshot.hpp"
#include "gimprint/tripod.hpp"
#include "gimprint/two_level.hpp"

namespace gimprint::invariants {

struct Check {
  std::string name;
  double measured = 0.0;
  std::string criterion;  // human-readable acceptance rule for `measured`
  bool pass = false;
};

inline Check at_most(std::string name, double measured, double tol) {
  return {std::move(name), measured, "<= " + io::format_double(tol), measured <= tol};
}

inline Check at_least(std::string name, double measured, double bound) {
  return {std::move(name), measured, ">= " + io::format_double(bound), measured >= bound};
}

inline Check within(std::string name, double measured, double target, double tol) {
  return {std::move(name), measured, io::format_double(target) + " +- " + io::format_double(tol),
          std::abs(measured - target) <= tol};
}

inline constexpr double kPi = std::numbers::pi;

/// Grid used by every field-level check.
inline Grid2D verify_grid() { return Grid2D(128, 128, 64.0, 64.0); }

inline SpinorField random_field(const Grid2D& g, std::size_t n_comp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpinorField f(g, n_comp);
  for (auto& v : f.data()) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = {re, im};
  }
  return normalized(std::move(f));
}

/// Field shifted by `cells` grid cells along x (periodic).
inline SpinorField roll_x(const SpinorField& f, std::size_t cells) {
  const Grid2D& g = f.grid();
  SpinorField out(g, f.n_comp());
  for (std::size_t c = 0; c < f.n_comp(); ++c)
    for (std::size_t i = 0; i < g.nx(); ++i)
      for (std::size_t j = 0; j < g.nz(); ++j)
        out.at(c, g.index((i + cells) % g.nx(), j)) = f.at(c, g.index(i, j));
  return out;
}

inline double max_abs_diff(const SpinorField& a, const SpinorField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.data().size(); ++n) m = std::max(m, std::abs(a.data()[n] - b.data()[n]));
  return m;
}

// ---------------------------------------------------------------------------
// fields

inline std::vector<Check> field_checks() {
  std::vector<Check> out;
  const Grid2D g = verify_grid();
  const SpinorField f = random_field(g, 3, 11);
  const SpinorField fk = to_momentum(f);
  out.push_back(at_most("fields: Parseval |N[F psi] - N[psi]|", std::abs(norm(fk) - norm(f)), 1e-12));
  out.push_back(at_most("fields: spectral round trip", max_abs_diff(from_momentum(fk), f), 1e-12));

  const SpinorField shifted_k = to_momentum(roll_x(f, 1));
  double trans = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < g.size(); ++n) {
      const cplx expect = fk.at(c, n) * std::polar(1.0, -g.wavevector(n).x * g.dx());
      trans = std::max(trans, std::abs(shifted_k.at(c, n) - expect));
    }
  out.push_back(at_most("fields: one-cell shift multiplies bins by e^{-ik.d}", trans, 1e-10));

  const cplx w[] = {1.0, 0.5 * kI};
  const SpinorField pk = make_gaussian(g, {3.0, -2.0}, 4.0, {0.7, -0.4}, w);
  SpinorField phased = pk;
  phased *= std::polar(1.0, 0.937);
  const Observables a = observables(pk);
  const Observables b = observables(phased);
  double gauge = std::abs(a.norm - b.norm);
  for (std::size_t c = 0; c < 2; ++c) gauge = std::max(gauge, std::abs(a.populations[c] - b.populations[c]));
  gauge = std::max({gauge, norm(a.centroid - b.centroid), norm(a.mean_momentum - b.mean_momentum)});
  out.push_back(at_most("fields: observables invariant under global phase", gauge, 1e-14));

  const Observables s = observables(roll_x(pk, 8));
  const double equiv = std::max(std::abs(s.centroid.x - a.centroid.x - 8.0 * g.dx()),
                                std::max(std::abs(s.centroid.z - a.centroid.z), norm(s.mean_momentum - a.mean_momentum)));
  out.push_back(at_most("fields: observables equivariant under translation", equiv, 1e-10));
  return out;
}

// ---------------------------------------------------------------------------
// two_level

inline std::vector<Check> two_level_checks() {
  std::vector<Check> out;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double resid = 0.0, ortho = 0.0;
  for (int i = 0; i < 100; ++i) {
    two_level::TwoLevelParams p;
    p.omega0 = 0.1 + 5.0 * std::abs(u(rng));
    p.delta = 40.0 * u(rng);
    p.k_l = {2.0 * u(rng), 2.0 * u(rng)};
    const Vec2 r{30.0 * u(rng), 30.0 * u(rng)};
    const Mat2 h = two_level::hamiltonian(p, r);
    const Spinor2 v = two_level::eigenstate_plus(p, r);
    const double e = two_level::energy_plus(p);
    const Spinor2 hv = h * v;
    for (std::size_t q = 0; q < 2; ++q) resid = std::max(resid, std::abs(hv[q] - e * v[q]));
    ortho = std::max(ortho, std::abs(vdot(v, two_level::eigenstate_minus(p, r))));
  }
  out.push_back(at_most("two_level: eigen-residual |H v - E v|", resid, 1e-12));
  out.push_back(at_most("two_level: <phi+|phi->", ortho, 1e-14));

  double quad = 0.0, closure = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = 2.0 * kPi * u(rng);
    const double radius = 20.0 * std::abs(u(rng));
    const double theta = kPi * u(rng);
    const double closed = two_level::rotation_berry_phase(alpha, 1.3, radius, theta);
    const double numeric =
        simpson([&](double gam) { return two_level::rotation_connection(1.3, radius, theta, gam); }, 0.0, alpha, 2000);
    quad = std::max(quad, std::abs(closed - numeric));
    const double back = two_level::rotation_berry_phase(-alpha, 1.3, radius, theta + alpha);
    closure = std::max({closure, std::abs(closed + back),
                        std::abs(two_level::rotation_berry_phase(2.0 * kPi, 1.3, radius, theta))});
  }
  out.push_back(at_most("two_level: rotation phase closed form vs quadrature", quad, 1e-9));
  const two_level::ChirpSweep sweep;
  const Vec2 r{3.7, -1.2};
  const double chirp_loop = two_level::chirp_berry_phase(sweep, 1.0, r, {1.0, 0.0}) +
                            two_level::chirp_berry_phase(sweep.reversed(), 1.0, r, {1.0, 0.0});
  out.push_back(at_most("two_level: closed detuning loop phase", std::abs(chirp_loop), 1e-10));
  out.push_back(at_most("two_level: closed rotation loop phase", closure, 1e-10));

  // Branch momenta of the rotated state: one momentum-space peak per
  // component at the predicted wavevector.
  const Grid2D g(128, 128, 128.0, 128.0);
  const cplx one[] = {1.0};
  const SpinorField env = make_gaussian(g, {}, 12.0, {}, one);
  double worst = 0.0;
  for (double alpha : {0.0, kPi / 4, kPi / 2, kPi, 3 * kPi / 2}) {
    const two_level::TwoLevelParams p{1.0, 0.0, {1.0, 0.0}, 1.0, 0.0};
    const SpinorField fk = to_momentum(two_level::rotation_final_state(alpha, p, env));
    const auto [k1, k2] = two_level::rotation_branch_wavevectors(alpha, 1.0);
    const std::array<Vec2, 2> expect = {k1, k2};
    for (std::size_t c = 0; c < 2; ++c) {
      std::size_t best = 0;
      for (std::size_t n = 0; n < g.size(); ++n)
        if (std::norm(fk.at(c, n)) > std::norm(fk.at(c, best))) best = n;
      const Vec2 d = g.wavevector(best) - expect[c];
      worst = std::max({worst, std::abs(d.x) / g.dkx(), std::abs(d.z) / g.dkz()});
    }
  }
  out.push_back(at_most("two_level: rotated-state peaks off prediction (bins)", worst, 1.0));
  return out;
}

// ---------------------------------------------------------------------------
// tripod

using DarkStatesFn = std::function<tripod::DarkFrame(const tripod::TripodParams&, Vec2)>;

/// Beam configurations used by the presets.
inline std::vector<tripod::TripodParams> preset_beams() {
  std::vector<tripod::TripodParams> out;
  for (auto [gamma, dz] : {std::pair{0.0, 0.0}, std::pair{0.0, kPi / 4}, std::pair{3 * kPi / 2, 0.0},
                           std::pair{-kPi / 2, 0.0}, std::pair{0.7, 0.3}}) {
    tripod::TripodParams p;
    p.gamma = gamma;
    p.dz_shift = dz;
    out.push_back(p);
  }
  return out;
}

/// max |H D_i| / omega0 over the verify grid for every preset beam setting.
inline Check check_dark_residual(const DarkStatesFn& dark = tripod::dark_states) {
  const Grid2D g = verify_grid();
  double worst = 0.0;
  for (const tripod::TripodParams& p : preset_beams())
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec2 r = g.position(n);
      const Mat4 h = tripod::h_rwa4(p, r);
      const tripod::DarkFrame f = dark(p, r);
      for (const Spinor4* d : {&f.d1, &f.d2}) {
        const Spinor4 hd = h * *d;
        for (const cplx& v : hd) worst = std::max(worst, std::abs(v) / p.omega0);
      }
    }
  return at_most("tripod: dark-state residual |H D| / omega0", worst, 1e-12);
}

/// <c|[P_dark(-lap/2 + vs|3><3|) - (P^D)^2/2]|c> must be a constant times c.
inline double projected_hamiltonian_residual(const tripod::TripodParams& p, const SpinorField& c) {
  const Grid2D& g = c.grid();
  SpinorField psi = tripod::embed_dark(c, p);
  const double vs = tripod::vs_shift(p);
  SpinorField hk = to_momentum(psi);
  for (std::size_t q = 0; q < 4; ++q)
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec2 k = g.wavevector(n);
      hk.at(q, n) *= 0.5 * dot(k, k) + (q == 3 ? vs : 0.0);
    }
  const SpinorField projected = tripod::project_dark(from_momentum(std::move(hk)), p).c;
  const auto [px, pz] = tripod::p_dark_apply(c, p);
  const SpinorField pxx = tripod::p_dark_apply(px, p).first;
  const SpinorField pzz = tripod::p_dark_apply(pz, p).second;
  SpinorField diff = projected;
  for (std::size_t n = 0; n < diff.data().size(); ++n)
    diff.data()[n] -= 0.5 * (pxx.data()[n] + pzz.data()[n]);
  const cplx offset = inner(c, diff) / norm(c);
  SpinorField rest = diff;
  for (std::size_t n = 0; n < rest.data().size(); ++n) rest.data()[n] -= offset * c.data()[n];
  return std::sqrt(norm(rest) / norm(c));
}

inline std::vector<Check> tripod_checks() {
  std::vector<Check> out;
  out.push_back(check_dark_residual());
  const Grid2D g = verify_grid();

  double ortho = 0.0;
  for (const tripod::TripodParams& p : preset_beams())
    for (std::size_t n = 0; n < g.size(); n += 7) {
      const tripod::DarkFrame f = tripod::dark_states(p, g.position(n));
      ortho = std::max({ortho, std::abs(vdot(f.d1, f.d1) - 1.0), std::abs(vdot(f.d2, f.d2) - 1.0),
                        std::abs(vdot(f.d1, f.d2))});
    }
  out.push_back(at_most("tripod: dark states orthonormal", ortho, 1e-13));

  const tripod::TripodParams p0;
  out.push_back(at_most("tripod: kappa' = sqrt2 kappa",
                        std::abs(p0.kappa_prime() - std::numbers::sqrt2 * p0.kappa()) / p0.kappa(), 1e-15));

  double gauge = 0.0;
  for (double gamma : {0.0, 0.7, 3 * kPi / 2}) {
    tripod::TripodParams p;
    p.gamma = gamma;
    const SpinorField c = tripod::dark_packet(tripod::Branch::Minus, {0.6, -0.3}, g, {2.0, 1.0}, 4.0, p);
    const Vec2 mech = tripod::mechanical_momentum(c, p);
    const Vec2 canon = mean_momentum(tripod::embed_dark(c, p));
    gauge = std::max(gauge, norm(mech - canon));
  }
  out.push_back(at_most("tripod: mechanical momentum = full canonical momentum", gauge, 1e-8));

  double w_spread = 0.0, w_offdiag = 0.0;
  {
    const Mat2 w0 = tripod::scalar_potential(p0, {});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (int i = 0; i < 10; ++i) {
      const Mat2 w = tripod::scalar_potential(p0, {u(rng), u(rng)});
      w_spread = std::max(w_spread, max_abs(w - w0));
      w_offdiag = std::max(w_offdiag, std::abs(w(0, 1)));
    }
  }
  out.push_back(at_most("tripod: scalar potential constant in space", w_spread, 1e-10));
  out.push_back(at_most("tripod: scalar potential dark coupling W12", w_offdiag, 1e-10));
  {
    const SpinorField c = tripod::dark_packet(tripod::Branch::Plus, {0.8, 0.3}, g, {-1.0, 2.0}, 3.0, p0);
    out.push_back(at_most("tripod: projected Hamiltonian minus (P^D)^2/2 is constant",
                          projected_hamiltonian_residual(p0, c), 1e-8));
  }

  // Imprint maps: unitary and local.
  const SpinorField c = random_field(g, 2, 17);
  const auto tr = tripod::imprint_translation(c, p0, kPi / 4, 1);
  const auto rot = tripod::imprint_rotation(c, p0, 3 * kPi / 2, 64000);
  out.push_back(at_most("tripod: translation imprint norm change", std::abs(norm(tr.c) - norm(c)), 1e-10));
  out.push_back(at_most("tripod: rotation imprint norm change", std::abs(norm(rot.c) - norm(c)), 1e-10));
  {
    SpinorField delta(g, 2);
    const std::size_t site = g.index(37, 90);
    delta.at(0, site) = 0.6;
    delta.at(1, site) = 0.8 * kI;
    const auto img = tripod::imprint_rotation(delta, p0, 3 * kPi / 2, 64000);
    double outside = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n)
      if (n != site) outside = std::max(outside, std::abs(img.c.at(0, n)) + std::abs(img.c.at(1, n)));
    out.push_back(at_most("tripod: rotation imprint is pointwise local", outside, 0.0));
  }

  // Constant connection through the generic RK4 integrator reproduces the
  // translation phases.
  {
    const double d = kPi / 4;
    const Mat2 gen = p0.kappa() * pauli::z();
    const Mat2 u = rk4_propagator<2>([&](double) { return gen; }, 0.0, d, 2000);
    const Spinor2 v{0.6, 0.8 * kI};
    const Spinor2 via_rk4 = u * v;
    SpinorField one(Grid2D(16, 16, 16.0, 16.0), 2);
    one.at(0, 5) = v[0];
    one.at(1, 5) = v[1];
    const auto mapped = tripod::imprint_translation(one, p0, d, 1);
    const double err = std::max(std::abs(mapped.c.at(0, 5) - via_rk4[0]), std::abs(mapped.c.at(1, 5) - via_rk4[1]));
    out.push_back(at_most("tripod: RK4 of constant connection = translation phases", err, 1e-10));
  }
  {
    const SpinorField minus = tripod::dark_packet(tripod::Branch::Minus, {1.0, 0.0}, g, {}, 6.0, p0);
    const auto split = tripod::imprint_translation(minus, p0, kPi / 4, 1);
    const auto d = analysis::branch_decompose(split.c, split.params);
    out.push_back(at_most("tripod: branch weights after pi/4 translation = 1/2",
                          std::max(std::abs(d.w_plus - 0.5), std::abs(d.w_minus - 0.5)), 1e-10));
  }
  return out;
}

// ---------------------------------------------------------------------------
// rotation integrator

/// |U_back U_fwd - I| at the outermost grid radius with `steps` RK4 steps.
inline double rotation_reversibility(std::size_t steps) {
  const tripod::TripodParams p;
  const double r = verify_grid().max_radius();
  const double a = 3 * kPi / 2;
  const Mat2 f = tripod::rotation_propagator(p.kappa(), r, 0.3, a, steps);
  const Mat2 b = tripod::rotation_propagator(p.kappa(), r, 0.3 + a, -a, steps);
  return max_abs(b * f - Mat2::identity());
}

inline std::vector<Check> rotation_checks() {
  std::vector<Check> out;
  const tripod::TripodParams p;
  const Grid2D g = verify_grid();
  const double a = 3 * kPi / 2;
  const Mat2 u = tripod::rotation_propagator(p.kappa(), g.max_radius(), 0.0, a, 64000);
  out.push_back(at_most("rotation: RK4 unitarity residual at the outermost radius",
                        max_abs(u.adjoint() * u - Mat2::identity()), 1e-10));
  const SpinorField c = tripod::dark_packet(tripod::Branch::Minus, {0.0, -1.0}, g, {}, 5.0, p);
  const auto fwd = tripod::imprint_rotation(c, p, a, 64000);
  const auto back = tripod::imprint_rotation(fwd.c, fwd.params, -a, 64000);
  out.push_back(at_least("rotation: forward-backward fidelity", analysis::fidelity(back.c, c), 1.0 - 1e-8));
  const std::size_t n0 = tripod::min_rotation_steps(p, g, a);
  const double ratio = rotation_reversibility(n0) / rotation_reversibility(2 * n0);
  out.push_back(at_least("rotation: reversibility gain when doubling RK4 steps", ratio, 14.0));
  // Branch densities per k are conserved after the imprint.
  const SpinorField t0 = propagator::evolve_dark_exact(fwd.c, fwd.params, 0.0);
  const auto d0 = analysis::branch_decompose(t0, fwd.params);
  const auto d1 = analysis::branch_decompose(propagator::evolve_dark_exact(fwd.c, fwd.params, 7.5), fwd.params);
  double change = 0.0;
  for (std::size_t n = 0; n < d0.amplitudes.data().size(); ++n)
    change = std::max(change, std::abs(std::norm(d0.amplitudes.data()[n]) - std::norm(d1.amplitudes.data()[n])));
  out.push_back(at_most("rotation: post-imprint branch density per k time-invariant", change, 1e-10));
  return out;
}

// ---------------------------------------------------------------------------
// propagator

/// Error of the full split-step imprint at dt, dt/2 against dt/8.
inline std::pair<double, double> richardson_errors(double dt) {
  const Grid2D g(64, 64, 32.0, 32.0);
  tripod::TripodParams q;
  q.omega0 = 100.0;
  const SpinorField psi0 =
      tripod::embed_dark(tripod::dark_packet(tripod::Branch::Minus, {1.0, 0.0}, g, {}, 3.0, q), q);
  const propagator::ImprintPath path{propagator::ImprintPath::Kind::Translation, kPi / 4, 1};
  auto at = [&](double h) { return propagator::adiabatic_imprint_full(psi0, path, 0.2, q, h).psi; };
  const SpinorField ref = at(dt / 8.0);
  return {distance(at(dt), ref), distance(at(dt / 2.0), ref)};
}

inline std::vector<Check> propagator_checks() {
  std::vector<Check> out;
  const Grid2D g = verify_grid();
  const tripod::TripodParams p;
  const SpinorField c = tripod::dark_packet(tripod::Branch::Minus, {0.8, 0.4}, g, {1.0, -2.0}, 5.0, p);
  const SpinorField c_rnd = random_field(g, 2, 31);

  const SpinorField u_full = propagator::evolve_dark_exact(c_rnd, p, 3.0);
  out.push_back(at_most("propagator: dark evolution norm change", std::abs(norm(u_full) - 1.0), 1e-12));
  const SpinorField u_half2 = propagator::evolve_dark_exact(propagator::evolve_dark_exact(c_rnd, p, 1.5), p, 1.5);
  out.push_back(at_most("propagator: U(t/2)^2 = U(t)", distance(u_half2, u_full), 1e-12));
  out.push_back(at_most("propagator: dark energy conserved",
                        std::abs(propagator::dark_energy(propagator::evolve_dark_exact(c, p, 20.0), p) -
                                 propagator::dark_energy(c, p)),
                        1e-10));
  {
    const auto d0 = analysis::branch_decompose(c, p);
    const auto d1 = analysis::branch_decompose(propagator::evolve_dark_exact(c, p, 12.0), p);
    double change = 0.0;
    for (std::size_t n = 0; n < d0.amplitudes.data().size(); ++n)
      change = std::max(change, std::abs(std::norm(d0.amplitudes.data()[n]) - std::norm(d1.amplitudes.data()[n])));
    out.push_back(at_most("propagator: branch density per k time-invariant", change, 1e-10));
  }
  {
    const cplx one[] = {1.0};
    const double sigma = 3.0, t = 4.0;
    const SpinorField f = propagator::free_propagate(make_gaussian(g, {}, sigma, {}, one), t);
    CompensatedSum x2;
    for (std::size_t n = 0; n < g.size(); ++n) x2 += f.density_at(n) * g.position(n).x * g.position(n).x;
    const double width2 = x2.value() * g.cell_area();
    const double expect = sigma * sigma + std::pow(t / (2.0 * sigma), 2);
    out.push_back(at_most("propagator: free Gaussian width sigma(t)^2", std::abs(width2 - expect), 1e-6));
  }
  {
    // Static beams: full Hamiltonian stays dark and follows the effective one.
    const SpinorField c0 = tripod::dark_packet(tripod::Branch::Minus, {1.0, 0.0}, g, {}, 5.0, p);
    const propagator::Schedule fixed = [&](double) { return p; };
    const propagator::FullRun run = propagator::evolve_full_splitstep(
        tripod::embed_dark(c0, p), {1.0 / 12000.0, 1.0, {}}, fixed, tripod::vs_shift(p));
    double worst_norm = 0.0;
    for (const auto& row : run.trail) worst_norm = std::max(worst_norm, std::abs(row.norm - 1.0));
    out.push_back(at_most("propagator: split-step norm change over 12000 steps", worst_norm, 1.2e-9));
    const auto proj = tripod::project_dark(run.psi, p);
    out.push_back(at_most("propagator: dark leakage under static beams over t = 1", proj.leakage, 1e-6));
    out.push_back(at_least("propagator: full vs effective fidelity over t = 1",
                           analysis::fidelity(proj.c, propagator::evolve_dark_exact(c0, p, 1.0)), 0.99));
  }
  {
    const auto [e1, e2] = richardson_errors(1e-3);
    out.push_back(within("propagator: split-step Richardson ratio", e1 / e2, 4.0, 0.5));
  }
  return out;
}

// ---------------------------------------------------------------------------
// analysis

inline std::vector<Check> analysis_checks() {
  std::vector<Check> out;
  const Grid2D g = verify_grid();
  const tripod::TripodParams p;
  const SpinorField c = random_field(g, 2, 41);
  const auto d = analysis::branch_decompose(c, p);
  out.push_back(at_most("analysis: w+ + w- = norm", std::abs(d.w_plus + d.w_minus - norm(c)), 1e-10));
  out.push_back(at_most("analysis: branch recombination is the identity", max_abs_diff(analysis::branch_recombine(d), c), 1e-12));
  SpinorField phased = c;
  phased *= std::polar(1.0, 2.1);
  const SpinorField other = random_field(g, 2, 43);
  out.push_back(at_most("analysis: fidelity invariant under global phase",
                        std::abs(analysis::fidelity(phased, other) - analysis::fidelity(c, other)), 1e-14));
  const cplx w[] = {1.0, 1.0};
  SpinorField two = make_gaussian(g, {-15.0, 0.0}, 3.0, {}, w);
  const SpinorField second = make_gaussian(g, {15.0, 5.0}, 3.0, {}, w);
  for (std::size_t n = 0; n < two.data().size(); ++n) two.data()[n] += second.data()[n];
  two = normalized(std::move(two));
  const auto packets = analysis::count_packets(two, 0.05);
  double total = 0.0;
  for (const auto& pk : packets) total += pk.weight;
  out.push_back(at_most("analysis: packet weights sum to the norm", std::abs(total - norm(two)), 1e-12));
  out.push_back(within("analysis: two separated Gaussians give two packets", static_cast<double>(packets.size()), 2.0, 0.0));
  return out;
}

// ---------------------------------------------------------------------------
// cli

/// Small tripod-translation run used for reproducibility checks.
inline config::ScenarioConfig small_translation_config() {
  auto c = config::ScenarioConfig::preset("tripod-translation");
  c.set("nx", "128");
  c.set("nz", "64");
  c.set("lx", "128");
  c.set("lz", "64");
  c.set("center", "-32,0");
  c.set("t_end", "10");
  c.set("snapshots", "0,10");
  c.set("second_imprint", "t=5");
  return c;
}

inline std::string snapshot_bytes(const runner::RunResult& r) {
  std::ostringstream os;
  for (const auto& s : r.snapshots) io::write_snapshot(os, s.field, s.t);
  return os.str();
}

inline std::vector<Check> cli_checks() {
  std::vector<Check> out;
  double mismatches = 0.0;
  for (const std::string& s : config::scenario_names()) {
    const auto c = config::ScenarioConfig::preset(s);
    if (!(config::ScenarioConfig::parse(c.emit()) == c)) mismatches += 1.0;
    if (!(config::ScenarioConfig::parse(c.emit_documented()) == c)) mismatches += 1.0;
  }
  out.push_back(at_most("cli: parse(emit(config)) = config for every preset", mismatches, 0.0));

  const auto cfg = small_translation_config();
  const unsigned saved = parallel::workers();
  parallel::set_workers(1);
  const std::string a = snapshot_bytes(runner::run(cfg));
  const std::string b = snapshot_bytes(runner::run(cfg));
  parallel::set_workers(3);
  const std::string threaded = snapshot_bytes(runner::run(cfg));
  parallel::set_workers(saved);
  out.push_back(at_most("cli: identical configs give identical snapshot bytes", a == b ? 0.0 : 1.0, 0.0));
  out.push_back(at_most("cli: worker count does not change snapshot bytes", a == threaded ? 0.0 : 1.0, 0.0));
  return out;
}

// ---------------------------------------------------------------------------

struct Group {
  std::string name;
  std::function<std::vector<Check>()> run;
};

inline std::vector<Group> all_groups() {
  return {{"fields", field_checks},       {"two_level", two_level_checks}, {"tripod", tripod_checks},
          {"rotation", rotation_checks},  {"propagator", propagator_checks}, {"analysis", analysis_checks},
          {"cli", cli_checks}};
}

/// Runs every group, prints one line per check and returns true if all pass.
inline bool run_verify(std::ostream& os) {
  bool ok = true;
  std::size_t passed = 0, total = 0;
  for (const Group& grp : all_groups()) {
    const auto start = std::chrono::steady_clock::now();
    for (const Check& c : grp.run()) {
      os << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << io::format_double(c.measured)
         << "  required " << c.criterion << '\n';
      ok = ok && c.pass;
      passed += c.pass ? 1 : 0;
      ++total;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    os << "  [" << grp.name << " done in " << io::format_double(std::round(secs * 100.0) / 100.0) << " s]\n";
    os.flush();
  }
  os << passed << '/' << total << " invariants hold\n";
  return ok;
}

}  // namespace gimprint::invariants
