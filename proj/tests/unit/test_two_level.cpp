#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace gimprint;
using namespace gimprint::two_level;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kOne[] = {1.0};
}  // namespace

TEST(TwoLevel, EigenpairsAgreeWithDenseSolver) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    TwoLevelParams p{0.2 + 3.0 * std::abs(u(rng)), 30.0 * u(rng), {2 * u(rng), 2 * u(rng)}, 1.0, 0.0};
    const Vec2 r{20 * u(rng), 20 * u(rng)};
    const Mat2 h = hamiltonian(p, r);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(oracle::to_eigen(h));
    EXPECT_NEAR(es.eigenvalues()(1), energy_plus(p), 1e-12);
    EXPECT_NEAR(es.eigenvalues()(0), -energy_plus(p), 1e-12);
    const Spinor2 v = eigenstate_plus(p, r);
    const Spinor2 hv = h * v;
    EXPECT_LT(std::abs(hv[0] - energy_plus(p) * v[0]) + std::abs(hv[1] - energy_plus(p) * v[1]), 1e-12);
    const Spinor2 w = eigenstate_minus(p, r);
    const Spinor2 hw = h * w;
    EXPECT_LT(std::abs(hw[0] + energy_plus(p) * w[0]) + std::abs(hw[1] + energy_plus(p) * w[1]), 1e-12);
    EXPECT_LT(std::abs(vdot(v, w)), 1e-14);
    EXPECT_NEAR(std::norm(v[0]) + std::norm(v[1]), 1.0, 1e-14);
    EXPECT_GE(w[0].real(), 0.0);
    EXPECT_EQ(w[0].imag(), 0.0);
  }
}

TEST(TwoLevel, ResonantStateHasEqualMagnitudes) {
  const TwoLevelParams p{1.0, 0.0, {1.0, 0.0}, 1.0, 0.0};
  const Spinor2 v = eigenstate_plus(p, {0.3, 0.2});
  EXPECT_NEAR(std::abs(v[0]), 1.0 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(std::abs(v[1]), 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(TwoLevel, LargeDetuningLimit) {
  const TwoLevelParams p{1.0, 20.0, {1.0, 0.0}, 1.0, 0.0};
  EXPECT_GE(std::abs(eigenstate_plus(p, {})[0]), 0.999);
  EXPECT_GT(chi(1.0, -1e3), 0.0);
  EXPECT_THROW(eigenstate_plus({0.0, 1.0, {}, 1.0, 0.0}, {}), ValidationError);
}

TEST(TwoLevel, RotatedWavevectorKeepsMagnitude) {
  for (double g : {0.0, 0.4, 2.0, -5.0}) EXPECT_NEAR(norm(rotated_wavevector(1.7, g)), 1.7, 1e-15);
  const Vec2 k = rotated_wavevector(1.0, kPi / 2);
  EXPECT_NEAR(k.z, -1.0, 1e-15);
}

TEST(Chirp, QuadratureMatchesExactAntiderivative) {
  for (double omega0 : {0.5, 1.0, 3.0}) {
    const double exact = oracle::chirp_antiderivative(omega0, -20.0) - oracle::chirp_antiderivative(omega0, 20.0);
    EXPECT_NEAR(chirp_phase_integral(omega0, 20.0, -20.0), exact, 1e-9);
  }
  EXPECT_NEAR(chirp_phase_integral(1.0, 20.0, -20.0), -20.0, 1e-9);
}

TEST(Chirp, LinearWavevectorMap) {
  const ChirpSweep s;
  EXPECT_NEAR(s.dk_ddelta(), 0.01, 1e-15);
  EXPECT_NEAR(s.k_resonant(), 1.0, 1e-15);
  const ChirpSweep r = s.reversed();
  EXPECT_NEAR(r.k_resonant(), 1.0, 1e-15);
}

TEST(Chirp, BerryPhaseAgainstAsymptoticForm) {
  const ChirpSweep s;
  const Vec2 k_hat{1.0, 0.0};
  EXPECT_EQ(chirp_berry_phase(s, 1.0, {}, k_hat), 0.0);
  for (Vec2 r : {Vec2{1.0, 0.0}, Vec2{-7.5, 3.0}, Vec2{40.0, 2.0}}) {
    const double q = chirp_berry_phase(s, 1.0, r, k_hat);
    const double a = chirp_asymptotic_phase(s, r, k_hat);
    EXPECT_LE(std::abs(q - a), 0.01 * std::abs(a));
  }
  const Vec2 r{3.3, -1.0};
  EXPECT_NEAR(chirp_berry_phase(s, 1.0, r, k_hat) + chirp_berry_phase(s.reversed(), 1.0, r, k_hat), 0.0, 1e-10);
}

TEST(Chirp, Preconditions) {
  EXPECT_THROW(chirp_berry_phase({5.0, 20.0, 1.0, 1.1}, 1.0, {}, {1.0, 0.0}), ValidationError);
  EXPECT_THROW(chirp_berry_phase({}, 1.0, {}, {1.0, 0.0}, 999), ValidationError);
  EXPECT_THROW(chirp_berry_phase({}, 0.0, {}, {1.0, 0.0}), ValidationError);
}

TEST(Chirp, InversionAndRecoil) {
  const Grid2D g(256, 256, 128.0, 128.0);
  const ChirpSweep s;
  const SpinorField env = make_gaussian(g, {}, 6.0, {}, kOne);
  const SpinorField before = chirp_initial_state(s, 1.0, {1.0, 0.0}, env);
  const ChirpResult after = chirp_final_state(s, 1.0, {1.0, 0.0}, env);
  const Observables o0 = observables(before);
  const Observables o1 = observables(after.field);
  EXPECT_GE(o0.populations[0], 0.999);
  EXPECT_GE(o1.populations[1], 0.999);
  EXPECT_NEAR(after.population_defect, 1.0 - o1.populations[1], 1e-12);
  EXPECT_LE(std::abs(o1.mean_momentum.x - o0.mean_momentum.x - s.k_resonant()), g.dkx());
  EXPECT_LE(std::abs(o1.mean_momentum.z - o0.mean_momentum.z), g.dkz());
  // The |2> component carries the whole resonant wavevector.
  const SpinorField k2 = to_momentum(extract_component(after.field, 1));
  EXPECT_NEAR(g.wavevector(oracle::argmax_density(k2, 0)).x, s.k_resonant(), g.dkx());
}

TEST(Chirp, PlaneWaveAtRestGainsResonantMomentum) {
  const Grid2D g(256, 256, 128.0, 128.0);
  const ChirpResult r = chirp_final_state({}, 1.0, {1.0, 0.0}, {0.0, 0.0}, g);
  EXPECT_LE(std::abs(mean_momentum(r.field).x - 1.0), g.dkx());
}

TEST(Chirp, NullSweepLeavesStateUnchanged) {
  const Grid2D g(64, 64, 32.0, 32.0);
  const ChirpSweep s{20.0, 20.0, 1.2, 1.2};
  EXPECT_EQ(chirp_phase_gradient(s, 1.0), 0.0);
  const SpinorField env = make_gaussian(g, {}, 3.0, {0.2, 0.0}, kOne);
  const SpinorField a = chirp_initial_state(s, 1.0, {1.0, 0.0}, env);
  const SpinorField b = chirp_final_state(s, 1.0, {1.0, 0.0}, env).field;
  EXPECT_LT(invariants::max_abs_diff(a, b), 1e-15);
  EXPECT_NEAR(mean_momentum(a).x, mean_momentum(b).x, 1e-15);
}

TEST(Rotation, ClosedFormPhaseAgainstQuadrature) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double alpha = 2 * kPi * u(rng), radius = 15 * std::abs(u(rng)), theta = kPi * u(rng);
    const double q = simpson([&](double g) { return rotation_connection(1.0, radius, theta, g); }, 0.0, alpha, 2000);
    EXPECT_NEAR(rotation_berry_phase(alpha, 1.0, radius, theta), q, 1e-9);
  }
  const double q = simpson([&](double g) { return rotation_connection(1.0, 2.0, kPi / 6, g); }, 0.0, kPi / 3, 2000);
  EXPECT_NEAR(rotation_berry_phase(kPi / 3, 1.0, 2.0, kPi / 6), q, 1e-9);
  EXPECT_NEAR(q, std::sqrt(3.0) / 2.0 - 0.0, 1e-9);
}

TEST(Rotation, ConnectionMatchesFiniteDifferenceOfEigenstate) {
  // beta' = i <phi+| d/dgamma phi+> at Delta = 0
  const double radius = 3.0, theta = 0.8, h = 1e-5;
  for (double g : {0.0, 0.6, 2.5}) {
    auto state = [&](double gam) {
      TwoLevelParams p{1.0, 0.0, rotated_wavevector(1.0, gam), 1.0, gam};
      return eigenstate_plus(p, {radius * std::cos(theta), radius * std::sin(theta)});
    };
    const Spinor2 a = state(g + h), b = state(g - h), v = state(g);
    const Spinor2 d = {(a[0] - b[0]) / (2 * h), (a[1] - b[1]) / (2 * h)};
    EXPECT_NEAR((kI * vdot(v, d)).real(), rotation_connection(1.0, radius, theta, g), 1e-8);
  }
}

TEST(Rotation, TrivialAndClosedPaths) {
  EXPECT_EQ(rotation_berry_phase(0.0, 1.0, 5.0, 0.3), 0.0);
  EXPECT_NEAR(rotation_berry_phase(2 * kPi, 1.0, 5.0, 0.3), 0.0, 1e-14);
  EXPECT_NEAR(rotation_berry_phase(1.1, 1.0, 5.0, 0.3) + rotation_berry_phase(-1.1, 1.0, 5.0, 0.3 + 1.1), 0.0, 1e-12);
}

TEST(Rotation, FinalStateBranchMomenta) {
  const Grid2D g(256, 256, 128.0, 128.0);
  const SpinorField env = make_gaussian(g, {}, 8.0, {}, kOne);
  const TwoLevelParams p{1.0, 0.0, {1.0, 0.0}, 1.0, 0.0};
  for (double alpha : {0.0, kPi / 4, kPi / 2, kPi, 3 * kPi / 2}) {
    const SpinorField f = to_momentum(rotation_final_state(alpha, p, env));
    const auto [k1, k2] = rotation_branch_wavevectors(alpha, 1.0);
    const Vec2 peak1 = g.wavevector(oracle::argmax_density(f, 0));
    const Vec2 peak2 = g.wavevector(oracle::argmax_density(f, 1));
    EXPECT_LE(std::abs(peak1.x - k1.x), g.dkx()) << alpha;
    EXPECT_LE(std::abs(peak1.z - k1.z), g.dkz()) << alpha;
    EXPECT_LE(std::abs(peak2.x - k2.x), g.dkx()) << alpha;
    EXPECT_LE(std::abs(peak2.z - k2.z), g.dkz()) << alpha;
  }
  const auto [a1, a2] = rotation_branch_wavevectors(kPi / 2, 1.0);
  EXPECT_NEAR(a1.x, 0.5, 1e-15);
  EXPECT_NEAR(a1.z, 0.5, 1e-15);
  EXPECT_NEAR(a2.x, 0.5, 1e-15);
  EXPECT_NEAR(a2.z, -0.5, 1e-15);
}

TEST(Rotation, FinalStateRequiresResonance) {
  const Grid2D g(32, 32, 32.0, 32.0);
  const SpinorField env = make_gaussian(g, {}, 5.0, {}, kOne);
  EXPECT_THROW(rotation_final_state(1.0, {1.0, 0.5, {1.0, 0.0}, 1.0, 0.0}, env), ValidationError);
}
