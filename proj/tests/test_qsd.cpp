#include <doctest.h>

#include <cmath>

#include "qmeas/error.hpp"
#include "qmeas/lindblad.hpp"
#include "qmeas/noise.hpp"
#include "qmeas/qsd.hpp"
#include "support.hpp"

using namespace qmeas;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("splitmix64 reference output") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("Wiener increment moments") {
  const double dt = 1e-3;
  const NoiseStream ns(42, dt);
  const int n = 1000000;
  Complex sum = 0.0, sum_sq = 0.0;
  double sum_abs2 = 0.0, sum_abs4 = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex x = ns.increment(k, 0);
    sum += x;
    sum_sq += x * x;
    sum_abs2 += std::norm(x);
    sum_abs4 += std::norm(x) * std::norm(x);
  }
  // Standard errors: E|dxi|^2 = dt, Var|dxi|^2 = dt^2 (exponential), |dxi^2| ~ dt.
  const double se_mean = std::sqrt(dt / 2 / n);
  CHECK(std::abs(sum.real() / n) < 5 * se_mean);
  CHECK(std::abs(sum.imag() / n) < 5 * se_mean);
  CHECK(std::abs(sum_sq / double(n)) < 5 * dt / std::sqrt(double(n)));
  CHECK(std::abs(sum_abs2 / n - dt) < 5 * dt / std::sqrt(double(n)));
  CHECK(sum_abs4 / n == doctest::Approx(2 * dt * dt).epsilon(0.02));
}

TEST_CASE("noise stream is a pure function of seed, step and channel") {
  const NoiseStream a(5, 0.01), b(5, 0.01), c(6, 0.01);
  for (std::uint64_t step : {0ULL, 1ULL, 123456789ULL, (1ULL << 40) + 3}) {
    CHECK(a.increment(step, 0) == b.increment(step, 0));
    CHECK(a.increment(step, 0) != c.increment(step, 0));
    CHECK(a.increment(step, 0) != a.increment(step, 1));
  }
  CHECK(a.increment(7, 0) != a.increment(7 + (1ULL << 32), 0));
}

TEST_CASE("qsd_step without channels is a normalized Euler Schrodinger step") {
  const int n = 6;
  std::mt19937_64 rng(1);
  const auto sig = SpaceSignature::oscillator(n);
  const OperatorMatrix h(sig, qmeas::testing::random_hermitian(n, rng));
  const StateVector psi(sig, qmeas::testing::random_state(n, rng));
  auto exact = [&](double dt) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
    const CVector ph = (es.eigenvalues().cast<Complex>() * Complex(0, -dt)).array().exp();
    return CVector(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() *
                   psi.amplitudes());
  };
  const double e1 = (qsd_step(psi, h, {}, {}, 1e-3).amplitudes() - exact(1e-3)).norm();
  const double e2 = (qsd_step(psi, h, {}, {}, 5e-4).amplitudes() - exact(5e-4)).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(qsd_step(psi, h, {}, {}, 1e-3).norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("qsd_step rejects bad input") {
  const auto sig = SpaceSignature::oscillator(3);
  const StateVector bad(sig, CVector::Ones(3));
  CHECK_THROWS_AS(qsd_step(bad, OperatorMatrix::zero(sig), {}, {}, 0.01), Error);
  const StateVector ok = fock_state(1, 3);
  const std::vector<Complex> two = {0.0, 0.0};
  CHECK_THROWS_AS(qsd_step(ok, OperatorMatrix::zero(sig), {annihilation_op(3)}, two, 0.01), Error);
}

TEST_CASE("damped coherent state stays coherent along every trajectory") {
  // (L - <L>) psi = 0 for L proportional to a, so the noise drops out and
  // alpha(t) = alpha e^{-Gamma t} on every realization.
  const int n = 30;
  const double gamma = 0.125;
  const Complex alpha(1.5, -0.5);
  const auto sig = SpaceSignature::oscillator(n);
  const HamiltonianParts h{OperatorMatrix::zero(sig), OperatorMatrix::zero(sig)};
  const std::vector<OperatorMatrix> ls = {annihilation_op(n) * Complex(std::sqrt(2 * gamma))};
  const CMatrix a = annihilation_op(n).matrix();
  for (QsdScheme scheme : {QsdScheme::euler_maruyama, QsdScheme::rk4_drift}) {
    const QsdPropagator prop(h, ls, scheme);
    const double dt = 1e-3;
    const NoiseStream ns(99, dt);
    CVector psi = coherent_state(alpha, n).amplitudes();
    for (long k = 0; k < 2000; ++k) {
      const Complex xi = ns.increment(k, 0);
      prop.step(psi, k * dt, dt, std::span<const Complex>(&xi, 1));
    }
    const Complex mean_a = psi.dot(a * psi);
    const double tol = scheme == QsdScheme::rk4_drift ? 1e-9 : 1e-3;
    CHECK(std::abs(mean_a - alpha * std::exp(-gamma * 2.0)) < tol);
  }
}

TEST_CASE("sparse propagator matches dense Euler-Maruyama") {
  ModelParams p = desk_params();
  p.fock_dim = 12;
  p.epsilon = 0.5;
  const HamiltonianParts h = hamiltonian_parts(p);
  const auto ls = lindblad_operators(p);
  const QsdPropagator prop(h, ls, QsdScheme::euler_maruyama);
  const StateVector psi0 = initial_state(0.6, 0.8, 0.5, p, 1e-3);
  const Complex xi(0.01, -0.02);
  CVector v = psi0.amplitudes();
  prop.step(v, 0.7, 1e-3, std::span<const Complex>(&xi, 1));
  const StateVector dense = qsd_step(psi0, h.at(0.7), ls, std::span<const Complex>(&xi, 1), 1e-3);
  CHECK((v - dense.amplitudes()).norm() < 1e-13);
}

TEST_CASE("trajectories are reproducible from the seed") {
  ModelParams p = desk_params();
  p.fock_dim = 20;
  TrajectoryConfig cfg;
  cfg.t_end_periods = 0.1;
  cfg.steps_per_period = 2000;
  cfg.record_stride = 20;
  cfg.seed = 1234;
  const StateVector psi0 = initial_state(0.6, 0.8, 1.0, p);
  const auto r1 = run_trajectory(psi0, p, cfg);
  const auto r2 = run_trajectory(psi0, p, cfg);
  REQUIRE(r1.samples.size() == 11);
  for (std::size_t k = 0; k < r1.samples.size(); ++k) {
    CHECK(r1.samples[k].q == r2.samples[k].q);
    CHECK(r1.samples[k].p_g == r2.samples[k].p_g);
  }
  cfg.seed = 1235;
  const auto r3 = run_trajectory(psi0, p, cfg);
  CHECK(r3.samples.back().p_g != r1.samples.back().p_g);
  REQUIRE(r1.final_state.has_value());
  CHECK(r1.final_state->norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("without dissipation a trajectory is the Schrodinger evolution") {
  ModelParams p = desk_params();
  p.fock_dim = 20;
  p.gamma = 0.0;
  p.epsilon = 0.5;
  TrajectoryConfig tc;
  tc.t_end_periods = 0.2;
  tc.steps_per_period = 2000;
  tc.record_stride = 40;
  MasterRunConfig mc;
  mc.t_end_periods = 0.2;
  mc.record_stride = 40;
  const StateVector psi0 = initial_state(0.6, 0.8, 1.0, p);
  const auto traj = run_trajectory(psi0, p, tc);
  const auto master = integrate_master(DensityMatrix::from_pure(psi0), p, mc);
  REQUIRE(traj.samples.size() == master.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    CHECK(std::abs(traj.samples[k].q - master.samples[k].q) < 1e-8);
    CHECK(std::abs(traj.samples[k].p_g - master.samples[k].qubit.rho_gg) < 1e-8);
  }
}

TEST_CASE("scheme names round-trip") {
  CHECK(qsd_scheme_from_string("rk4_drift") == QsdScheme::rk4_drift);
  CHECK(qsd_scheme_from_string(to_string(QsdScheme::euler_maruyama)) == QsdScheme::euler_maruyama);
  CHECK_THROWS_AS(qsd_scheme_from_string("milstein"), Error);
}
