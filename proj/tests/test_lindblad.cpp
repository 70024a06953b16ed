#include <doctest.h>

#include <cmath>

#include "qmeas/error.hpp"
#include "qmeas/lindblad.hpp"
#include "support.hpp"

using namespace qmeas;
using qmeas::testing::max_abs;

namespace {

ModelParams tiny(double eps = 0.0) {
  ModelParams p = desk_params();
  p.fock_dim = 16;
  p.epsilon = eps;
  return p;
}

CMatrix run(const CMatrix& rho0, const LindbladGenerator& gen, long steps, double dt) {
  CMatrix rho = rho0;
  evolve_master(rho, gen, steps, dt, [](long, double, const CMatrix&) {});
  return rho;
}

}  // namespace

TEST_CASE("dense generator basics") {
  const auto sig = SpaceSignature::oscillator(2);
  const DensityMatrix one(sig, CMatrix(fock_state(1, 2).amplitudes() *
                                       fock_state(1, 2).amplitudes().adjoint()));
  CHECK(max_abs(lindblad_rhs(one, OperatorMatrix::zero(sig), {})) == 0.0);

  const double gamma = 0.125;
  const OperatorMatrix l = annihilation_op(2) * Complex(std::sqrt(2 * gamma));
  const CMatrix d = lindblad_rhs(one, OperatorMatrix::zero(sig), {l});
  CHECK(d(0, 0).real() == doctest::Approx(2 * gamma));
  CHECK(d(1, 1).real() == doctest::Approx(-2 * gamma));
}

TEST_CASE("property: generator is trace-free and Hermiticity-preserving") {
  std::mt19937_64 rng(9);
  const int n = 6;
  const auto sig = SpaceSignature::composite(n);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho(sig, qmeas::testing::random_density(2 * n, rng));
    const OperatorMatrix h(sig, qmeas::testing::random_hermitian(2 * n, rng));
    const OperatorMatrix l(sig, qmeas::testing::random_matrix(2 * n, rng));
    const CMatrix d = lindblad_rhs(rho, h, {l});
    CHECK(std::abs(d.trace()) < 1e-12);
    CHECK(max_abs(d - d.adjoint()) < 1e-12);
  }
}

TEST_CASE("sparse generator agrees with the dense form") {
  const ModelParams p = tiny(0.5);
  const HamiltonianParts h = hamiltonian_parts(p);
  const auto ls = lindblad_operators(p);
  const LindbladGenerator gen(h, ls);
  std::mt19937_64 rng(12);
  for (double t : {0.0, 0.9, 2.5}) {
    const DensityMatrix rho(SpaceSignature::composite(p.fock_dim),
                            qmeas::testing::random_density(2 * p.fock_dim, rng));
    CMatrix sparse;
    gen.rhs(t, rho.matrix(), sparse);
    const CMatrix dense = lindblad_rhs(rho, h.at(t), ls);
    CHECK(max_abs(sparse - dense) < 1e-10 * std::max(1.0, max_abs(dense)));
  }
}

TEST_CASE("damped two-level oscillator decays as exp(-2 Gamma t)") {
  const double gamma = 0.125;
  const auto sig = SpaceSignature::oscillator(2);
  const HamiltonianParts h{OperatorMatrix::zero(sig), OperatorMatrix::zero(sig)};
  const LindbladGenerator gen(h, {annihilation_op(2) * Complex(std::sqrt(2 * gamma))});
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  const double dt = kDrivePeriod / 2000;
  double err = 0.0;
  evolve_master(rho, gen, 4000, dt, [&](long, double t, const CMatrix& r) {
    err = std::max(err, std::abs(r(1, 1).real() - std::exp(-2 * gamma * t)));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("RK4 converges at fourth order") {
  const ModelParams p = tiny(0.5);
  const LindbladGenerator gen(hamiltonian_parts(p), lindblad_operators(p));
  const CMatrix rho0 = DensityMatrix::from_pure(initial_state(0.6, 0.8, 1.0, p)).matrix();
  const double t_end = 0.1 * kDrivePeriod;
  const CMatrix ref = run(rho0, gen, 1600, t_end / 1600);
  const double e1 = max_abs(run(rho0, gen, 25, t_end / 25) - ref);
  const double e2 = max_abs(run(rho0, gen, 50, t_end / 50) - ref);
  MESSAGE("error ratio " << e1 / e2);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("master runs conserve trace, positivity and sigma_z") {
  const ModelParams p = tiny(0.0);
  MasterRunConfig cfg;
  cfg.t_end_periods = 0.25;
  cfg.record_stride = 50;
  cfg.snapshot_periods = {0.0, 0.25};
  const StateVector psi0 = initial_state(std::sqrt(0.7), std::sqrt(0.3), 1.0, p);
  const auto out = integrate_master(DensityMatrix::from_pure(psi0), p, cfg);
  REQUIRE(out.samples.size() == 11);
  REQUIRE(out.snapshots.size() == 2);
  CHECK(out.snapshots[1].t_periods == doctest::Approx(0.25));
  for (const auto& s : out.samples) {
    CHECK(s.trace_deviation < 1e-10);
    CHECK(s.min_eigenvalue > -1e-8);
    CHECK(std::abs(s.sigma_z - (0.3 - 0.7)) < 1e-10);
    CHECK(s.qubit.rho_gg == doctest::Approx(0.7).epsilon(1e-10));
    // subadditivity and the triangle inequality
    CHECK(s.entropy.s <= s.entropy.s_q + s.entropy.s_o + 1e-6);
    CHECK(s.entropy.s >= std::abs(s.entropy.s_q - s.entropy.s_o) - 1e-6);
  }
  CHECK(out.summary.max_trace_deviation < 1e-10);
  CHECK(out.samples.back().qubit.abs_rho_ge < out.samples.front().qubit.abs_rho_ge);
}

TEST_CASE("unitary limit keeps the state pure") {
  ModelParams p = tiny(0.0);
  p.gamma = 0.0;
  p.g = 0.0;
  const LindbladGenerator gen(hamiltonian_parts(p), lindblad_operators(p));
  CMatrix rho = DensityMatrix::from_pure(initial_state(0.6, 0.8, 1.0, p)).matrix();
  double worst = 0.0;
  evolve_master(rho, gen, 1000, kDrivePeriod / 2000, [&](long, double, const CMatrix& r) {
    worst = std::max(worst, std::abs((r * r).trace().real() - 1.0));
  });
  CHECK(worst < 1e-8);
}

TEST_CASE("invariant guards abort the run") {
  const ModelParams p = tiny(0.0);
  MasterRunConfig cfg;
  cfg.t_end_periods = 0.01;
  SUBCASE("negative eigenvalue") {
    CMatrix bad = CMatrix::Zero(2 * p.fock_dim, 2 * p.fock_dim);
    bad(0, 0) = 1.02;
    bad(1, 1) = -0.02;
    try {
      integrate_master(DensityMatrix(SpaceSignature::composite(p.fock_dim), bad), p, cfg);
      FAIL("expected InvariantBreach");
    } catch (const InvariantBreach& e) {
      CHECK(e.invariant() == "positivity");
      CHECK(e.magnitude() == doctest::Approx(-0.02));
      CHECK(e.kind() == ErrorKind::invariant_breach);
    }
  }
  SUBCASE("truncation leak") {
    cfg.leak_tol = 1e-14;
    const StateVector psi0 = initial_state(1.0, 0.0, 2.0, p, 1e-3);
    CHECK_THROWS_AS(integrate_master(DensityMatrix::from_pure(psi0), p, cfg), TruncationLeak);
  }
  SUBCASE("config validation") {
    cfg.steps_per_period = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}
