#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmeas/error.hpp"
#include "qmeas/model.hpp"
#include "qmeas/observables.hpp"
#include "support.hpp"

using namespace qmeas;

namespace {

const double kLn2 = std::log(2.0);

// Real Hermite functions psi_n(x), the position representation of |n>.
std::vector<double> hermite_functions(int n, double x) {
  std::vector<double> h(n);
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-x * x / 2);
  if (n > 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 1; k + 1 < n; ++k)
    h[k + 1] = std::sqrt(2.0 / (k + 1)) * x * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
  return h;
}

Complex wavefunction(const CVector& c, double x) {
  const auto h = hermite_functions(static_cast<int>(c.size()), x);
  Complex s = 0.0;
  for (int k = 0; k < c.size(); ++k) s += c(k) * h[k];
  return s;
}

// W(q,p) = (1/pi) int psi(q+y) psi*(q-y) e^{-2ipy} dy by the trapezoid rule.
double wigner_quadrature(const CVector& c, double q, double p) {
  const int m = 4000;
  const double ymax = 10.0;
  const double h = 2 * ymax / m;
  Complex s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double y = -ymax + i * h;
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    s += w * wavefunction(c, q + y) * std::conj(wavefunction(c, q - y)) *
         std::exp(Complex(0, -2 * p * y));
  }
  return (s * h).real() / std::numbers::pi;
}

DensityMatrix osc_rho(const CVector& c) {
  return DensityMatrix::from_pure(StateVector(SpaceSignature::oscillator(c.size()), c));
}

TrajectoryRecord synthetic(const std::vector<double>& p_g, int spp = 8, int stride = 1,
                           const std::vector<double>& s_q = {}) {
  TrajectoryRecord r;
  r.steps_per_period = spp;
  r.record_stride = stride;
  for (std::size_t k = 0; k < p_g.size(); ++k) {
    TrajectorySample s;
    s.step = static_cast<long>(k) * stride;
    s.t = s.step * kDrivePeriod / spp;
    s.p_g = p_g[k];
    s.q = double(k);
    s.p = -double(k);
    s.s_q = s_q.empty() ? 0.0 : s_q[k];
    r.samples.push_back(s);
  }
  return r;
}

}  // namespace

TEST_CASE("von Neumann entropy closed forms") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  CHECK(von_neumann_entropy(d) == doctest::Approx(0.610864).epsilon(1e-6 / 0.61));
  CHECK(std::abs(von_neumann_entropy(d) - (-0.7 * std::log(0.7) - 0.3 * std::log(0.3))) < 1e-14);
  CHECK(von_neumann_entropy(CMatrix(0.5 * CMatrix::Identity(2, 2))) ==
        doctest::Approx(kLn2).epsilon(1e-14));
  std::mt19937_64 rng(2);
  const CVector v = qmeas::testing::random_state(7, rng);
  CHECK(std::abs(von_neumann_entropy(CMatrix(v * v.adjoint()))) < 1e-8);
}

TEST_CASE("entropy tolerates rounding-level negative eigenvalues only") {
  RVector ev(3);
  ev << -5e-7, 0.5, 0.5 + 5e-7;
  CHECK(entropy_from_eigenvalues(ev) == doctest::Approx(kLn2).epsilon(1e-5));
  ev << -1e-3, 0.5, 0.501;
  try {
    entropy_from_eigenvalues(ev);
    FAIL("expected contract_violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::contract_violation);
  }
}

TEST_CASE("index of correlation") {
  const int n = 4;
  SUBCASE("product state") {
    const auto rho = DensityMatrix::from_pure(tensor(qubit_state(0.6, 0.8), coherent_state(0.3, n, 1e-2)));
    const EntropyReport r = index_of_correlation(rho);
    CHECK(std::abs(r.index) < 1e-6);
  }
  SUBCASE("Bell-like state") {
    CVector v = CVector::Zero(2 * n);
    v(kGround * n + 0) = v(kExcited * n + 1) = 1.0 / std::sqrt(2.0);
    const auto r =
        index_of_correlation(DensityMatrix::from_pure(StateVector(SpaceSignature::composite(n), v)));
    CHECK(std::abs(r.s) < 1e-8);
    CHECK(r.s_q == doctest::Approx(kLn2).epsilon(1e-10));
    CHECK(r.s_o == doctest::Approx(kLn2).epsilon(1e-10));
    CHECK(r.index == doctest::Approx(2 * kLn2).epsilon(1e-8));
  }
  SUBCASE("property: subadditivity and triangle inequality on random states") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      const DensityMatrix rho(SpaceSignature::composite(n),
                              qmeas::testing::random_density(2 * n, rng));
      const auto r = index_of_correlation(rho);
      CHECK(r.s <= r.s_q + r.s_o + 1e-10);
      CHECK(r.s >= std::abs(r.s_q - r.s_o) - 1e-10);
      CHECK(r.index >= -1e-10);
    }
  }
}

TEST_CASE("qubit populations") {
  const int n = 10;
  auto pop = qubit_populations(tensor(qubit_ground(), coherent_state(1.0, n, 1e-3)));
  CHECK(pop.rho_gg == doctest::Approx(1.0));
  CHECK(pop.rho_ee == doctest::Approx(0.0));
  CHECK(pop.abs_rho_ge == doctest::Approx(0.0));
  const StateVector born = tensor(qubit_state(std::sqrt(0.7), std::sqrt(0.3)), coherent_state(1.0, n, 1e-3));
  pop = qubit_populations(born);
  CHECK(pop.rho_gg == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(pop.rho_ee == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(pop.abs_rho_ge == doctest::Approx(std::sqrt(0.21)).epsilon(1e-12));
  const auto pop_dm = qubit_populations(DensityMatrix::from_pure(born));
  CHECK(pop_dm.abs_rho_ge == doctest::Approx(pop.abs_rho_ge).epsilon(1e-12));
  const StateVector sym = tensor(qubit_state(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)), fock_state(0, n));
  CHECK(qubit_populations(sym).abs_rho_ge == doctest::Approx(0.5));
}

TEST_CASE("Wigner function of the vacuum") {
  const PhaseSpaceGrid grid{-4.0, 4.0, -4.0, 4.0, 41, 41};
  CVector vac = CVector::Zero(8);
  vac(0) = 1.0;
  const WignerField w = wigner(osc_rho(vac), grid);
  double err = 0.0;
  for (int i = 0; i < grid.n_q; ++i)
    for (int j = 0; j < grid.n_p; ++j) {
      const double q = grid.q(i), p = grid.p(j);
      err = std::max(err, std::abs(w.values(i, j) - std::exp(-q * q - p * p) / std::numbers::pi));
    }
  CHECK(err < 1e-6);
}

TEST_CASE("Wigner function of coherent states, including complex alpha") {
  for (Complex alpha : {Complex(2.0, 0.0), Complex(-1.5, 2.2), Complex(0.0, -3.0)}) {
    const int n = 60;
    const CVector c = coherent_state(alpha, n).amplitudes();
    const double q0 = std::sqrt(2.0) * alpha.real(), p0 = std::sqrt(2.0) * alpha.imag();
    const PhaseSpaceGrid grid{-6.0, 6.0, -6.0, 6.0, 61, 61};
    const WignerField w = wigner(osc_rho(c), grid);
    Eigen::Index bi, bj;
    w.values.maxCoeff(&bi, &bj);
    CHECK(std::abs(grid.q(bi) - q0) <= grid.dq());
    CHECK(std::abs(grid.p(bj) - p0) <= grid.dp());
    double err = 0.0;
    for (int i = 0; i < grid.n_q; ++i)
      for (int j = 0; j < grid.n_p; ++j) {
        const double dq = grid.q(i) - q0, dp = grid.p(j) - p0;
        err = std::max(err, std::abs(w.values(i, j) - std::exp(-dq * dq - dp * dp) / std::numbers::pi));
      }
    CHECK(err < 1e-8);
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("Wigner function of a random superposition matches direct quadrature") {
  std::mt19937_64 rng(21);
  const CVector c = qmeas::testing::random_state(6, rng);
  const DensityMatrix rho = osc_rho(c);
  for (auto [q, p] : {std::pair{0.0, 0.0}, {0.7, -0.4}, {-1.3, 1.1}, {2.0, 0.5}, {-0.2, -2.5}}) {
    CHECK(wigner_at(rho, q, p) == doctest::Approx(wigner_quadrature(c, q, p)).epsilon(1e-8));
  }
}

TEST_CASE("Wigner requires an oscillator-only state") {
  const auto rho = DensityMatrix::from_pure(tensor(qubit_ground(), fock_state(0, 4)));
  CHECK_THROWS_AS(wigner_at(rho, 0.0, 0.0), Error);
}

TEST_CASE("position distribution and Wigner marginal") {
  std::mt19937_64 rng(4);
  const CVector c = qmeas::testing::random_state(8, rng);
  const DensityMatrix rho = osc_rho(c);
  const PhaseSpaceGrid grid{-6.0, 6.0, -8.0, 8.0, 49, 321};
  const WignerField w = wigner(rho, grid);
  const RVector marg = w.position_marginal();
  std::vector<double> qs(grid.n_q);
  for (int i = 0; i < grid.n_q; ++i) qs[i] = grid.q(i);
  const auto dist = position_distribution(rho, qs);
  for (int i = 0; i < grid.n_q; ++i) {
    CHECK(dist[i] == doctest::Approx(std::norm(wavefunction(c, qs[i]))).epsilon(1e-10));
    CHECK(std::abs(marg(i) - dist[i]) < 1e-3);
  }
}

TEST_CASE("population classification") {
  CHECK(classify_population(0.995) == Outcome::ground);
  CHECK(classify_population(0.005) == Outcome::excited);
  CHECK(classify_population(0.5) == Outcome::undecided);
  CHECK(std::string(to_string(Outcome::ground)) == "G");
  CHECK(std::string(to_string(Outcome::excited)) == "E");
  CHECK(std::string(to_string(Outcome::undecided)) == "U");
}

TEST_CASE("classify_outcome over a trailing window") {
  CHECK(classify_outcome(synthetic(std::vector<double>(17, 0.5)), 1.0) == Outcome::undecided);
  std::vector<double> pg(17, 0.5);
  for (int k = 8; k < 17; ++k) pg[k] = 0.999;
  CHECK(classify_outcome(synthetic(pg), 1.0) == Outcome::ground);
  pg[11] = 0.9;
  CHECK(classify_outcome(synthetic(pg), 1.0) == Outcome::undecided);
  CHECK(classify_outcome(synthetic(pg), 0.5) == Outcome::ground);
  std::vector<double> pe(17, 0.001);
  CHECK(classify_outcome(synthetic(pe), 2.0) == Outcome::excited);
  CHECK_THROWS_AS(classify_outcome(synthetic(pe), 3.0), Error);
}

TEST_CASE("switch detection spans the undecided gap") {
  //          G    G    U    U    U    E    E    E    U    G
  std::vector<double> pg = {1.0, 1.0, 0.6, 0.5, 0.3, 0.0, 0.0, 0.0, 0.5, 1.0};
  std::vector<double> sq = {0.0, 0.0, 0.4, 0.5, 0.2, 0.0, 0.0, 0.0, 0.1, 0.0};
  const auto r = synthetic(pg, 8, 1, sq);
  const auto ev = find_switches(r, {}, 0.0);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].from == Outcome::ground);
  CHECK(ev[0].to == Outcome::excited);
  CHECK(ev[0].t_leave == doctest::Approx(r.samples[1].t));
  CHECK(ev[0].t_enter == doctest::Approx(r.samples[5].t));
  CHECK(ev[0].peak_s_q == doctest::Approx(0.5));
  CHECK(ev[1].peak_s_q == doctest::Approx(0.1));
  CHECK(find_switches(synthetic(std::vector<double>(10, 0.999))).empty());
}

TEST_CASE("projected_and_held") {
  std::vector<double> pg(25, 0.5);
  for (int k = 6; k < 25; ++k) pg[k] = 0.001;
  const auto r = synthetic(pg);  // t/2pi = k/8
  CHECK(projected_and_held(r, kDrivePeriod * 1.0));
  CHECK_FALSE(projected_and_held(r, kDrivePeriod * 0.5));
  pg[20] = 0.2;
  CHECK_FALSE(projected_and_held(synthetic(pg), kDrivePeriod * 1.0));
}

TEST_CASE("Poincare strobes at t/2pi = n + 1/4") {
  std::vector<double> pg(25, 0.999);
  const auto sec = poincare_section(synthetic(pg, 8, 1));
  REQUIRE(sec.points.size() == 3);
  for (int n = 0; n < 3; ++n) {
    CHECK(sec.points[n].period == n);
    CHECK(sec.points[n].t / kDrivePeriod == doctest::Approx(n + 0.25));
    CHECK(sec.points[n].label == Outcome::ground);
  }
  CHECK(strobe_step(2, 8) == 18);
  CHECK_THROWS_AS(strobe_step(0, 10), Error);
  CHECK_THROWS_AS(poincare_section(synthetic(pg, 8, 3)), Error);
}

TEST_CASE("region classification") {
  PoincareSection sec;
  sec.points = {{0, 0.0, 5.0, 5.0}, {1, 7.0, 0.1, 0.1}, {2, 13.0, -0.1, 0.2}};
  const RegionBox box{-1.0, 1.0, -1.0, 1.0};
  CHECK(classify_by_region(sec, box, 1.0) == Outcome::ground);
  CHECK(classify_by_region(sec, box, 0.0) == Outcome::undecided);
  CHECK(classify_by_region(sec, box, 100.0) == Outcome::undecided);
  sec.points[1].q = 3.0;
  sec.points[2].q = 3.0;
  CHECK(classify_by_region(sec, box, 1.0) == Outcome::excited);
}
