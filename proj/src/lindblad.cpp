#include "qmeas/lindblad.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qmeas/error.hpp"

namespace qmeas {

SparseCMatrix to_sparse(const CMatrix& m) {
  SparseCMatrix s = m.sparseView(Complex(0.0), 1.0);
  s.makeCompressed();
  return s;
}

CMatrix lindblad_rhs(const DensityMatrix& rho, const OperatorMatrix& h,
                     const std::vector<OperatorMatrix>& ls) {
  require_same_signature(rho.signature(), h.signature(), "lindblad_rhs");
  const Complex i(0.0, 1.0);
  const CMatrix& r = rho.matrix();
  CMatrix out = -i * (h.matrix() * r - r * h.matrix());
  for (const auto& l : ls) {
    require_same_signature(rho.signature(), l.signature(), "lindblad_rhs");
    const CMatrix& lm = l.matrix();
    const CMatrix ldl = lm.adjoint() * lm;
    out += lm * r * lm.adjoint() - 0.5 * (ldl * r + r * ldl);
  }
  return out;
}

LindbladGenerator::LindbladGenerator(const HamiltonianParts& h,
                                     const std::vector<OperatorMatrix>& ls)
    : sig_(h.static_part.signature()) {
  require_same_signature(sig_, h.drive_part.signature(), "LindbladGenerator");
  const Complex i(0.0, 1.0);
  CMatrix k = -i * h.static_part.matrix();
  for (const auto& l : ls) {
    require_same_signature(sig_, l.signature(), "LindbladGenerator");
    k -= 0.5 * l.matrix().adjoint() * l.matrix();
    ls_.push_back(to_sparse(l.matrix()));
  }
  k_static_ = to_sparse(k);
  k_drive_ = to_sparse(-i * h.drive_part.matrix());
}

void LindbladGenerator::rhs(double t, const CMatrix& rho, CMatrix& out) const {
  scratch_.noalias() = k_static_ * rho;
  const double c = std::cos(t);
  if (c != 0.0 && k_drive_.nonZeros() > 0) scratch_.noalias() += c * (k_drive_ * rho);
  out = scratch_ + scratch_.adjoint();
  for (const auto& l : ls_) {
    scratch_.noalias() = l * rho;
    scratch2_ = scratch_.adjoint();
    out.noalias() += l * scratch2_;
  }
}

void evolve_master(CMatrix& rho, const LindbladGenerator& gen, long steps, double dt,
                   const MasterObserver& observe) {
  const Eigen::Index n = rho.rows();
  CMatrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), stage(n, n);
  if (observe) observe(0, 0.0, rho);
  for (long step = 0; step < steps; ++step) {
    // t from the integer step keeps strobe times exact over long runs
    const double t = step * dt;
    gen.rhs(t, rho, k1);
    stage = rho + (0.5 * dt) * k1;
    gen.rhs(t + 0.5 * dt, stage, k2);
    stage = rho + (0.5 * dt) * k2;
    gen.rhs(t + 0.5 * dt, stage, k3);
    stage = rho + dt * k3;
    gen.rhs(t + dt, stage, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // rhs() assumes a Hermitian argument; drop the rounding-level
    // anti-Hermitian part so it cannot feed back.
    stage = 0.5 * (rho + rho.adjoint());
    rho = stage;
    if (observe) observe(step + 1, (step + 1) * dt, rho);
  }
}

void MasterRunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::config, "invalid master run config: " + what);
  };
  if (steps_per_period <= 0) fail("steps_per_period must be > 0");
  if (!(t_end_periods > 0.0)) fail("t_end must be > 0");
  if (record_stride <= 0) fail("record_stride must be > 0");
  if (!(trace_tol > 0.0) || !(herm_tol > 0.0) || !(psd_tol > 0.0) || !(leak_tol > 0.0))
    fail("tolerances must be > 0");
  for (double p : snapshot_periods) {
    const double steps = p * steps_per_period;
    if (p < 0.0 || p > t_end_periods + 1e-12 || std::abs(steps - std::round(steps)) > 1e-6) {
      std::ostringstream msg;
      msg << "snapshot time t/2pi = " << p << " is outside the run or off the step grid";
      fail(msg.str());
    }
  }
}

long MasterRunConfig::total_steps() const {
  return static_cast<long>(std::llround(t_end_periods * steps_per_period));
}

namespace {

double trace_product(const CMatrix& rho, const CMatrix& op) {
  return (rho.transpose().cwiseProduct(op)).sum().real();
}

}  // namespace

MasterRunOutput integrate_master(const DensityMatrix& rho0, const ModelParams& params,
                                 const MasterRunConfig& cfg) {
  params.validate();
  cfg.validate();
  const auto sig = SpaceSignature::composite(params.fock_dim);
  require_same_signature(sig, rho0.signature(), "integrate_master");

  const LindbladGenerator gen(hamiltonian_parts(params), lindblad_operators(params));
  const ObservableSet obs = composite_observables(params.fock_dim);

  std::vector<long> snapshot_steps;
  for (double p : cfg.snapshot_periods)
    snapshot_steps.push_back(std::llround(p * cfg.steps_per_period));

  MasterRunOutput out;
  out.summary.min_eigenvalue = 1.0;

  auto observe = [&](long step, double t, const CMatrix& rho) {
    for (std::size_t k = 0; k < snapshot_steps.size(); ++k) {
      if (snapshot_steps[k] == step)
        out.snapshots.push_back({cfg.snapshot_periods[k], DensityMatrix(sig, rho)});
    }
    if (step % cfg.record_stride != 0) return;

    MasterSample s;
    s.step = step;
    s.t = t;
    s.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (s.hermiticity_error > cfg.herm_tol)
      throw InvariantBreach("hermiticity", t, s.hermiticity_error);
    s.trace_deviation = std::abs(rho.trace() - Complex(1.0));
    if (s.trace_deviation > cfg.trace_tol)
      throw InvariantBreach("trace", t, s.trace_deviation);

    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    const DensityMatrix state(sig, herm);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    s.min_eigenvalue = solver.eigenvalues()(0);
    if (s.min_eigenvalue < -cfg.psd_tol)
      throw InvariantBreach("positivity", t, s.min_eigenvalue);

    s.leak = top_level_population(state);
    if (s.leak > cfg.leak_tol) {
      std::ostringstream msg;
      msg << "population " << s.leak << " in the top Fock levels at t=" << t
          << " exceeds " << cfg.leak_tol << "; increase fock_dim beyond " << params.fock_dim;
      throw TruncationLeak(msg.str(), params.fock_dim + params.fock_dim / 2);
    }

    s.qubit = qubit_populations(state);
    s.q = trace_product(herm, obs.q.matrix());
    s.p = trace_product(herm, obs.p.matrix());
    s.sigma_z = s.qubit.rho_ee - s.qubit.rho_gg;
    s.entropy.s = entropy_from_eigenvalues(solver.eigenvalues(), cfg.psd_tol);
    s.entropy.s_q = von_neumann_entropy(partial_trace_oscillator(state), cfg.psd_tol);
    s.entropy.s_o = von_neumann_entropy(partial_trace_qubit(state), cfg.psd_tol);
    s.entropy.index = s.entropy.s_q + s.entropy.s_o - s.entropy.s;

    auto& sum = out.summary;
    sum.max_trace_deviation = std::max(sum.max_trace_deviation, s.trace_deviation);
    sum.max_hermiticity_error = std::max(sum.max_hermiticity_error, s.hermiticity_error);
    sum.min_eigenvalue = std::min(sum.min_eigenvalue, s.min_eigenvalue);
    sum.max_leak = std::max(sum.max_leak, s.leak);
    out.samples.push_back(s);
  };

  CMatrix rho = rho0.matrix();
  evolve_master(rho, gen, cfg.total_steps(), cfg.dt(), observe);
  return out;
}

}  // namespace qmeas
