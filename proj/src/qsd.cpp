#include "qmeas/qsd.hpp"

#include <cmath>
#include <sstream>

#include "qmeas/error.hpp"
#include "qmeas/observables.hpp"

namespace qmeas {

const char* to_string(QsdScheme s) {
  switch (s) {
    case QsdScheme::euler_maruyama: return "euler_maruyama";
    case QsdScheme::rk4_drift: return "rk4_drift";
  }
  return "?";
}

QsdScheme qsd_scheme_from_string(const std::string& s) {
  if (s == "euler_maruyama") return QsdScheme::euler_maruyama;
  if (s == "rk4_drift") return QsdScheme::rk4_drift;
  throw Error(ErrorKind::config, "unknown QSD scheme '" + s + "'");
}

namespace {

void check_norm_collapse(double norm, double dt) {
  if (!(norm >= 0.5) || !std::isfinite(norm)) {
    std::ostringstream msg;
    msg << "QSD step produced norm " << norm << " at dt=" << dt << "; reduce the step size";
    throw Error(ErrorKind::norm_collapse, msg.str());
  }
}

}  // namespace

StateVector qsd_step(const StateVector& psi, const OperatorMatrix& h,
                     const std::vector<OperatorMatrix>& ls, std::span<const Complex> noise,
                     double dt) {
  require_same_signature(psi.signature(), h.signature(), "qsd_step");
  if (std::abs(psi.norm() - 1.0) > 1e-8) {
    throw Error(ErrorKind::contract_violation, "qsd_step expects a normalized state");
  }
  if (noise.size() != ls.size() && !noise.empty()) {
    throw Error(ErrorKind::contract_violation, "qsd_step needs one noise increment per channel");
  }
  const Complex i(0.0, 1.0);
  const CVector& v = psi.amplitudes();
  CVector dpsi = -i * dt * (h.matrix() * v);
  for (std::size_t m = 0; m < ls.size(); ++m) {
    require_same_signature(psi.signature(), ls[m].signature(), "qsd_step");
    const CMatrix& l = ls[m].matrix();
    const CVector lv = l * v;
    const Complex expect = v.dot(lv);  // <L>
    const CVector ldl_v = l.adjoint() * lv;
    dpsi += dt * (std::conj(expect) * lv - 0.5 * ldl_v - 0.5 * std::norm(expect) * v);
    if (!noise.empty()) dpsi += noise[m] * (lv - expect * v);
  }
  CVector next = v + dpsi;
  check_norm_collapse(next.norm(), dt);
  return StateVector(psi.signature(), next).normalized();
}

// ---------------------------------------------------------------------------

QsdPropagator::QsdPropagator(const HamiltonianParts& h, const std::vector<OperatorMatrix>& ls,
                             QsdScheme scheme)
    : scheme_(scheme) {
  const Complex i(0.0, 1.0);
  CMatrix k = -i * h.static_part.matrix();
  for (const auto& l : ls) {
    require_same_signature(h.static_part.signature(), l.signature(), "QsdPropagator");
    k -= 0.5 * l.matrix().adjoint() * l.matrix();
    ls_.push_back(to_sparse(l.matrix()));
  }
  k_static_ = to_sparse(k);
  k_drive_ = to_sparse(-i * h.drive_part.matrix());
}

void QsdPropagator::drift(double t, const CVector& psi, std::span<const Complex> l_expect,
                          CVector& out) const {
  out.noalias() = k_static_ * psi;
  const double c = std::cos(t);
  if (c != 0.0 && k_drive_.nonZeros() > 0) out.noalias() += c * (k_drive_ * psi);
  for (std::size_t m = 0; m < ls_.size(); ++m) {
    const Complex ell = l_expect[m];
    out.noalias() += std::conj(ell) * (ls_[m] * psi);
    out -= (0.5 * std::norm(ell)) * psi;
  }
}

void QsdPropagator::step(CVector& psi, double t, double dt, std::span<const Complex> noise) const {
  const std::size_t nch = ls_.size();
  std::vector<Complex> expect(nch);
  CVector noise_term = CVector::Zero(psi.size());
  for (std::size_t m = 0; m < nch; ++m) {
    const CVector lv = ls_[m] * psi;
    expect[m] = psi.dot(lv);
    if (!noise.empty()) noise_term += noise[m] * (lv - expect[m] * psi);
  }

  CVector next;
  if (scheme_ == QsdScheme::euler_maruyama) {
    CVector f;
    drift(t, psi, expect, f);
    next = psi + dt * f;
  } else {
    CVector k1, k2, k3, k4;
    drift(t, psi, expect, k1);
    drift(t + 0.5 * dt, psi + (0.5 * dt) * k1, expect, k2);
    drift(t + 0.5 * dt, psi + (0.5 * dt) * k2, expect, k3);
    drift(t + dt, psi + dt * k3, expect, k4);
    next = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  next += noise_term;
  const double norm = next.norm();
  check_norm_collapse(norm, dt);
  psi = next / norm;
}

// ---------------------------------------------------------------------------

void TrajectoryConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::config, "invalid trajectory config: " + what);
  };
  if (steps_per_period <= 0) fail("steps_per_period must be > 0");
  if (!(t_end_periods > 0.0)) fail("t_end must be > 0");
  if (record_stride <= 0) fail("record_stride must be > 0");
  if (!(leak_tol > 0.0)) fail("leak_tol must be > 0");
}

long TrajectoryConfig::total_steps() const {
  return static_cast<long>(std::llround(t_end_periods * steps_per_period));
}

TrajectorySample sample_state(const CVector& psi, const ObservableSet& obs, int fock_dim) {
  const StateVector state(SpaceSignature::composite(fock_dim), psi);
  TrajectorySample s;
  s.q = obs.q.expectation(state).real();
  s.p = obs.p.expectation(state).real();
  const CMatrix rq = reduced_qubit_matrix(state);
  s.p_g = rq(kGround, kGround).real();
  s.sigma_z = rq(kExcited, kExcited).real() - s.p_g;
  s.abs_rho_ge = std::abs(rq(kGround, kExcited));
  s.s_q = von_neumann_entropy(rq);
  s.leak = top_level_population(state);
  return s;
}

TrajectoryRecord run_trajectory(const StateVector& psi0, const ModelParams& params,
                                const TrajectoryConfig& cfg) {
  params.validate();
  cfg.validate();
  require_same_signature(SpaceSignature::composite(params.fock_dim), psi0.signature(),
                         "run_trajectory");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) {
    throw Error(ErrorKind::contract_violation, "run_trajectory expects a normalized state");
  }

  const QsdPropagator prop(hamiltonian_parts(params), lindblad_operators(params), cfg.scheme);
  const ObservableSet obs = composite_observables(params.fock_dim);
  const NoiseStream noise(cfg.seed, cfg.dt());
  const double dt = cfg.dt();
  const long steps = cfg.total_steps();

  TrajectoryRecord rec;
  rec.seed = cfg.seed;
  rec.steps_per_period = cfg.steps_per_period;
  rec.record_stride = cfg.record_stride;
  rec.samples.reserve(steps / cfg.record_stride + 1);

  CVector psi = psi0.amplitudes();
  std::vector<Complex> increments(prop.channels());

  auto record = [&](long step) {
    TrajectorySample s = sample_state(psi, obs, params.fock_dim);
    s.step = step;
    s.t = step * dt;
    if (s.leak > cfg.leak_tol) {
      std::ostringstream msg;
      msg << "trajectory seed " << cfg.seed << ": population " << s.leak
          << " in the top Fock levels at t=" << s.t << " exceeds " << cfg.leak_tol
          << "; increase fock_dim beyond " << params.fock_dim;
      throw TruncationLeak(msg.str(), params.fock_dim + params.fock_dim / 2);
    }
    rec.samples.push_back(s);
  };

  record(0);
  for (long step = 0; step < steps; ++step) {
    for (int m = 0; m < prop.channels(); ++m)
      increments[m] = noise.increment(static_cast<std::uint64_t>(step), static_cast<std::uint32_t>(m));
    prop.step(psi, step * dt, dt, increments);
    if ((step + 1) % cfg.record_stride == 0) record(step + 1);
  }
  if (cfg.keep_final_state) rec.final_state = StateVector(psi0.signature(), psi);
  return rec;
}

}  // namespace qmeas
