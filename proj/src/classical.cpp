#include "qmeas/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmeas/error.hpp"

namespace qmeas {

namespace {

void require_branch(int branch) {
  if (branch != -1 && branch != 1) {
    throw Error(ErrorKind::contract_violation,
                "qubit branch must be -1 or +1, got " + std::to_string(branch));
  }
}

}  // namespace

PhaseVelocity classical_rhs(const ClassicalState& s, int branch, const ModelParams& params) {
  require_branch(branch);
  const double b2 = params.beta * params.beta;
  return {0.5 * (3.0 - branch) * s.p,
          -b2 * s.q * s.q * s.q + 0.5 * (1.0 + branch) * s.q -
              (params.g / params.beta) * std::cos(s.t) - 2.0 * params.gamma * s.p};
}

double branch_energy(const ClassicalState& s, int branch, const ModelParams& params) {
  require_branch(branch);
  const double b2 = params.beta * params.beta;
  const double q2 = s.q * s.q;
  return 0.25 * (3.0 - branch) * s.p * s.p + 0.25 * b2 * q2 * q2 - 0.25 * (1.0 + branch) * q2;
}

void ClassicalRunConfig::validate() const {
  if (steps_per_period <= 0 || steps_per_period % 4 != 0)
    throw Error(ErrorKind::config, "classical steps_per_period must be a positive multiple of 4");
  if (!(t_end_periods >= 0.0)) throw Error(ErrorKind::config, "classical t_end must be >= 0");
  if (record_stride <= 0) throw Error(ErrorKind::config, "classical record_stride must be > 0");
}

ClassicalTrajectory integrate_classical(const ClassicalState& state0, int branch,
                                        const ModelParams& params,
                                        const ClassicalRunConfig& cfg) {
  require_branch(branch);
  params.validate();
  cfg.validate();
  const int spp = cfg.steps_per_period;
  const double dt = kDrivePeriod / spp;
  const long steps = std::llround(cfg.t_end_periods * spp);
  const double t0 = state0.t;

  ClassicalTrajectory out;
  out.branch = branch;
  ClassicalState s = state0;

  auto at = [&](const ClassicalState& base, const PhaseVelocity& k, double h, double t) {
    return ClassicalState{base.q + h * k.dq, base.p + h * k.dp, t};
  };
  auto visit = [&](long step) {
    if (!std::isfinite(s.q) || !std::isfinite(s.p) || std::abs(s.q) > cfg.divergence_limit ||
        std::abs(s.p) > cfg.divergence_limit) {
      std::ostringstream msg;
      msg << "classical branch " << branch << " diverged at t=" << s.t << " (q=" << s.q
          << ", p=" << s.p << ")";
      throw Error(ErrorKind::divergence, msg.str());
    }
    if (step % cfg.record_stride == 0) out.states.push_back(s);
    if (step >= spp / 4 && (step - spp / 4) % spp == 0) {
      out.section.points.push_back({(step - spp / 4) / spp, s.t, s.q, s.p,
                                    branch < 0 ? Outcome::ground : Outcome::excited});
    }
  };

  visit(0);
  for (long step = 0; step < steps; ++step) {
    const double t = t0 + step * dt;
    const PhaseVelocity k1 = classical_rhs(s, branch, params);
    const PhaseVelocity k2 = classical_rhs(at(s, k1, 0.5 * dt, t + 0.5 * dt), branch, params);
    const PhaseVelocity k3 = classical_rhs(at(s, k2, 0.5 * dt, t + 0.5 * dt), branch, params);
    const PhaseVelocity k4 = classical_rhs(at(s, k3, dt, t + dt), branch, params);
    s.q += dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    s.p += dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    s.t = t0 + (step + 1) * dt;
    visit(step + 1);
  }
  return out;
}

double cloud_diameter(const PoincareSection& section, long skip_periods) {
  double best = 0.0;
  const auto& pts = section.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].period < skip_periods) continue;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[j].period < skip_periods) continue;
      best = std::max(best, std::hypot(pts[i].q - pts[j].q, pts[i].p - pts[j].p));
    }
  }
  return best;
}

RegionBox calibrate_region_a(const PoincareSection& periodic_branch, long skip_periods,
                             double reference_extent, double pad_fraction) {
  RegionBox box{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& pt : periodic_branch.points) {
    if (pt.period < skip_periods) continue;
    box.q_min = std::min(box.q_min, pt.q);
    box.q_max = std::max(box.q_max, pt.q);
    box.p_min = std::min(box.p_min, pt.p);
    box.p_max = std::max(box.p_max, pt.p);
  }
  if (!(box.q_min <= box.q_max)) {
    throw Error(ErrorKind::config, "region A calibration needs strobe points past the transient");
  }
  const double pad = pad_fraction * reference_extent;
  box.q_min -= pad;
  box.q_max += pad;
  box.p_min -= pad;
  box.p_max += pad;
  return box;
}

EhrenfestReport ehrenfest_consistency(const ModelParams& params, int branch, Complex alpha,
                                      double horizon_periods, int steps_per_period,
                                      int record_stride) {
  require_branch(branch);
  EhrenfestReport rep;
  if (horizon_periods <= 0.0) return rep;

  ModelParams pinned = params;
  pinned.epsilon = 0.0;
  const StateVector psi0 = branch < 0 ? initial_state(1.0, 0.0, alpha, pinned)
                                      : initial_state(0.0, 1.0, alpha, pinned);
  const HamiltonianParts h = hamiltonian_parts(pinned);
  const auto ls = lindblad_operators(pinned);
  const LindbladGenerator gen(h, ls);
  const ObservableSet obs = composite_observables(pinned.fock_dim);

  const double dt = kDrivePeriod / steps_per_period;
  const long steps = std::llround(horizon_periods * steps_per_period);
  CMatrix drho;
  auto tr = [](const CMatrix& a, const CMatrix& b) {
    return (a.transpose().cwiseProduct(b)).sum().real();
  };

  double max_diff = 0.0;
  double max_speed = 0.0;
  CMatrix rho = DensityMatrix::from_pure(psi0).matrix();
  evolve_master(rho, gen, steps, dt, [&](long step, double t, const CMatrix& r) {
    if (step % record_stride != 0) return;
    gen.rhs(t, r, drho);
    const PhaseVelocity qv{tr(drho, obs.q.matrix()), tr(drho, obs.p.matrix())};
    const PhaseVelocity cv =
        classical_rhs({tr(r, obs.q.matrix()), tr(r, obs.p.matrix()), t}, branch, pinned);
    rep.t.push_back(t);
    rep.quantum.push_back(qv);
    rep.classical.push_back(cv);
    max_diff = std::max(max_diff, std::hypot(qv.dq - cv.dq, qv.dp - cv.dp));
    max_speed = std::max(max_speed, std::hypot(qv.dq, qv.dp));
  });
  rep.max_deviation = max_speed > 0.0 ? max_diff / max_speed : 0.0;
  return rep;
}

}  // namespace qmeas
