#pragma once

// Quantum state diffusion:
//   |d psi> = -i H |psi> dt + sum_m (L_m - <L_m>) |psi> d xi_m
//           + sum_m (<L_m^+> L_m - 1/2 L_m^+ L_m - 1/2 <L_m^+><L_m>) |psi> dt

#include <cstdint>
#include <span>
#include <vector>

#include "qmeas/lindblad.hpp"
#include "qmeas/model.hpp"
#include "qmeas/noise.hpp"
#include "qmeas/record.hpp"

namespace qmeas {

// Both schemes freeze <L_m> at the pre-step state and apply the noise term
// as an Euler-Maruyama increment, then renormalize. They differ only in the
// deterministic part: a single Euler step, or RK4 over the step with the
// frozen expectations (which keeps the fast Hamiltonian phases accurate at
// large Fock truncations).
enum class QsdScheme { euler_maruyama, rk4_drift };

const char* to_string(QsdScheme s);
QsdScheme qsd_scheme_from_string(const std::string& s);

// One Euler-Maruyama step on dense operators. `noise` holds one increment
// per Lindblad operator. Throws norm_collapse if the unnormalized result has
// norm below 0.5, contract_violation if psi is not normalized within 1e-8.
StateVector qsd_step(const StateVector& psi, const OperatorMatrix& h,
                     const std::vector<OperatorMatrix>& ls, std::span<const Complex> noise,
                     double dt);

// Sparse propagator for the model's time-dependent Hamiltonian.
class QsdPropagator {
 public:
  QsdPropagator(const HamiltonianParts& h, const std::vector<OperatorMatrix>& ls,
                QsdScheme scheme);

  int channels() const { return static_cast<int>(ls_.size()); }

  // Advances psi (normalized) from t to t + dt in place.
  void step(CVector& psi, double t, double dt, std::span<const Complex> noise) const;

 private:
  void drift(double t, const CVector& psi, std::span<const Complex> l_expect,
             CVector& out) const;

  SparseCMatrix k_static_;  // -i H_static - 1/2 sum L^+ L
  SparseCMatrix k_drive_;   // -i H_drive
  std::vector<SparseCMatrix> ls_;
  QsdScheme scheme_;
};

struct TrajectoryConfig {
  int steps_per_period = 5000;  // dt = 2 pi / steps_per_period
  double t_end_periods = 2.0;
  int record_stride = 50;
  std::uint64_t seed = 0;
  QsdScheme scheme = QsdScheme::rk4_drift;
  double leak_tol = 1e-3;
  bool keep_final_state = true;

  void validate() const;
  double dt() const { return kDrivePeriod / steps_per_period; }
  long total_steps() const;
};

TrajectorySample sample_state(const CVector& psi, const ObservableSet& obs, int fock_dim);

// Deterministic in (psi0, params, cfg).
TrajectoryRecord run_trajectory(const StateVector& psi0, const ModelParams& params,
                                const TrajectoryConfig& cfg);

}  // namespace qmeas
