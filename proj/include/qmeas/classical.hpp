#pragma once

// Classical limit of each qubit branch (sigma_z -> s = +/-1).
//
// Hamilton's equations of the branch Hamiltonian
//   H_s = (3 - s)/4 p^2 + beta^2/4 q^4 - (1 + s)/4 q^2 + (g/beta) cos(t) q + Gamma q p
// plus the mean-value drift of the dissipator L = sqrt(2 Gamma) a, which is
// -Gamma (q, p). The Gamma q p term cancels the dissipator in dq/dt and
// doubles it in dp/dt:
//   dq/dt = (3 - s)/2 p
//   dp/dt = -beta^2 q^3 + (1 + s)/2 q - (g/beta) cos(t) - 2 Gamma p
// s = +1 is the Duffing oscillator, s = -1 a driven quartic well.

#include <vector>

#include "qmeas/lindblad.hpp"
#include "qmeas/model.hpp"
#include "qmeas/observables.hpp"

namespace qmeas {

struct ClassicalState {
  double q = 0.0;
  double p = 0.0;
  double t = 0.0;
};

struct PhaseVelocity {
  double dq = 0.0;
  double dp = 0.0;
};

// Throws contract_violation unless branch is -1 or +1.
PhaseVelocity classical_rhs(const ClassicalState& state, int branch, const ModelParams& params);

// Conserved when g = Gamma = 0.
double branch_energy(const ClassicalState& state, int branch, const ModelParams& params);

struct ClassicalRunConfig {
  int steps_per_period = 1000;
  double t_end_periods = 100.0;
  int record_stride = 10;
  double divergence_limit = 1e6;

  void validate() const;
};

struct ClassicalTrajectory {
  int branch = 0;
  std::vector<ClassicalState> states;  // every record_stride steps
  PoincareSection section;             // every t / 2 pi = n + 1/4
};

// Fixed-step RK4. Throws ErrorKind::divergence when |q| or |p| exceeds the
// divergence limit or becomes non-finite.
ClassicalTrajectory integrate_classical(const ClassicalState& state0, int branch,
                                        const ModelParams& params, const ClassicalRunConfig& cfg);

// Largest pairwise distance among strobe points with period >= skip_periods.
double cloud_diameter(const PoincareSection& section, long skip_periods);

// Bounding box of the periodic-branch strobe cloud after `skip_periods`,
// padded on every side by `pad_fraction` of the reference extent.
RegionBox calibrate_region_a(const PoincareSection& periodic_branch, long skip_periods,
                             double reference_extent, double pad_fraction = 0.2);

struct EhrenfestReport {
  std::vector<double> t;
  std::vector<PhaseVelocity> quantum;    // (d<q>/dt, d<p>/dt) from the master equation
  std::vector<PhaseVelocity> classical;  // classical_rhs at (<q>, <p>)
  double max_deviation = 0.0;            // max |quantum - classical| / max |quantum|
};

// Pins the qubit to |g> (branch -1) or |e> (branch +1) with the oscillator in
// |alpha>, integrates the master equation with epsilon = 0 over the horizon and
// compares the exact Ehrenfest drift with classical_rhs at the mean point.
EhrenfestReport ehrenfest_consistency(const ModelParams& params, int branch, Complex alpha,
                                      double horizon_periods, int steps_per_period = 2000,
                                      int record_stride = 10);

}  // namespace qmeas
