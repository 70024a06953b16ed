#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmeas/hilbert.hpp"

namespace qmeas {

// One recorded instant of a quantum-state-diffusion trajectory.
struct TrajectorySample {
  long step = 0;
  double t = 0.0;
  double q = 0.0;        // <q>
  double p = 0.0;        // <p>
  double sigma_z = 0.0;  // <sigma_z>
  double p_g = 0.0;      // rho_gg of the reduced qubit matrix
  double abs_rho_ge = 0.0;
  double s_q = 0.0;      // qubit entropy, nats
  double leak = 0.0;     // population in the top Fock levels
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  int steps_per_period = 0;
  int record_stride = 0;
  std::vector<TrajectorySample> samples;
  std::optional<StateVector> final_state;
};

}  // namespace qmeas
