#pragma once

// Experiment configuration: one JSON document mapping onto ModelParams and
// the per-subcommand run settings. A named profile supplies every default; a
// user file is merged over it (RFC 7386 merge patch) and unknown keys are
// rejected.

#include <string>
#include <vector>

#include <json.hpp>

#include "qmeas/classical.hpp"
#include "qmeas/ensemble.hpp"
#include "qmeas/lindblad.hpp"
#include "qmeas/model.hpp"
#include "qmeas/observables.hpp"
#include "qmeas/qsd.hpp"

namespace qmeas {

struct PotentialSettings {
  double q_min = -15.0;
  double q_max = 15.0;
  int n_q = 601;
};

struct PoincareSettings {
  int n_traj = 4;                   // quantum trajectories to strobe
  ClassicalState classical_start;   // shared by both branches
  ClassicalRunConfig classical;
  long transient_periods = 10;
  double pad_fraction = 0.2;        // of the branch +1 attractor extent
  Complex ehrenfest_alpha{-1.5, -4.0};
  double ehrenfest_horizon = 0.2;   // periods
  double ehrenfest_tolerance = 0.05;
};

struct ZenoSettings {
  double epsilon = 0.5;
  double t_end_periods = 0.5;
};

struct ExperimentConfig {
  std::string profile = "desk";
  ModelParams model;
  Complex c_g{1.0 / 1.4142135623730951, 0.0};
  Complex c_e{1.0 / 1.4142135623730951, 0.0};
  Complex alpha{3.0, 0.0};
  MasterRunConfig master;
  PhaseSpaceGrid wigner;
  TrajectoryConfig trajectory;
  BornConfig born;  // born.ensemble carries n_traj, master_seed, workers
  PotentialSettings potential;
  PoincareSettings poincare;
  ZenoSettings zeno;
};

// "desk" (beta = 0.3, N = 60, short horizons) or "paper" (beta = 0.1,
// N = 450, long horizons). Throws ErrorKind::config for other names.
ExperimentConfig profile_config(const std::string& name);

nlohmann::json to_json(const ExperimentConfig& cfg);

// Merges `overlay` over the profile named by overlay["profile"] (or
// `default_profile`), validates, and returns the result. Errors name the
// offending key.
ExperimentConfig load_config(const nlohmann::json& overlay,
                             const std::string& default_profile = "desk");
ExperimentConfig load_config_file(const std::string& path,
                                  const std::string& default_profile = "desk");

// 64-bit FNV-1a of the canonical JSON text, as 16 hex digits.
std::string config_digest(const nlohmann::json& resolved);

}  // namespace qmeas
