#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmeas/lindblad.hpp"
#include "qmeas/observables.hpp"
#include "qmeas/qsd.hpp"

namespace qmeas {

struct EnsembleConfig {
  std::uint64_t master_seed = 1;
  int n_traj = 200;
  TrajectoryConfig trajectory;  // trajectory.seed is ignored; seeds come from master_seed
  int workers = 1;
  bool keep_final_states = false;

  void validate() const;
};

struct TrajectoryFailure {
  int index = 0;
  std::uint64_t seed = 0;
  std::string error_kind;
  std::string message;
};

// Mean and standard error of the mean at each recorded time.
struct MeanSeries {
  std::vector<long> steps;
  std::vector<double> t;
  std::vector<double> q, q_se;
  std::vector<double> p, p_se;
  std::vector<double> sigma_z, sigma_z_se;
  std::vector<double> p_g, p_g_se;
};

struct EnsembleResult {
  std::vector<int> indices;  // trajectory index of each record
  std::vector<TrajectoryRecord> records;
  std::vector<TrajectoryFailure> failures;
  MeanSeries mean;
};

// Trajectory k uses seed derive_seed(master_seed, k). Trajectories run on up
// to cfg.workers threads; aggregation is in index order, so the result does
// not depend on scheduling. Failed trajectories are excluded if they are
// fewer than 1% of n_traj, otherwise the first failure is rethrown.
EnsembleResult run_ensemble(const StateVector& psi0, const ModelParams& params,
                            const EnsembleConfig& cfg);

MeanSeries aggregate(const std::vector<TrajectoryRecord>& records);

struct BornReport {
  int n_ground = 0;
  int n_excited = 0;
  int n_undecided = 0;
  int n_failed = 0;
  double fraction_g = 0.0;     // n_ground / (n_ground + n_excited)
  double standard_error = 0.0;  // binomial, at the expected probability
  double expected_g = 0.0;     // |c_g|^2
  double expected_e = 0.0;     // |c_e|^2
  double z_score = 0.0;
  double z_threshold = 3.0;
  bool valid = true;  // false when more than 10% of trajectories are undecided
  bool pass = false;
};

struct BornConfig {
  EnsembleConfig ensemble;
  double window_periods = 0.5;  // trailing window for classify_outcome
  OutcomeThresholds thresholds;
  double z_threshold = 3.0;
};

BornReport born_experiment(Complex c_g, Complex c_e, Complex alpha, const ModelParams& params,
                           const BornConfig& cfg);

// Tallies an existing ensemble against the initial amplitudes.
BornReport born_report(const EnsembleResult& ens, Complex c_g, Complex c_e,
                       const ModelParams& params, const BornConfig& cfg);

struct ZenoSeries {
  std::vector<double> t;
  std::vector<double> coupled_sigma_z;
  std::vector<double> free_sigma_z;
  InvariantSummary summary;
};

// <sigma_z>(t) for |g> evolving under epsilon sigma_x alone: -cos(2 epsilon t).
double free_qubit_sigma_z(double t, double epsilon);

// Starts from |g> (x) |alpha>; runs the coupled model through the master
// equation and pairs it with the closed-form free qubit.
ZenoSeries zeno_experiment(const ModelParams& params, Complex alpha, const MasterRunConfig& cfg);

}  // namespace qmeas
