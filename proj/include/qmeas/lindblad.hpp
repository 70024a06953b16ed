#pragma once

// Fixed-step RK4 integration of
//   d rho/dt = -i [H(t), rho] + sum_m (L_m rho L_m^+ - 1/2 {L_m^+ L_m, rho})
// with H(t) = H_static + cos(t) H_drive.

#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "qmeas/model.hpp"
#include "qmeas/observables.hpp"

namespace qmeas {

using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

SparseCMatrix to_sparse(const CMatrix& m);

// Dense reference form of the generator.
CMatrix lindblad_rhs(const DensityMatrix& rho, const OperatorMatrix& h,
                     const std::vector<OperatorMatrix>& ls);

// Sparse precomputed generator, -i H rho - 1/2 L^+L rho folded into one
// operator so each evaluation costs a few sparse-dense products.
class LindbladGenerator {
 public:
  LindbladGenerator(const HamiltonianParts& h, const std::vector<OperatorMatrix>& ls);

  const SpaceSignature& signature() const { return sig_; }
  void rhs(double t, const CMatrix& rho, CMatrix& out) const;

 private:
  SpaceSignature sig_;
  SparseCMatrix k_static_;  // -i H_static - 1/2 sum L^+ L
  SparseCMatrix k_drive_;   // -i H_drive
  std::vector<SparseCMatrix> ls_;
  mutable CMatrix scratch_;
  mutable CMatrix scratch2_;
};

using MasterObserver = std::function<void(long step, double t, const CMatrix& rho)>;

// Advances rho through `steps` RK4 steps of size dt starting at t = 0,
// calling `observe` at step 0 and after every step.
void evolve_master(CMatrix& rho, const LindbladGenerator& gen, long steps, double dt,
                   const MasterObserver& observe);

struct MasterRunConfig {
  int steps_per_period = 2000;  // dt = 2 pi / steps_per_period
  double t_end_periods = 1.0;
  int record_stride = 20;
  double trace_tol = 1e-6;
  double herm_tol = 1e-10;
  double psd_tol = 1e-6;
  double leak_tol = 1e-3;  // population allowed in the top 5 Fock levels
  std::vector<double> snapshot_periods;  // rho snapshots at these t / 2 pi

  void validate() const;
  double dt() const { return kDrivePeriod / steps_per_period; }
  long total_steps() const;
};

struct MasterSample {
  long step = 0;
  double t = 0.0;
  QubitPopulations qubit;
  double q = 0.0;
  double p = 0.0;
  double sigma_z = 0.0;
  EntropyReport entropy;
  double trace_deviation = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double leak = 0.0;
};

struct DensitySnapshot {
  double t_periods = 0.0;
  DensityMatrix rho;
};

struct InvariantSummary {
  double max_trace_deviation = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_leak = 0.0;
};

struct MasterRunOutput {
  std::vector<MasterSample> samples;
  std::vector<DensitySnapshot> snapshots;
  InvariantSummary summary;
};

// Aborts with InvariantBreach on trace, hermiticity or positivity violations
// and TruncationLeak when the top Fock levels fill beyond cfg.leak_tol.
MasterRunOutput integrate_master(const DensityMatrix& rho0, const ModelParams& params,
                                 const MasterRunConfig& cfg);

}  // namespace qmeas
