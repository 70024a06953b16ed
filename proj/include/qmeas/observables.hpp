#pragma once

#include <span>
#include <vector>

#include "qmeas/hilbert.hpp"
#include "qmeas/record.hpp"

namespace qmeas {

inline constexpr double kDefaultPsdTol = 1e-6;

// -S = sum lambda ln lambda over eigenvalues with 0 ln 0 := 0. Eigenvalues in
// [-psd_tol, 0) are clamped to 0; anything more negative throws
// contract_violation.
double entropy_from_eigenvalues(const RVector& eigenvalues, double psd_tol = kDefaultPsdTol);
double von_neumann_entropy(const DensityMatrix& rho, double psd_tol = kDefaultPsdTol);
double von_neumann_entropy(const CMatrix& rho, double psd_tol = kDefaultPsdTol);

struct EntropyReport {
  double s_q = 0.0;  // qubit
  double s_o = 0.0;  // oscillator
  double s = 0.0;    // total
  double index = 0.0;  // s_q + s_o - s
};

EntropyReport index_of_correlation(const DensityMatrix& rho, double psd_tol = kDefaultPsdTol);

struct QubitPopulations {
  double rho_gg = 0.0;
  double rho_ee = 0.0;
  double abs_rho_ge = 0.0;
};

QubitPopulations qubit_populations(const DensityMatrix& rho);
QubitPopulations qubit_populations(const StateVector& psi);

// Population of the top `levels` Fock states of the oscillator marginal.
double top_level_population(const DensityMatrix& rho, int levels = 5);
double top_level_population(const StateVector& psi, int levels = 5);

// ---------------------------------------------------------------------------
// Wigner function

struct PhaseSpaceGrid {
  double q_min = -5.0;
  double q_max = 5.0;
  double p_min = -5.0;
  double p_max = 5.0;
  int n_q = 101;
  int n_p = 101;

  void validate() const;
  double q(int i) const { return q_min + (q_max - q_min) * i / (n_q - 1); }
  double p(int j) const { return p_min + (p_max - p_min) * j / (n_p - 1); }
  double dq() const { return (q_max - q_min) / (n_q - 1); }
  double dp() const { return (p_max - p_min) / (n_p - 1); }
};

struct WignerField {
  PhaseSpaceGrid grid;
  Eigen::MatrixXd values;  // values(i, j) = W(q_i, p_j)

  // Riemann sum times the cell area.
  double integral() const;
  // Sum over p of W(q_i, p_j) dp, one entry per q_i.
  RVector position_marginal() const;
};

// W(q, p) = (1/pi) Tr[rho D(alpha) Pi D(alpha)^dagger], alpha = (q + i p)/sqrt(2),
// evaluated with normalized associated-Laguerre recursions. Input must be an
// oscillator-only density matrix.
WignerField wigner(const DensityMatrix& rho_osc, const PhaseSpaceGrid& grid);
double wigner_at(const DensityMatrix& rho_osc, double q, double p);

// <q|rho|q> from Hermite-function amplitudes.
std::vector<double> position_distribution(const DensityMatrix& rho_osc,
                                          std::span<const double> q_values);

// ---------------------------------------------------------------------------
// Outcome classification and Poincare sections

enum class Outcome { ground, excited, undecided };

const char* to_string(Outcome o);

struct OutcomeThresholds {
  double ground = 0.99;   // P_g above this -> ground
  double excited = 0.01;  // P_g below this -> excited
};

Outcome classify_population(double p_g, const OutcomeThresholds& th = {});

// Axis-aligned box in the (<q>, <p>) plane standing for the ground-state
// record region.
struct RegionBox {
  double q_min = 0.0;
  double q_max = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;

  bool contains(double q, double p) const {
    return q >= q_min && q <= q_max && p >= p_min && p <= p_max;
  }
};

struct PoincarePoint {
  long period = 0;  // n in t / 2 pi = n + 1/4
  double t = 0.0;
  double q = 0.0;
  double p = 0.0;
  Outcome label = Outcome::undecided;
};

struct PoincareSection {
  std::vector<PoincarePoint> points;
};

// Step index of the strobe in period n; throws config unless
// steps_per_period is divisible by 4.
long strobe_step(long period, int steps_per_period);

// Samples (<q>, <p>) at every t / 2 pi = n + 1/4 in the record. Throws
// ErrorKind::config if the record stride cannot land on the strobe times.
PoincareSection poincare_section(const TrajectoryRecord& record,
                                 const OutcomeThresholds& th = {});

// Qubit-based: ground if P_g > th.ground at every sample of the trailing
// `window_periods`, excited if P_g < th.excited throughout, else undecided.
Outcome classify_outcome(const TrajectoryRecord& record, double window_periods,
                         const OutcomeThresholds& th = {});

// Oscillator-based: ground if every strobe point with t >= t_from lies in
// `region_a`, excited if none does, else undecided (also when there are none).
Outcome classify_by_region(const PoincareSection& section, const RegionBox& region_a,
                           double t_from);

// A change of decided class (G -> E or E -> G) along a record. The flip spans
// the undecided stretch from the last sample in the old class (t_leave) to the
// first sample in the new one (t_enter).
struct SwitchEvent {
  Outcome from = Outcome::undecided;
  Outcome to = Outcome::undecided;
  double t_leave = 0.0;
  double t_enter = 0.0;
  double peak_s_q = 0.0;  // max S_Q over [t_leave - w, t_enter + w]
};

std::vector<SwitchEvent> find_switches(const TrajectoryRecord& record,
                                       const OutcomeThresholds& th = {},
                                       double spike_window_periods = 0.1);

// True if the record is decided at some t <= t_by and keeps that class at
// every later sample (the projection criterion for a single trajectory).
bool projected_and_held(const TrajectoryRecord& record, double t_by,
                        const OutcomeThresholds& th = {});

}  // namespace qmeas
