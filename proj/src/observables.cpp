#include "qmeas/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmeas/error.hpp"
#include "qmeas/model.hpp"

namespace qmeas {

// ---------------------------------------------------------------------------
// Entropies

double entropy_from_eigenvalues(const RVector& eigenvalues, double psd_tol) {
  double s = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda < -psd_tol) {
      std::ostringstream msg;
      msg << "density matrix eigenvalue " << lambda << " below -" << psd_tol;
      throw Error(ErrorKind::contract_violation, msg.str());
    }
    lambda = std::clamp(lambda, 0.0, 1.0);
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

double von_neumann_entropy(const CMatrix& rho, double psd_tol) {
  return entropy_from_eigenvalues(hermitian_eigenvalues(rho, 1e-8), psd_tol);
}

double von_neumann_entropy(const DensityMatrix& rho, double psd_tol) {
  return von_neumann_entropy(rho.matrix(), psd_tol);
}

EntropyReport index_of_correlation(const DensityMatrix& rho, double psd_tol) {
  if (!rho.signature().is_composite()) {
    throw Error(ErrorKind::signature_mismatch, "index_of_correlation needs a composite state");
  }
  EntropyReport r;
  r.s_q = von_neumann_entropy(partial_trace_oscillator(rho), psd_tol);
  r.s_o = von_neumann_entropy(partial_trace_qubit(rho), psd_tol);
  r.s = von_neumann_entropy(rho, psd_tol);
  r.index = r.s_q + r.s_o - r.s;
  return r;
}

namespace {

QubitPopulations populations_of(const CMatrix& q) {
  return {q(kGround, kGround).real(), q(kExcited, kExcited).real(),
          std::abs(q(kGround, kExcited))};
}

}  // namespace

QubitPopulations qubit_populations(const DensityMatrix& rho) {
  return populations_of(partial_trace_oscillator(rho).matrix());
}

QubitPopulations qubit_populations(const StateVector& psi) {
  return populations_of(reduced_qubit_matrix(psi));
}

double top_level_population(const DensityMatrix& rho, int levels) {
  const auto& sig = rho.signature();
  const int n = sig.fock_dim();
  const int first = std::max(0, n - levels);
  double total = 0.0;
  const int blocks = sig.has_qubit() ? kQubitDim : 1;
  for (int b = 0; b < blocks; ++b)
    for (int k = first; k < n; ++k) total += rho(b * n + k, b * n + k).real();
  return total;
}

double top_level_population(const StateVector& psi, int levels) {
  const auto& sig = psi.signature();
  const int n = sig.fock_dim();
  const int first = std::max(0, n - levels);
  double total = 0.0;
  const int blocks = sig.has_qubit() ? kQubitDim : 1;
  for (int b = 0; b < blocks; ++b)
    for (int k = first; k < n; ++k) total += std::norm(psi[b * n + k]);
  return total;
}

// ---------------------------------------------------------------------------
// Wigner function

void PhaseSpaceGrid::validate() const {
  if (!(q_min < q_max) || !(p_min < p_max) || n_q < 2 || n_p < 2) {
    throw Error(ErrorKind::config, "phase-space grid needs q_min < q_max, p_min < p_max and "
                                   "at least 2 points per axis");
  }
}

double WignerField::integral() const { return values.sum() * grid.dq() * grid.dp(); }

RVector WignerField::position_marginal() const { return values.rowwise().sum() * grid.dp(); }

namespace {

// Displaced-parity expansion. For x = 2(q^2 + p^2) and
//   f_m^(k)(x) = sqrt(m!/(m+k)!) x^{k/2} e^{-x/2} L_m^(k)(x),
// W = (1/pi) [ sum_m (-1)^m rho_mm f_m^(0)
//            + 2 Re sum_{k>=1} e^{i k theta} sum_m (-1)^m rho_{m,m+k} f_m^(k) ].
class WignerKernel {
 public:
  explicit WignerKernel(const CMatrix& rho) : rho_(rho), n_(static_cast<int>(rho.rows())) {}

  double operator()(double q, double p) const {
    const double x = 2.0 * (q * q + p * p);
    const double theta = std::atan2(p, q);
    double total = 0.0;
    for (int k = 0; k < n_; ++k) {
      const Complex s = diagonal_sum(k, x);
      if (k == 0) {
        total += s.real();
      } else {
        total += 2.0 * (std::polar(1.0, k * theta) * s).real();
      }
    }
    return total / std::numbers::pi;
  }

 private:
  // sum_m (-1)^m rho_{m,m+k} f_m^(k)(x)
  Complex diagonal_sum(int k, double x) const {
    const int count = n_ - k;
    double f_prev = 0.0;
    double f;
    if (x == 0.0) {
      f = k == 0 ? 1.0 : 0.0;
    } else {
      f = std::exp(0.5 * k * std::log(x) - 0.5 * x - 0.5 * std::lgamma(k + 1.0));
    }
    if (f == 0.0 && x != 0.0) return 0.0;  // underflow far from the origin
    Complex s = 0.0;
    for (int m = 0; m < count; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      s += sign * rho_(m, m + k) * f;
      const double next = ((2.0 * m + 1.0 + k - x) * f -
                           std::sqrt(static_cast<double>(m) * (m + k)) * f_prev) /
                          std::sqrt((m + 1.0) * (m + k + 1.0));
      f_prev = f;
      f = next;
    }
    return s;
  }

  const CMatrix& rho_;
  int n_;
};

void require_oscillator(const DensityMatrix& rho, const char* context) {
  const auto& sig = rho.signature();
  if (sig.has_qubit() || !sig.has_oscillator()) {
    throw Error(ErrorKind::signature_mismatch,
                std::string(context) +
                    " needs an oscillator-only density matrix; partial-trace the qubit first");
  }
}

}  // namespace

double wigner_at(const DensityMatrix& rho_osc, double q, double p) {
  require_oscillator(rho_osc, "wigner");
  return WignerKernel(rho_osc.matrix())(q, p);
}

WignerField wigner(const DensityMatrix& rho_osc, const PhaseSpaceGrid& grid) {
  require_oscillator(rho_osc, "wigner");
  grid.validate();
  WignerKernel kernel(rho_osc.matrix());
  WignerField field{grid, Eigen::MatrixXd(grid.n_q, grid.n_p)};
  for (int i = 0; i < grid.n_q; ++i)
    for (int j = 0; j < grid.n_p; ++j) field.values(i, j) = kernel(grid.q(i), grid.p(j));
  return field;
}

std::vector<double> position_distribution(const DensityMatrix& rho_osc,
                                          std::span<const double> q_values) {
  require_oscillator(rho_osc, "position_distribution");
  const int n = rho_osc.dim();
  std::vector<double> out;
  out.reserve(q_values.size());
  RVector psi(n);
  for (double q : q_values) {
    psi(0) = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * q * q);
    if (n > 1) psi(1) = std::sqrt(2.0) * q * psi(0);
    for (int k = 1; k + 1 < n; ++k) {
      psi(k + 1) = std::sqrt(2.0 / (k + 1)) * q * psi(k) - std::sqrt(double(k) / (k + 1)) * psi(k - 1);
    }
    const CVector c = psi.cast<Complex>();
    out.push_back(c.dot(rho_osc.matrix() * c).real());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Outcomes

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::ground: return "G";
    case Outcome::excited: return "E";
    case Outcome::undecided: return "U";
  }
  return "?";
}

Outcome classify_population(double p_g, const OutcomeThresholds& th) {
  if (p_g > th.ground) return Outcome::ground;
  if (p_g < th.excited) return Outcome::excited;
  return Outcome::undecided;
}

long strobe_step(long period, int steps_per_period) {
  if (steps_per_period <= 0 || steps_per_period % 4 != 0) {
    throw Error(ErrorKind::config,
                "steps_per_period must be a positive multiple of 4 to strobe at t/2pi = n + 1/4");
  }
  return period * steps_per_period + steps_per_period / 4;
}

PoincareSection poincare_section(const TrajectoryRecord& record, const OutcomeThresholds& th) {
  const int spp = record.steps_per_period;
  strobe_step(0, spp);
  if (record.record_stride <= 0 || (spp / 4) % record.record_stride != 0) {
    throw Error(ErrorKind::config,
                "record_stride " + std::to_string(record.record_stride) +
                    " does not divide a quarter period of " + std::to_string(spp) +
                    " steps; strobe times would be skipped");
  }
  PoincareSection section;
  for (const auto& s : record.samples) {
    if ((s.step - spp / 4) % spp != 0 || s.step < spp / 4) continue;
    section.points.push_back({(s.step - spp / 4) / spp, s.t, s.q, s.p,
                              classify_population(s.p_g, th)});
  }
  return section;
}

Outcome classify_outcome(const TrajectoryRecord& record, double window_periods,
                         const OutcomeThresholds& th) {
  if (record.samples.empty()) return Outcome::undecided;
  const long last = record.samples.back().step;
  const long from = last - static_cast<long>(std::llround(window_periods * record.steps_per_period));
  if (record.samples.front().step > from) {
    throw Error(ErrorKind::contract_violation,
                "classify_outcome: record is shorter than the requested window");
  }
  bool all_ground = true;
  bool all_excited = true;
  for (const auto& s : record.samples) {
    if (s.step < from) continue;
    all_ground = all_ground && s.p_g > th.ground;
    all_excited = all_excited && s.p_g < th.excited;
  }
  if (all_ground) return Outcome::ground;
  if (all_excited) return Outcome::excited;
  return Outcome::undecided;
}

Outcome classify_by_region(const PoincareSection& section, const RegionBox& region_a,
                           double t_from) {
  int inside = 0;
  int outside = 0;
  for (const auto& pt : section.points) {
    if (pt.t < t_from) continue;
    (region_a.contains(pt.q, pt.p) ? inside : outside)++;
  }
  if (inside > 0 && outside == 0) return Outcome::ground;
  if (outside > 0 && inside == 0) return Outcome::excited;
  return Outcome::undecided;
}

std::vector<SwitchEvent> find_switches(const TrajectoryRecord& record,
                                       const OutcomeThresholds& th,
                                       double spike_window_periods) {
  std::vector<SwitchEvent> out;
  const double half = spike_window_periods * kDrivePeriod;
  Outcome current = Outcome::undecided;
  double t_last = 0.0;
  for (const auto& s : record.samples) {
    const Outcome c = classify_population(s.p_g, th);
    if (c == Outcome::undecided) continue;
    if (current != Outcome::undecided && c != current) {
      SwitchEvent ev{current, c, t_last, s.t, 0.0};
      for (const auto& u : record.samples) {
        if (u.t >= t_last - half && u.t <= s.t + half) ev.peak_s_q = std::max(ev.peak_s_q, u.s_q);
      }
      out.push_back(ev);
    }
    current = c;
    t_last = s.t;
  }
  return out;
}

bool projected_and_held(const TrajectoryRecord& record, double t_by,
                        const OutcomeThresholds& th) {
  // Walk backwards: the final class must hold back to some sample at or before t_by.
  if (record.samples.empty()) return false;
  const Outcome last = classify_population(record.samples.back().p_g, th);
  if (last == Outcome::undecided) return false;
  for (auto it = record.samples.rbegin(); it != record.samples.rend(); ++it) {
    if (classify_population(it->p_g, th) != last) return false;
    if (it->t <= t_by) return true;
  }
  return true;
}

}  // namespace qmeas
