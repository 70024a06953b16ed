#pragma once

// Qubit cross-Kerr coupled to a damped, driven nonlinear oscillator.
//
//   H(t) = 3/4 p^2 + beta^2/4 q^4 - 1/4 q^2 + (g/beta) cos(t) q
//          - 1/4 (p^2 + q^2) sigma_z + Gamma/2 (pq + qp) + epsilon sigma_x
//
// with a single zero-temperature Lindblad channel L = sqrt(2 Gamma) a. The
// qubit has no bare splitting; the drive frequency is fixed at 1.

#include <functional>
#include <span>
#include <vector>

#include "qmeas/hilbert.hpp"

namespace qmeas {

struct ModelParams {
  double beta = 0.1;
  double g = 0.3;
  double gamma = 0.125;
  double epsilon = 0.0;  // sigma_x coefficient; 1/2 gives the incompatible-observable model
  int fock_dim = 450;

  // Throws ErrorKind::config describing the first invalid field.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// beta = 0.3, N = 60: small enough to run in tests.
ModelParams desk_params();
// beta = 0.1, N = 450: the long-running production setting.
ModelParams paper_params();

// Drive frequency is 1, so one drive period is 2 pi in dimensionless time.
inline constexpr double kDrivePeriod = 6.283185307179586476925286766559;

struct HamiltonianParts {
  OperatorMatrix static_part;
  OperatorMatrix drive_part;  // multiplies cos(t)

  OperatorMatrix at(double t) const;
};

// Oscillator polynomials are formed in a space four levels larger and then
// truncated, so q^4, p^2, q^2 and pq + qp carry their exact matrix elements
// on the kept basis.
HamiltonianParts hamiltonian_parts(const ModelParams& params);
OperatorMatrix build_hamiltonian(const ModelParams& params, double t);

// {sqrt(2 Gamma) (I (x) a)}, or empty when Gamma == 0.
std::vector<OperatorMatrix> lindblad_operators(const ModelParams& params);

// V(q) = beta^2/4 q^4 - 1/4 q^2 - <sigma_z>/4 q^2
std::vector<double> effective_potential(std::span<const double> q_values,
                                        double sigma_z_expectation, const ModelParams& params);

// (c_g |g> + c_e |e>) (x) |alpha>. Throws contract_violation when the qubit
// amplitudes are not normalized within 1e-10, TruncationLeak when |alpha>
// does not fit in params.fock_dim.
StateVector initial_state(Complex c_g, Complex c_e, Complex alpha, const ModelParams& params,
                          double leak_tol = kDefaultLeakTol);

// Composite-space observables used by every diagnostic.
struct ObservableSet {
  OperatorMatrix q;
  OperatorMatrix p;
  OperatorMatrix sigma_z;
  OperatorMatrix sigma_x;
};

ObservableSet composite_observables(int fock_dim);

// Projection of an oscillator polynomial onto the truncated basis, computed
// in an enlarged space. Exposed for tests.
CMatrix truncated_polynomial(int fock_dim, const std::function<CMatrix(const CMatrix& q, const CMatrix& p)>& poly);

}  // namespace qmeas
