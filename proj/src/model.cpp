#include "qmeas/model.hpp"

#include <cmath>
#include <sstream>

#include "qmeas/error.hpp"

namespace qmeas {

namespace {

constexpr int kTruncationPad = 4;  // q^4 couples levels up to 4 apart

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::config, "invalid model parameters: " + what);
}

}  // namespace

void ModelParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) config_error("beta must be > 0");
  if (!(g >= 0.0) || !std::isfinite(g)) config_error("g must be >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) config_error("gamma must be >= 0");
  if (!std::isfinite(epsilon)) config_error("epsilon must be finite");
  if (fock_dim < 2) config_error("fock_dim must be >= 2");
}

ModelParams desk_params() {
  ModelParams p;
  p.beta = 0.3;
  p.fock_dim = 60;
  return p;
}

ModelParams paper_params() { return ModelParams{}; }

CMatrix truncated_polynomial(
    int fock_dim, const std::function<CMatrix(const CMatrix& q, const CMatrix& p)>& poly) {
  const int big = fock_dim + kTruncationPad;
  const CMatrix q = position_op(big).matrix();
  const CMatrix p = momentum_op(big).matrix();
  return poly(q, p).topLeftCorner(fock_dim, fock_dim);
}

OperatorMatrix HamiltonianParts::at(double t) const {
  return static_part + drive_part * Complex(std::cos(t));
}

HamiltonianParts hamiltonian_parts(const ModelParams& params) {
  params.validate();
  const int n = params.fock_dim;
  const auto osc = SpaceSignature::oscillator(n);
  const double b2 = params.beta * params.beta;

  const CMatrix bare = truncated_polynomial(n, [&](const CMatrix& q, const CMatrix& p) {
    const CMatrix q2 = q * q;
    const CMatrix p2 = p * p;
    return CMatrix(0.75 * p2 + (b2 / 4.0) * q2 * q2 - 0.25 * q2 +
                   (params.gamma / 2.0) * (p * q + q * p));
  });
  const CMatrix interaction = truncated_polynomial(
      n, [](const CMatrix& q, const CMatrix& p) { return CMatrix(0.25 * (p * p + q * q)); });

  const auto pauli = pauli_ops();
  OperatorMatrix static_part = on_oscillator(OperatorMatrix(osc, bare)) -
                               tensor(pauli.z, OperatorMatrix(osc, interaction));
  if (params.epsilon != 0.0) static_part += on_qubit(pauli.x, n) * Complex(params.epsilon);

  OperatorMatrix drive_part = on_oscillator(position_op(n)) * Complex(params.g / params.beta);
  return {std::move(static_part), std::move(drive_part)};
}

OperatorMatrix build_hamiltonian(const ModelParams& params, double t) {
  return hamiltonian_parts(params).at(t);
}

std::vector<OperatorMatrix> lindblad_operators(const ModelParams& params) {
  params.validate();
  if (params.gamma == 0.0) return {};
  return {on_oscillator(annihilation_op(params.fock_dim)) *
          Complex(std::sqrt(2.0 * params.gamma))};
}

std::vector<double> effective_potential(std::span<const double> q_values,
                                        double sigma_z_expectation, const ModelParams& params) {
  const double b2 = params.beta * params.beta;
  std::vector<double> v;
  v.reserve(q_values.size());
  for (double q : q_values) {
    const double q2 = q * q;
    v.push_back(b2 / 4.0 * q2 * q2 - 0.25 * q2 - sigma_z_expectation / 4.0 * q2);
  }
  return v;
}

StateVector initial_state(Complex c_g, Complex c_e, Complex alpha, const ModelParams& params,
                          double leak_tol) {
  params.validate();
  const double norm2 = std::norm(c_g) + std::norm(c_e);
  if (std::abs(norm2 - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "qubit amplitudes must satisfy |c_g|^2 + |c_e|^2 = 1, got " << norm2;
    throw Error(ErrorKind::contract_violation, msg.str());
  }
  return tensor(qubit_state(c_g, c_e), coherent_state(alpha, params.fock_dim, leak_tol));
}

ObservableSet composite_observables(int fock_dim) {
  const auto pauli = pauli_ops();
  return {on_oscillator(position_op(fock_dim)), on_oscillator(momentum_op(fock_dim)),
          on_qubit(pauli.z, fock_dim), on_qubit(pauli.x, fock_dim)};
}

}  // namespace qmeas
