#include "qmeas/hilbert.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "qmeas/error.hpp"

namespace qmeas {

namespace {

void require_fock_dim(int fock_dim) {
  if (fock_dim < 2) {
    throw Error(ErrorKind::invalid_dimension,
                "Fock dimension must be >= 2, got " + std::to_string(fock_dim));
  }
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

SpaceSignature SpaceSignature::oscillator(int fock_dim) {
  require_fock_dim(fock_dim);
  return {false, fock_dim};
}

SpaceSignature SpaceSignature::composite(int fock_dim) {
  require_fock_dim(fock_dim);
  return {true, fock_dim};
}

std::string SpaceSignature::describe() const {
  if (is_composite()) return "qubit x fock(" + std::to_string(fock_dim_) + ")";
  if (has_qubit_) return "qubit";
  return "fock(" + std::to_string(fock_dim_) + ")";
}

void require_same_signature(const SpaceSignature& a, const SpaceSignature& b,
                            const char* context) {
  if (!(a == b)) {
    throw Error(ErrorKind::signature_mismatch, std::string(context) + ": " + a.describe() +
                                                   " vs " + b.describe());
  }
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(SpaceSignature sig, CMatrix entries)
    : sig_(sig), m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() != sig_.dim()) {
    throw Error(ErrorKind::invalid_dimension,
                "operator of shape " + std::to_string(m_.rows()) + "x" +
                    std::to_string(m_.cols()) + " does not match " + sig_.describe());
  }
}

OperatorMatrix OperatorMatrix::identity(SpaceSignature sig) {
  return {sig, CMatrix::Identity(sig.dim(), sig.dim())};
}

OperatorMatrix OperatorMatrix::zero(SpaceSignature sig) {
  return {sig, CMatrix::Zero(sig.dim(), sig.dim())};
}

double OperatorMatrix::hermiticity_error() const { return max_abs(m_ - m_.adjoint()); }

Complex OperatorMatrix::expectation(const StateVector& psi) const {
  require_same_signature(sig_, psi.signature(), "expectation");
  return psi.amplitudes().dot(m_ * psi.amplitudes());
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
  require_same_signature(sig_, rhs.sig_, "operator +");
  m_ += rhs.m_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
  require_same_signature(sig_, rhs.sig_, "operator -");
  m_ -= rhs.m_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_signature(a.sig_, b.sig_, "operator *");
  return {a.sig_, a.m_ * b.m_};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b - b * a;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SpaceSignature sig, CVector amplitudes)
    : sig_(sig), v_(std::move(amplitudes)) {
  if (v_.size() != sig_.dim()) {
    throw Error(ErrorKind::invalid_dimension,
                "state of length " + std::to_string(v_.size()) + " does not match " +
                    sig_.describe());
  }
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::norm_collapse, "cannot normalize a state of norm " + std::to_string(n));
  }
  return {sig_, v_ / n};
}

StateVector operator*(const OperatorMatrix& a, const StateVector& psi) {
  require_same_signature(a.signature(), psi.sig_, "operator * state");
  return {psi.sig_, a.matrix() * psi.v_};
}

Complex inner(const StateVector& a, const StateVector& b) {
  require_same_signature(a.signature(), b.signature(), "inner");
  return a.amplitudes().dot(b.amplitudes());
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(SpaceSignature sig, CMatrix entries)
    : sig_(sig), m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() != sig_.dim()) {
    throw Error(ErrorKind::invalid_dimension,
                "density matrix shape does not match " + sig_.describe());
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const CVector& v = psi.amplitudes();
  return {psi.signature(), v * v.adjoint()};
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho.
  return m_.cwiseAbs2().sum();
}

double DensityMatrix::hermiticity_error() const { return max_abs(m_ - m_.adjoint()); }

double DensityMatrix::expectation(const OperatorMatrix& a) const {
  require_same_signature(sig_, a.signature(), "density expectation");
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (m_.transpose().cwiseProduct(a.matrix())).sum().real();
}

// ---------------------------------------------------------------------------
// Oscillator and qubit operators

OperatorMatrix annihilation_op(int fock_dim) {
  const auto sig = SpaceSignature::oscillator(fock_dim);
  CMatrix a = CMatrix::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {sig, std::move(a)};
}

OperatorMatrix creation_op(int fock_dim) { return annihilation_op(fock_dim).adjoint(); }

OperatorMatrix number_op(int fock_dim) {
  const auto sig = SpaceSignature::oscillator(fock_dim);
  CMatrix n = CMatrix::Zero(fock_dim, fock_dim);
  for (int k = 0; k < fock_dim; ++k) n(k, k) = static_cast<double>(k);
  return {sig, std::move(n)};
}

OperatorMatrix position_op(int fock_dim) {
  const auto a = annihilation_op(fock_dim);
  return (a + a.adjoint()) * Complex(1.0 / std::sqrt(2.0));
}

OperatorMatrix momentum_op(int fock_dim) {
  const auto a = annihilation_op(fock_dim);
  return (a - a.adjoint()) * Complex(0.0, -1.0 / std::sqrt(2.0));
}

PauliSet pauli_ops() {
  const auto sig = SpaceSignature::qubit();
  const Complex i(0.0, 1.0);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  // basis order (g, e) with sigma_z = diag(-1, +1); y keeps [x, y] = 2i z.
  y << 0.0, i, -i, 0.0;
  z << -1.0, 0.0, 0.0, 1.0;
  return {OperatorMatrix(sig, x), OperatorMatrix(sig, y), OperatorMatrix(sig, z)};
}

StateVector qubit_state(Complex c_g, Complex c_e) {
  CVector v(2);
  v(kGround) = c_g;
  v(kExcited) = c_e;
  return {SpaceSignature::qubit(), std::move(v)};
}

StateVector qubit_ground() { return qubit_state(1.0, 0.0); }
StateVector qubit_excited() { return qubit_state(0.0, 1.0); }

StateVector fock_state(int n, int fock_dim) {
  const auto sig = SpaceSignature::oscillator(fock_dim);
  if (n < 0 || n >= fock_dim) {
    throw Error(ErrorKind::invalid_dimension,
                "Fock level " + std::to_string(n) + " outside truncation " +
                    std::to_string(fock_dim));
  }
  CVector v = CVector::Zero(fock_dim);
  v(n) = 1.0;
  return {sig, std::move(v)};
}

// ---------------------------------------------------------------------------
// Coherent states

namespace {

double log_poisson(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + n * std::log(mean) - std::lgamma(n + 1.0);
}

}  // namespace

double coherent_tail_weight(Complex alpha, int fock_dim) {
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 0.0;
  // Sum the tail upward; terms decrease monotonically once n > mean.
  double total = 0.0;
  for (int n = fock_dim;; ++n) {
    const double term = std::exp(log_poisson(n, mean));
    total += term;
    if (n > mean && term <= total * 1e-17) break;
    if (n > fock_dim + 100000) break;
  }
  return total;
}

int required_fock_dim(Complex alpha, double leak_tol) {
  int n = 2;
  while (coherent_tail_weight(alpha, n) > leak_tol) ++n;
  return n;
}

CVector coherent_amplitudes(Complex alpha, int fock_dim) {
  require_fock_dim(fock_dim);
  CVector c = CVector::Zero(fock_dim);
  const double r = std::abs(alpha);
  const double theta = std::arg(alpha);
  if (r == 0.0) {
    c(0) = 1.0;
    return c;
  }
  for (int n = 0; n < fock_dim; ++n) {
    const double log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
    c(n) = std::polar(std::exp(log_mag), n * theta);
  }
  return c;
}

StateVector coherent_state(Complex alpha, int fock_dim, double leak_tol) {
  require_fock_dim(fock_dim);
  const double tail = coherent_tail_weight(alpha, fock_dim);
  if (tail > leak_tol) {
    const int need = required_fock_dim(alpha, leak_tol);
    throw TruncationLeak("coherent state |alpha|=" + std::to_string(std::abs(alpha)) +
                             " leaks weight " + std::to_string(tail) + " beyond N=" +
                             std::to_string(fock_dim) + "; need N >= " + std::to_string(need),
                         need);
  }
  StateVector raw(SpaceSignature::oscillator(fock_dim), coherent_amplitudes(alpha, fock_dim));
  return raw.normalized();
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces

namespace {

void require_split_operands(const SpaceSignature& q, const SpaceSignature& o) {
  if (!(q == SpaceSignature::qubit()) || o.has_qubit() || !o.has_oscillator()) {
    throw Error(ErrorKind::signature_mismatch,
                "tensor expects (qubit, oscillator) operands, got (" + q.describe() + ", " +
                    o.describe() + ")");
  }
}

void require_composite(const SpaceSignature& s, const char* context) {
  if (!s.is_composite()) {
    throw Error(ErrorKind::signature_mismatch,
                std::string(context) + " requires a composite state, got " + s.describe());
  }
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

OperatorMatrix tensor(const OperatorMatrix& qubit_op, const OperatorMatrix& osc_op) {
  require_split_operands(qubit_op.signature(), osc_op.signature());
  return {SpaceSignature::composite(osc_op.signature().fock_dim()),
          kron(qubit_op.matrix(), osc_op.matrix())};
}

StateVector tensor(const StateVector& qubit_state, const StateVector& osc_state) {
  require_split_operands(qubit_state.signature(), osc_state.signature());
  const int n = osc_state.dim();
  CVector v(2 * n);
  for (int q = 0; q < 2; ++q) v.segment(q * n, n) = qubit_state[q] * osc_state.amplitudes();
  return {SpaceSignature::composite(n), std::move(v)};
}

DensityMatrix tensor(const DensityMatrix& qubit_rho, const DensityMatrix& osc_rho) {
  require_split_operands(qubit_rho.signature(), osc_rho.signature());
  return {SpaceSignature::composite(osc_rho.signature().fock_dim()),
          kron(qubit_rho.matrix(), osc_rho.matrix())};
}

OperatorMatrix on_qubit(const OperatorMatrix& qubit_op, int fock_dim) {
  return tensor(qubit_op, OperatorMatrix::identity(SpaceSignature::oscillator(fock_dim)));
}

OperatorMatrix on_oscillator(const OperatorMatrix& osc_op) {
  return tensor(OperatorMatrix::identity(SpaceSignature::qubit()), osc_op);
}

DensityMatrix partial_trace_oscillator(const DensityMatrix& rho) {
  require_composite(rho.signature(), "partial_trace_oscillator");
  const int n = rho.signature().fock_dim();
  CMatrix out(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = rho.matrix().block(i * n, j * n, n, n).trace();
  return {SpaceSignature::qubit(), std::move(out)};
}

DensityMatrix partial_trace_qubit(const DensityMatrix& rho) {
  require_composite(rho.signature(), "partial_trace_qubit");
  const int n = rho.signature().fock_dim();
  CMatrix out = rho.matrix().topLeftCorner(n, n) + rho.matrix().bottomRightCorner(n, n);
  return {SpaceSignature::oscillator(n), std::move(out)};
}

CMatrix reduced_qubit_matrix(const StateVector& psi) {
  require_composite(psi.signature(), "reduced_qubit_matrix");
  const int n = psi.signature().fock_dim();
  const auto g = psi.amplitudes().head(n);
  const auto e = psi.amplitudes().tail(n);
  CMatrix out(2, 2);
  out(kGround, kGround) = g.squaredNorm();
  out(kExcited, kExcited) = e.squaredNorm();
  out(kGround, kExcited) = e.dot(g);  // sum_n g_n conj(e_n)
  out(kExcited, kGround) = std::conj(out(kGround, kExcited));
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalues

RVector hermitian_eigenvalues(const CMatrix& a, double herm_tol) {
  const double scale = std::max(1.0, max_abs(a));
  const double err = max_abs(a - a.adjoint());
  if (err > herm_tol * scale) {
    throw Error(ErrorKind::contract_violation,
                "hermitian_eigenvalues: input is not Hermitian (max|A-A^+| = " +
                    std::to_string(err) + ")");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

RVector hermitian_eigenvalues(const OperatorMatrix& a, double herm_tol) {
  return hermitian_eigenvalues(a.matrix(), herm_tol);
}

}  // namespace qmeas
