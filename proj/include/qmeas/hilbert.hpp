#pragma once

// Truncated Fock space and qubit operator algebra.
//
// The composite space is always ordered qubit (x) oscillator, with composite
// index = qubit_index * N + fock_index. Qubit index 0 is |g> and index 1 is
// |e>, so sigma_z = diag(-1, +1).

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace qmeas {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr int kQubitDim = 2;
inline constexpr int kGround = 0;
inline constexpr int kExcited = 1;

class SpaceSignature {
 public:
  static SpaceSignature qubit() { return {true, 0}; }
  static SpaceSignature oscillator(int fock_dim);
  static SpaceSignature composite(int fock_dim);

  bool has_qubit() const { return has_qubit_; }
  bool has_oscillator() const { return fock_dim_ > 0; }
  bool is_composite() const { return has_qubit_ && fock_dim_ > 0; }
  int fock_dim() const { return fock_dim_; }
  int dim() const { return (has_qubit_ ? kQubitDim : 1) * (fock_dim_ > 0 ? fock_dim_ : 1); }

  std::string describe() const;

  friend bool operator==(const SpaceSignature&, const SpaceSignature&) = default;

 private:
  SpaceSignature(bool has_qubit, int fock_dim) : has_qubit_(has_qubit), fock_dim_(fock_dim) {}

  bool has_qubit_;
  int fock_dim_;
};

// Throws signature_mismatch naming `context` when a != b.
void require_same_signature(const SpaceSignature& a, const SpaceSignature& b,
                            const char* context);

class StateVector;

class OperatorMatrix {
 public:
  OperatorMatrix(SpaceSignature sig, CMatrix entries);

  static OperatorMatrix identity(SpaceSignature sig);
  static OperatorMatrix zero(SpaceSignature sig);

  const SpaceSignature& signature() const { return sig_; }
  const CMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  Complex operator()(int row, int col) const { return m_(row, col); }

  OperatorMatrix adjoint() const { return {sig_, m_.adjoint()}; }
  Complex trace() const { return m_.trace(); }

  // max_ij |A - A^dagger|_ij
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }

  // <psi|A|psi> for a normalized psi.
  Complex expectation(const StateVector& psi) const;

  OperatorMatrix& operator+=(const OperatorMatrix& rhs);
  OperatorMatrix& operator-=(const OperatorMatrix& rhs);
  OperatorMatrix& operator*=(Complex s);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
  friend OperatorMatrix operator*(OperatorMatrix a, Complex s) { return a *= s; }
  friend OperatorMatrix operator*(Complex s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

 private:
  SpaceSignature sig_;
  CMatrix m_;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

class StateVector {
 public:
  StateVector(SpaceSignature sig, CVector amplitudes);

  const SpaceSignature& signature() const { return sig_; }
  const CVector& amplitudes() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }
  Complex operator[](int i) const { return v_(i); }

  double norm() const { return v_.norm(); }
  // Throws norm_collapse if the norm is zero.
  StateVector normalized() const;

  friend StateVector operator*(const OperatorMatrix& a, const StateVector& psi);

 private:
  SpaceSignature sig_;
  CVector v_;
};

Complex inner(const StateVector& a, const StateVector& b);

class DensityMatrix {
 public:
  DensityMatrix(SpaceSignature sig, CMatrix entries);

  static DensityMatrix from_pure(const StateVector& psi);

  const SpaceSignature& signature() const { return sig_; }
  const CMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  Complex operator()(int row, int col) const { return m_(row, col); }

  Complex trace() const { return m_.trace(); }
  double purity() const;
  double hermiticity_error() const;
  double expectation(const OperatorMatrix& a) const;

  OperatorMatrix as_operator() const { return {sig_, m_}; }

 private:
  SpaceSignature sig_;
  CMatrix m_;
};

// Oscillator operators on the truncated basis {|0>, ..., |N-1>}.
// All throw invalid_dimension for N < 2.
OperatorMatrix annihilation_op(int fock_dim);
OperatorMatrix creation_op(int fock_dim);
OperatorMatrix number_op(int fock_dim);
OperatorMatrix position_op(int fock_dim);  // (a + a^dagger) / sqrt(2)
OperatorMatrix momentum_op(int fock_dim);  // -i (a - a^dagger) / sqrt(2)

struct PauliSet {
  OperatorMatrix x;
  OperatorMatrix y;
  OperatorMatrix z;
};

PauliSet pauli_ops();

StateVector qubit_ground();
StateVector qubit_excited();
StateVector qubit_state(Complex c_g, Complex c_e);
StateVector fock_state(int n, int fock_dim);

// sum_{n >= N} e^{-|alpha|^2} |alpha|^{2n} / n!, the weight a coherent state
// loses when truncated to N levels.
double coherent_tail_weight(Complex alpha, int fock_dim);

// Smallest N whose coherent tail weight is below `leak_tol`.
int required_fock_dim(Complex alpha, double leak_tol);

inline constexpr double kDefaultLeakTol = 1e-8;

// Truncated coherent state renormalized to unit norm. Throws TruncationLeak
// when the discarded tail weight exceeds `leak_tol`.
StateVector coherent_state(Complex alpha, int fock_dim, double leak_tol = kDefaultLeakTol);

// Un-normalized truncated amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!).
CVector coherent_amplitudes(Complex alpha, int fock_dim);

// Kronecker product under the qubit (x) oscillator ordering. The left operand
// must be qubit-only and the right oscillator-only.
OperatorMatrix tensor(const OperatorMatrix& qubit_op, const OperatorMatrix& osc_op);
StateVector tensor(const StateVector& qubit_state, const StateVector& osc_state);
DensityMatrix tensor(const DensityMatrix& qubit_rho, const DensityMatrix& osc_rho);

// Lift single-subsystem operators to the composite space.
OperatorMatrix on_qubit(const OperatorMatrix& qubit_op, int fock_dim);
OperatorMatrix on_oscillator(const OperatorMatrix& osc_op);

DensityMatrix partial_trace_oscillator(const DensityMatrix& rho);
DensityMatrix partial_trace_qubit(const DensityMatrix& rho);

// 2x2 reduced qubit matrix of a pure composite state, without forming |psi><psi|.
CMatrix reduced_qubit_matrix(const StateVector& psi);

// Ascending real eigenvalues of a Hermitian matrix. Throws contract_violation
// when max|A - A^dagger| exceeds `herm_tol` (scaled by max(1, max|A|)).
RVector hermitian_eigenvalues(const CMatrix& a, double herm_tol = 1e-10);
RVector hermitian_eigenvalues(const OperatorMatrix& a, double herm_tol = 1e-10);

}  // namespace qmeas
