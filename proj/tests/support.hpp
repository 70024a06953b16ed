#pragma once

#include <random>

#include "qmeas/hilbert.hpp"

namespace qmeas::testing {

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  const CMatrix m = random_matrix(n, rng);
  return (m + m.adjoint()) / 2.0;
}

// Wishart-style PSD matrix with unit trace.
inline CMatrix random_density(int n, std::mt19937_64& rng) {
  const CMatrix m = random_matrix(n, rng);
  CMatrix rho = m * m.adjoint();
  return rho / rho.trace();
}

inline CVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  return v.normalized();
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qmeas::testing
