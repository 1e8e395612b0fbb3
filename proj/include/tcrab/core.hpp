// Copyright 2026 The tcrab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TCRAB_CORE_HPP_
#define TCRAB_CORE_HPP_

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tcrab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible size (qubit counts, matrix dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A dense materialization was requested above the configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Input fails a structural check (Hermiticity, trace, negative rate).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Unknown names or inconsistent settings in a configuration.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant (norm, trace, finiteness) was violated.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition that the type system cannot see.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

inline bool is_hermitian(const CMatrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const CMatrix& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

/// Number of qubits for a Hilbert-space dimension; throws unless a power of two.
inline int qubits_for_dimension(Eigen::Index dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  int n = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d <<= 1;
    ++n;
  }
  if (d != dim) throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
  return n;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// Projector |psi><psi|.
inline CMatrix density_matrix(const CVector& psi) { return psi * psi.adjoint(); }

}  // namespace tcrab

#endif  // TCRAB_CORE_HPP_
