// Copyright 2026 The tickbound Authors
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

// Dense complex operators and the validated state/operator types used across
// the library. Dimensions of interest are small (a few dozen), so everything
// is stored densely.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "tickbound/error.hpp"

namespace tickbound {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;

/// Largest entrywise |A - A^dagger|. Square input only.
inline double hermitian_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "hermitian_defect needs a square matrix");
  }
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

inline void require_finite(const ComplexMatrix& a, const char* what) {
  if (!all_finite(a)) {
    throw Error(ErrorKind::kNonFinite, std::string(what) + " has non-finite entries");
  }
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

inline double real_trace(const ComplexMatrix& a) {
  return a.trace().real();
}

/// Hermitian within kHermitianTolerance. Immutable once built.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols()) {
      throw Error(ErrorKind::kDimensionMismatch, "Hermitian operator must be square");
    }
    if (matrix_.rows() == 0) {
      throw Error(ErrorKind::kEmptyOperand, "Hermitian operator has dimension zero");
    }
    require_finite(matrix_, "Hermitian operator");
    const double defect = hermitian_defect(matrix_);
    if (defect > kHermitianTolerance) {
      throw Error(ErrorKind::kNonHermitian,
                  "max |A - A^dagger| = " + std::to_string(defect));
    }
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

/// Possibly sub-normalized density matrix: Hermitian, positive semidefinite and
/// trace <= 1, each within 1e-10.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols()) {
      throw Error(ErrorKind::kDimensionMismatch, "density matrix must be square");
    }
    if (matrix_.rows() == 0) {
      throw Error(ErrorKind::kEmptyOperand, "density matrix has dimension zero");
    }
    require_finite(matrix_, "density matrix");
    const double defect = hermitian_defect(matrix_);
    if (defect > kHermitianTolerance) {
      throw Error(ErrorKind::kNonHermitian,
                  "density matrix max |A - A^dagger| = " + std::to_string(defect));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(matrix_),
                                                     Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -kPositivityTolerance) {
      throw Error(ErrorKind::kInvalidState,
                  "density matrix has eigenvalue " + std::to_string(min_eig));
    }
    trace_ = real_trace(matrix_);
    if (trace_ > 1.0 + kTraceTolerance) {
      throw Error(ErrorKind::kInvalidState,
                  "density matrix trace " + std::to_string(trace_) + " exceeds 1");
    }
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  double trace() const noexcept { return trace_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
  double trace_ = 0.0;
};

/// |i><j| in dimension `dim`.
inline ComplexMatrix ketbra(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

/// Column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho).
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw Error(ErrorKind::kDimensionMismatch, "unvec size mismatch");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

/// Largest eigenvalue. For positive semidefinite V this is the max-norm that
/// defines the fastest tick rate.
inline double hermitian_max_eigenvalue(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(op.matrix()),
                                                   Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

inline double hermitian_max_eigenvalue(const ComplexMatrix& m) {
  return hermitian_max_eigenvalue(HermitianOperator(m));
}

inline double hermitian_min_eigenvalue(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(op.matrix()),
                                                   Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

inline void require_same_square_dim(std::span<const ComplexMatrix> ops, Eigen::Index dim,
                                    const char* what) {
  for (const auto& op : ops) {
    if (op.rows() != dim || op.cols() != dim) {
      throw Error(ErrorKind::kDimensionMismatch,
                  std::string(what) + " has shape " + std::to_string(op.rows()) + "x" +
                      std::to_string(op.cols()) + ", expected " + std::to_string(dim) +
                      "x" + std::to_string(dim));
    }
  }
}

/// V = sum_j J_j^dagger J_j.
inline HermitianOperator build_tick_operator(std::span<const ComplexMatrix> jumps) {
  if (jumps.empty()) {
    throw Error(ErrorKind::kEmptyOperand, "tick operator needs at least one jump");
  }
  const Eigen::Index dim = jumps.front().rows();
  if (dim == 0) throw Error(ErrorKind::kEmptyOperand, "jump operator has dimension zero");
  require_same_square_dim(jumps, dim, "tick jump");
  ComplexMatrix v = ComplexMatrix::Zero(dim, dim);
  for (const auto& j : jumps) v.noalias() += j.adjoint() * j;
  // Exact Hermiticity; J^dagger J is Hermitian up to rounding.
  return HermitianOperator(hermitian_part(v));
}

/// Direct action of the no-tick generator
///   -i[H, rho] + sum_k (L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho}) - s/2 {V, rho}
/// with s = tick_sign (+1 physically; -1 only for harness mutation tests).
inline ComplexMatrix apply_no_tick_generator(const ComplexMatrix& hamiltonian,
                                             std::span<const ComplexMatrix> dissipators,
                                             const ComplexMatrix& tick_operator,
                                             const ComplexMatrix& rho,
                                             double tick_sign = 1.0) {
  const Eigen::Index dim = hamiltonian.rows();
  if (hamiltonian.cols() != dim || tick_operator.rows() != dim ||
      tick_operator.cols() != dim || rho.rows() != dim || rho.cols() != dim) {
    throw Error(ErrorKind::kDimensionMismatch, "generator operands differ in dimension");
  }
  require_same_square_dim(dissipators, dim, "dissipator");
  const Complex minus_i(0.0, -1.0);
  ComplexMatrix out = minus_i * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& l : dissipators) {
    const ComplexMatrix ldl = l.adjoint() * l;
    out.noalias() += l * rho * l.adjoint();
    out.noalias() -= 0.5 * (ldl * rho + rho * ldl);
  }
  out.noalias() -= (0.5 * tick_sign) * (tick_operator * rho + rho * tick_operator);
  return out;
}

/// Matrix of the no-tick generator acting on column-stacked rho (dim^2 x dim^2).
inline ComplexMatrix vectorize_superoperator(const ComplexMatrix& hamiltonian,
                                             std::span<const ComplexMatrix> dissipators,
                                             const HermitianOperator& anticommutator_op,
                                             double tick_sign = 1.0) {
  const Eigen::Index dim = hamiltonian.rows();
  if (hamiltonian.cols() != dim || anticommutator_op.dim() != dim) {
    throw Error(ErrorKind::kDimensionMismatch, "superoperator operands differ in dimension");
  }
  require_same_square_dim(dissipators, dim, "dissipator");
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  const Complex minus_i(0.0, -1.0);
  // -i(H rho - rho H) -> -i (I kron H - H^T kron I)
  ComplexMatrix s = minus_i * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  for (const auto& l : dissipators) {
    const ComplexMatrix ldl = l.adjoint() * l;
    s += kron(l.conjugate(), l);
    s -= 0.5 * (kron(id, ldl) + kron(ldl.transpose(), id));
  }
  const ComplexMatrix& v = anticommutator_op.matrix();
  s -= (0.5 * tick_sign) * (kron(id, v) + kron(v.transpose(), id));
  return s;
}

}  // namespace tickbound
