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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tickbound/core.hpp"

namespace tickbound {

/// A ticking clock: Hamiltonian and no-tick dissipators generate the
/// clockwork, the tick jumps J_j generate the ticks. Rates are in arbitrary
/// but consistent units (hbar = 1). Validated on construction, immutable after.
class ClockModel {
 public:
  ClockModel(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> notick_lindblad_ops,
             std::vector<ComplexMatrix> tick_jumps, ComplexMatrix initial_state,
             std::string name = {})
      : hamiltonian_(std::move(hamiltonian)),
        notick_ops_(std::move(notick_lindblad_ops)),
        tick_jumps_(std::move(tick_jumps)),
        name_(std::move(name)) {
    const Eigen::Index d = hamiltonian_.rows();
    if (d == 0) throw Error(ErrorKind::kEmptyOperand, "clock dimension is zero");
    HermitianOperator h_check(hamiltonian_);
    require_same_square_dim(notick_ops_, d, "no-tick Lindblad operator");
    if (tick_jumps_.empty()) {
      throw Error(ErrorKind::kEmptyOperand, "a clock needs at least one tick jump");
    }
    require_same_square_dim(tick_jumps_, d, "tick jump");
    for (const auto& op : notick_ops_) require_finite(op, "no-tick Lindblad operator");
    for (const auto& op : tick_jumps_) require_finite(op, "tick jump");
    if (initial_state.rows() != d || initial_state.cols() != d) {
      throw Error(ErrorKind::kDimensionMismatch, "initial state dimension differs from H");
    }
    initial_state_ = DensityMatrix(std::move(initial_state));
    if (std::abs(initial_state_.trace() - 1.0) > kTraceTolerance) {
      throw Error(ErrorKind::kInvalidState,
                  "initial state trace " + std::to_string(initial_state_.trace()) + " != 1");
    }
    tick_operator_ = build_tick_operator(tick_jumps_);
    gamma_ = hermitian_max_eigenvalue(tick_operator_);
  }

  Eigen::Index dim() const noexcept { return hamiltonian_.rows(); }
  const ComplexMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<ComplexMatrix>& notick_lindblad_ops() const noexcept { return notick_ops_; }
  const std::vector<ComplexMatrix>& tick_jumps() const noexcept { return tick_jumps_; }
  const DensityMatrix& initial_state() const noexcept { return initial_state_; }
  const std::string& name() const noexcept { return name_; }

  /// V = sum_j J_j^dagger J_j.
  const HermitianOperator& tick_operator() const noexcept { return tick_operator_; }
  /// Fastest tick rate, the largest eigenvalue of V.
  double gamma() const noexcept { return gamma_; }

  ClockModel with_initial_state(ComplexMatrix rho) const {
    return ClockModel(hamiltonian_, notick_ops_, tick_jumps_, std::move(rho), name_);
  }

 private:
  ComplexMatrix hamiltonian_;
  std::vector<ComplexMatrix> notick_ops_;
  std::vector<ComplexMatrix> tick_jumps_;
  DensityMatrix initial_state_;
  std::string name_;
  HermitianOperator tick_operator_;
  double gamma_ = 0.0;
};

/// Entrywise comparison of every operator in two models.
inline bool models_equal(const ClockModel& a, const ClockModel& b, double tol = 0.0) {
  auto same = [tol](const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    return x.size() == 0 || (x - y).cwiseAbs().maxCoeff() <= tol;
  };
  auto same_list = [&](const std::vector<ComplexMatrix>& x, const std::vector<ComplexMatrix>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!same(x[i], y[i])) return false;
    }
    return true;
  };
  return same(a.hamiltonian(), b.hamiltonian()) &&
         same_list(a.notick_lindblad_ops(), b.notick_lindblad_ops()) &&
         same_list(a.tick_jumps(), b.tick_jumps()) &&
         same(a.initial_state().matrix(), b.initial_state().matrix());
}

}  // namespace tickbound
