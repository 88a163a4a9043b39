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

// Reference computations used only by the tests. None of these go through
// the library's integrators: the generator is rebuilt element by element,
// exponentials come from Eigen's MatrixFunctions module and moments from
// the resolvent of the generator.

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tickbound/tickbound.hpp"

namespace tickbound::testing {

/// No-tick generator as a d^2 x d^2 matrix, assembled by applying the
/// defining formula to each basis matrix |i><j|.
inline ComplexMatrix reference_generator(const ClockModel& m) {
  const Eigen::Index d = m.dim();
  const ComplexMatrix& h = m.hamiltonian();
  ComplexMatrix v = ComplexMatrix::Zero(d, d);
  for (const auto& j : m.tick_jumps()) v += j.adjoint() * j;
  ComplexMatrix out(d * d, d * d);
  const Complex i1(0.0, 1.0);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(r, c) = 1.0;
      ComplexMatrix y = -i1 * (h * e - e * h) - 0.5 * (v * e + e * v);
      for (const auto& l : m.notick_lindblad_ops()) {
        y += l * e * l.adjoint() - 0.5 * (l.adjoint() * l * e + e * l.adjoint() * l);
      }
      for (Eigen::Index q = 0; q < d; ++q) {
        for (Eigen::Index p = 0; p < d; ++p) out(p + q * d, r + c * d) = y(p, q);
      }
    }
  }
  return out;
}

inline ComplexVector stack(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) v(r + c * m.rows()) = m(r, c);
  }
  return v;
}

inline ComplexMatrix unstack(const ComplexVector& v, Eigen::Index d) {
  ComplexMatrix m(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) m(r, c) = v(r + c * d);
  }
  return m;
}

/// rho0(t) = exp(L t) rho(0) via Eigen's matrix exponential.
class ExpmOracle {
 public:
  explicit ExpmOracle(const ClockModel& m)
      : d_(m.dim()), gen_(reference_generator(m)), rho0_(stack(m.initial_state().matrix())) {}

  ComplexMatrix state(double t) const {
    const ComplexMatrix lt = gen_ * t;
    const ComplexMatrix e = lt.exp();
    return unstack(e * rho0_, d_);
  }
  double survival(double t) const { return state(t).trace().real(); }

 private:
  Eigen::Index d_;
  ComplexMatrix gen_;
  ComplexVector rho0_;
};

/// Raw moments t_k = k! tr((-L)^{-k} rho(0)) of the first tick time.
inline std::vector<double> resolvent_moments(const ClockModel& m, int kmax) {
  const Eigen::Index d = m.dim();
  const ComplexMatrix neg = -reference_generator(m);
  Eigen::PartialPivLU<ComplexMatrix> lu(neg);
  ComplexVector x = stack(m.initial_state().matrix());
  std::vector<double> out;
  double fact = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    x = lu.solve(x);
    fact *= k;
    out.push_back(fact * unstack(x, d).trace().real());
  }
  return out;
}

/// Composite trapezoid rule on a uniform grid.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace tickbound::testing
