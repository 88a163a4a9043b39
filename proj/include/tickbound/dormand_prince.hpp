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

// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with the order-4
// continuous extension of Hairer, Norsett and Wanner (DOPRI5). Operates on
// complex vectors; the right-hand side is any callable
//   void(double t, const ComplexVector& y, ComplexVector& dydt).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "tickbound/core.hpp"
#include "tickbound/error.hpp"

namespace tickbound {

struct StepControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  /// Bounds on h_new / h.
  double min_factor = 0.2;
  double max_factor = 10.0;
  /// Lund stabilization exponent of the PI controller.
  double beta = 0.04;
  int max_rejections = 1000;
};

/// Power-basis polynomial in the step fraction theta in [0, 1].
struct StepPolynomial {
  std::array<double, 5> c{};

  double operator()(double theta) const {
    return c[0] + theta * (c[1] + theta * (c[2] + theta * (c[3] + theta * c[4])));
  }
  double derivative(double theta) const {
    return c[1] + theta * (2.0 * c[2] + theta * (3.0 * c[3] + theta * 4.0 * c[4]));
  }
};

/// Dense output of one step in Hairer's form
///   y(theta) = r1 + theta (r2 + (1-theta)(r3 + theta (r4 + (1-theta) r5))).
struct DenseStep {
  std::array<ComplexVector, 5> r;

  void evaluate(double theta, ComplexVector& out) const {
    const double s = 1.0 - theta;
    out = r[0] + theta * (r[1] + s * (r[2] + theta * (r[3] + s * r[4])));
  }

  ComplexVector evaluate(double theta) const {
    ComplexVector out(r[0].size());
    evaluate(theta, out);
    return out;
  }

  /// Same polynomial for a scalar linear functional already applied to each r_i.
  static StepPolynomial power_basis(const std::array<double, 5>& rr) {
    StepPolynomial p;
    p.c[0] = rr[0];
    p.c[1] = rr[1] + rr[2];
    p.c[2] = -rr[2] + rr[3] + rr[4];
    p.c[3] = -rr[3] - 2.0 * rr[4];
    p.c[4] = rr[4];
    return p;
  }
};

namespace dopri5 {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dopri5

template <class Rhs>
class DormandPrince54 {
 public:
  DormandPrince54(Rhs rhs, Eigen::Index n, StepControl control = {})
      : rhs_(std::move(rhs)), control_(control) {
    for (auto* v : {&y_, &y_new_, &tmp_, &k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &err_}) {
      v->resize(n);
    }
  }

  /// Starts a new integration from (t, y). h_guess <= 0 picks a step automatically.
  void reset(double t, const ComplexVector& y, double h_guess = 0.0) {
    t_ = t;
    y_ = y;
    rhs_(t_, y_, k1_);
    h_ = h_guess > 0.0 ? h_guess : initial_step();
    h_ = std::min(h_, control_.max_step);
    fac_old_ = 1e-4;
    last_rejected_ = false;
  }

  /// Advances by one accepted step that does not pass t_limit. Returns the size.
  double step(double t_limit) {
    int rejections = 0;
    while (true) {
      double h = std::min(h_, t_limit - t_);
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(t_));
      if (h <= floor) {
        if (t_limit - t_ <= floor) {
          // Caller asked for a zero-length step.
          throw Error(ErrorKind::kStepUnderflow, "no room left before the step limit");
        }
        throw Error(ErrorKind::kStepUnderflow,
                    "step size " + std::to_string(h) + " at t = " + std::to_string(t_));
      }
      const double err = attempt(t_, y_, k1_, h);
      const double expo1 = 0.2 - control_.beta * 0.75;
      if (err <= 1.0) {
        double fac = std::pow(err, expo1) / std::pow(fac_old_, control_.beta);
        fac = std::clamp(fac / control_.safety, 1.0 / control_.max_factor,
                         1.0 / control_.min_factor);
        double h_new = h / fac;
        if (last_rejected_) h_new = std::min(h_new, h);
        fac_old_ = std::max(err, 1e-4);
        build_dense(h);
        t_prev_ = t_;
        h_last_ = h;
        y_.swap(y_new_);
        k1_.swap(k7_);
        t_ = (t_limit - (t_ + h) <= floor) ? t_limit : t_ + h;
        h_ = std::min(h_new, control_.max_step);
        last_rejected_ = false;
        return h;
      }
      const double fac = std::min(1.0 / control_.min_factor,
                                  std::pow(err, expo1) / control_.safety);
      h_ = h / fac;
      last_rejected_ = true;
      if (++rejections > control_.max_rejections) {
        throw Error(ErrorKind::kStepUnderflow, "too many rejected steps");
      }
    }
  }

  /// Overwrites the current state after an accepted step (projection onto a
  /// constraint manifold) and re-evaluates the derivative there.
  void replace_state(const ComplexVector& y) {
    y_ = y;
    rhs_(t_, y_, k1_);
  }

  /// Single step of size h from (t, y) with no error control, filling `out`
  /// with the dense output of that step. Used to recover interpolants later.
  void dense_step_from(double t, const ComplexVector& y, double h, DenseStep& out) {
    rhs_(t, y, tmp_);
    ComplexVector k1 = tmp_;
    attempt(t, y, k1, h);
    build_dense_into(y, h, k1, out);
  }

  double t() const noexcept { return t_; }
  double t_prev() const noexcept { return t_prev_; }
  double last_step() const noexcept { return h_last_; }
  double next_step() const noexcept { return h_; }
  const ComplexVector& y() const noexcept { return y_; }
  const ComplexVector& derivative() const noexcept { return k1_; }
  /// Dense output of the most recent accepted step, theta in [0, 1].
  const DenseStep& dense() const noexcept { return dense_; }

 private:
  double rms_scaled(const ComplexVector& v, const ComplexVector& y) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double sk = control_.abs_tol + control_.rel_tol * std::abs(y[i]);
      sum += std::norm(v[i]) / (sk * sk);
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(1, v.size())));
  }

  double initial_step() {
    const double dnf = rms_scaled(k1_, y_);
    const double dny = rms_scaled(y_, y_);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, control_.max_step);
    tmp_ = y_ + h * k1_;
    rhs_(t_ + h, tmp_, k2_);
    const double der2 = rms_scaled(k2_ - k1_, y_) / h;
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, control_.max_step});
  }

  // Fills k2..k7 and y_new_ from (t, y, k1); returns the scaled error norm.
  double attempt(double t, const ComplexVector& y, const ComplexVector& k1, double h) {
    using namespace dopri5;
    tmp_ = y + (h * a21) * k1;
    rhs_(t + c2 * h, tmp_, k2_);
    tmp_ = y + h * (a31 * k1 + a32 * k2_);
    rhs_(t + c3 * h, tmp_, k3_);
    tmp_ = y + h * (a41 * k1 + a42 * k2_ + a43 * k3_);
    rhs_(t + c4 * h, tmp_, k4_);
    tmp_ = y + h * (a51 * k1 + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t + c5 * h, tmp_, k5_);
    tmp_ = y + h * (a61 * k1 + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t + h, tmp_, k6_);
    y_new_ = y + h * (a71 * k1 + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t + h, y_new_, k7_);
    err_ = h * (e1 * k1 + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err_.size(); ++i) {
      const double sk =
          control_.abs_tol + control_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      sum += std::norm(err_[i]) / (sk * sk);
    }
    const double err = std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(1, err_.size())));
    if (!std::isfinite(err)) return std::numeric_limits<double>::max();
    return err;
  }

  void build_dense_into(const ComplexVector& y, double h, const ComplexVector& k1,
                        DenseStep& out) const {
    using namespace dopri5;
    out.r[0] = y;
    out.r[1] = y_new_ - y;
    out.r[2] = h * k1 - out.r[1];
    out.r[3] = out.r[1] - h * k7_ - out.r[2];
    out.r[4] = h * (d1 * k1 + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
  }

  void build_dense(double h) { build_dense_into(y_, h, k1_, dense_); }

  Rhs rhs_;
  StepControl control_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, h_last_ = 0.0;
  double fac_old_ = 1e-4;
  bool last_rejected_ = false;
  ComplexVector y_, y_new_, tmp_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, err_;
  DenseStep dense_;
};

}  // namespace tickbound
