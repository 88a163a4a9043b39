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

// Closed-form waiting-time families.
//
// Heaviside population: the top-level population jumps from 0 to 1 at t0,
// so P[t <= T] = 1 before t0 and exp(-Gamma (t - t0)) after. It saturates
// N = Gamma^2 / nu^2.
//
// Erlang: one tick is m consecutive exponential events of rate Gamma; it sits
// on the classical line N = Gamma / nu.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "tickbound/error.hpp"
#include "tickbound/tick_statistics.hpp"

namespace tickbound {

struct HeavisideOracle {
  double gamma = 1.0;
  double t0 = 0.0;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorKind::kInvalidArgument, "Heaviside gamma must be positive");
    }
    if (!(t0 >= 0.0) || !std::isfinite(t0)) {
      throw Error(ErrorKind::kInvalidArgument, "Heaviside t0 must be non-negative");
    }
  }
};

struct ErlangOracle {
  double gamma = 1.0;
  int m = 1;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorKind::kInvalidArgument, "Erlang gamma must be positive");
    }
    if (m < 1) throw Error(ErrorKind::kInvalidArgument, "Erlang m must be at least 1");
  }
};

inline double heaviside_survival(const HeavisideOracle& o, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "time must be non-negative");
  return t <= o.t0 ? 1.0 : std::exp(-o.gamma * (t - o.t0));
}

inline double heaviside_pdf(const HeavisideOracle& o, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "time must be non-negative");
  return t < o.t0 ? 0.0 : o.gamma * std::exp(-o.gamma * (t - o.t0));
}

inline TickStatistics heaviside_statistics(const HeavisideOracle& o) {
  o.validate();
  TickStatistics s;
  s.gamma = o.gamma;
  s.mu = o.t0 + 1.0 / o.gamma;
  s.sigma2 = 1.0 / (o.gamma * o.gamma);
  const double gt = 1.0 + o.gamma * o.t0;
  s.accuracy_N = gt * gt;
  s.resolution_nu = 1.0 / s.mu;
  s.bound_ratio = 1.0;
  s.tail_bracket = {s.mu, s.mu};
  return s;
}

/// Survival of the sum of m exponentials of rate gamma at time t.
inline double erlang_survival(const ErlangOracle& o, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "time must be non-negative");
  const double x = o.gamma * t;
  if (x == 0.0) return 1.0;
  // Terms e^{-x} x^j / j! in log space so large x cannot overflow.
  const double lx = std::log(x);
  double sum = 0.0;
  for (int j = 0; j < o.m; ++j) sum += std::exp(j * lx - x - std::lgamma(j + 1.0));
  return std::min(sum, 1.0);
}

inline TickStatistics erlang_statistics(const ErlangOracle& o) {
  o.validate();
  TickStatistics s;
  const double m = o.m;
  s.gamma = o.gamma;
  s.mu = m / o.gamma;
  s.sigma2 = m / (o.gamma * o.gamma);
  s.accuracy_N = m;
  s.resolution_nu = o.gamma / m;
  s.bound_ratio = 1.0 / m;
  s.tail_bracket = {s.mu, s.mu};
  return s;
}

/// Heaviside population with the same mean tick time as a clock of rate gamma.
/// A numerically computed mu may undershoot 1/gamma by rel_tol relative; such
/// values give t0 = 0.
inline HeavisideOracle heaviside_match(double mu, double gamma, double rel_tol = 0.0) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "gamma must be positive");
  double t0 = mu - 1.0 / gamma;
  if (t0 < 0.0 && t0 >= -rel_tol / gamma) t0 = 0.0;
  if (!(t0 >= 0.0)) {
    throw Error(ErrorKind::kMuBelowFloor,
                "mu = " + std::to_string(mu) + " below 1/Gamma = " + std::to_string(1.0 / gamma));
  }
  return HeavisideOracle{gamma, t0};
}

}  // namespace tickbound
