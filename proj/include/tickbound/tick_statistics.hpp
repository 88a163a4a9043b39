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

#include <cmath>
#include <string>
#include <utility>

#include "tickbound/error.hpp"

namespace tickbound {

/// Waiting-time statistics of one tick.
struct TickStatistics {
  double mu = 0.0;
  double sigma2 = 0.0;
  double accuracy_N = 0.0;
  double resolution_nu = 0.0;
  double gamma = 0.0;
  double bound_ratio = 0.0;
  /// Range of mu consistent with the worst-case tail behaviour beyond the
  /// integration horizon. Degenerate (mu, mu) for closed-form statistics.
  std::pair<double, double> tail_bracket{0.0, 0.0};
  /// Convergence metadata; closed-form results report converged with zero
  /// horizon.
  bool converged = true;
  double horizon = 0.0;
  double survival_at_horizon = 0.0;
  /// Rate of the exponential tail appended past the horizon.
  double tail_rate = 0.0;
};

/// Fills the derived fields from mu, sigma2 and gamma.
inline TickStatistics make_tick_statistics(double mu, double sigma2, double gamma) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorKind::kNonPositiveVariance, "variance " + std::to_string(sigma2));
  }
  if (!(mu > 0.0) || !(gamma > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "mu and gamma must be positive");
  }
  TickStatistics s;
  s.mu = mu;
  s.sigma2 = sigma2;
  s.accuracy_N = mu * mu / sigma2;
  s.resolution_nu = 1.0 / mu;
  s.gamma = gamma;
  s.bound_ratio = s.accuracy_N * s.resolution_nu * s.resolution_nu / (gamma * gamma);
  s.tail_bracket = {mu, mu};
  return s;
}

struct TradeoffCheck {
  bool satisfied = false;
  /// N nu^2 / Gamma^2; at most one for every clock.
  double ratio = 0.0;
  /// N nu / Gamma; one on the classical averaging line.
  double classical_ratio = 0.0;
};

inline TradeoffCheck check_tradeoff(const TickStatistics& stats) {
  TradeoffCheck out;
  const double nu = stats.resolution_nu;
  const double g = stats.gamma;
  out.ratio = stats.accuracy_N * nu * nu / (g * g);
  out.classical_ratio = stats.accuracy_N * nu / g;
  out.satisfied = stats.accuracy_N <= (g * g) / (nu * nu) * (1.0 + 1e-6);
  return out;
}

}  // namespace tickbound
