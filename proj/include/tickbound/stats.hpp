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

// Moments, per-tick statistics, multi-tick sequences and the survival
// crossing diagnostic.
//
// Moments use t_k = k \int t^{k-1} P[t <= T] dt. Past the horizon h the
// survival is continued as S_h exp(-lambda (t - h)) with lambda the
// conditional tick rate at h, which is exact once the conditional state has
// relaxed to its slowest decaying mode.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tickbound/clock_model.hpp"
#include "tickbound/notick.hpp"
#include "tickbound/oracles.hpp"
#include "tickbound/tick_statistics.hpp"

namespace tickbound {

namespace detail {

inline void require_converged(const ConditionedEvolution& ev) {
  if (!ev.converged) {
    throw Error(ErrorKind::kNotConverged,
                "survival " + std::to_string(ev.survival_at_horizon) + " at horizon " +
                    std::to_string(ev.horizon) + " above cutoff");
  }
}

inline void require_moment_order(int k) {
  if (k < 1 || k > 4) {
    throw Error(ErrorKind::kUnsupportedMoment, "moment order " + std::to_string(k));
  }
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// \int_0^\infty (h + u)^n e^{-lambda u} du.
inline double shifted_exponential_moment(int n, double h, double lambda) {
  double sum = 0.0, fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) fact *= j;
    sum += binomial(n, j) * std::pow(h, n - j) * fact / std::pow(lambda, j + 1);
  }
  return sum;
}

inline double tail_rate_checked(const ConditionedEvolution& ev) {
  const double lambda = ev.tail_rate();
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::kNotConverged, "conditional rate vanishes at the horizon");
  }
  return lambda;
}

}  // namespace detail

/// k-th moment of the tick time from the survival, k in 1..4.
inline double moment(const ConditionedEvolution& ev, int k) {
  detail::require_moment_order(k);
  detail::require_converged(ev);
  double body = 0.0;
  for (const auto& seg : ev.segments) {
    double acc = 0.0;
    seg.for_each_node([&](double theta, double w) {
      const double t = seg.t_start + theta * seg.h;
      acc += w * std::pow(t, k - 1) * seg.survival(theta);
    });
    body += seg.h * acc;
  }
  const double lambda = detail::tail_rate_checked(ev);
  const double tail =
      ev.survival_at_horizon * detail::shifted_exponential_moment(k - 1, ev.horizon, lambda);
  return k * (body + tail);
}

/// k-th moment from \int t^k p_tick(t) dt; independent of the survival route.
inline double moment_from_pdf(const ConditionedEvolution& ev, int k) {
  detail::require_moment_order(k);
  detail::require_converged(ev);
  double body = 0.0;
  for (const auto& seg : ev.segments) {
    double acc = 0.0;
    seg.for_each_node([&](double theta, double w) {
      const double t = seg.t_start + theta * seg.h;
      acc += w * std::pow(t, k) * seg.tick_pdf(theta);
    });
    body += seg.h * acc;
  }
  const double lambda = detail::tail_rate_checked(ev);
  const double tail =
      ev.survival_at_horizon * lambda * detail::shifted_exponential_moment(k, ev.horizon, lambda);
  return body + tail;
}

inline TickStatistics tick_statistics(const ConditionedEvolution& ev, const ClockModel& model) {
  detail::require_converged(ev);
  const double t1 = moment(ev, 1);
  const double t2 = moment(ev, 2);
  TickStatistics s = make_tick_statistics(t1, t2 - t1 * t1, model.gamma());
  s.converged = true;
  s.horizon = ev.horizon;
  s.survival_at_horizon = ev.survival_at_horizon;
  s.tail_rate = ev.tail_rate();

  // Lower edge: the remaining mass leaves at the fastest possible rate.
  // Upper edge: it leaves at the slowest conditional rate seen over the
  // second half of the run.
  double body = t1 - ev.survival_at_horizon / s.tail_rate;
  double slowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev.times[i] >= 0.5 * ev.horizon) slowest = std::min(slowest, ev.conditional_rate[i]);
  }
  slowest = std::min(slowest, s.tail_rate);
  const double lo = body + ev.survival_at_horizon / model.gamma();
  const double hi = slowest > 0.0 ? body + ev.survival_at_horizon / slowest
                                  : std::numeric_limits<double>::infinity();
  s.tail_bracket = {std::min(lo, t1), std::max(hi, t1)};
  return s;
}

enum class ResetPolicy { kJumpConditioned, kFixedState };

inline const char* to_string(ResetPolicy p) {
  return p == ResetPolicy::kJumpConditioned ? "jump_conditioned" : "fixed_state";
}

struct TickSequenceStatistics {
  std::vector<TickStatistics> per_tick;
  ResetPolicy reset_policy = ResetPolicy::kJumpConditioned;
  /// Clock state right after each tick (entry n follows tick n + 1).
  std::vector<ComplexMatrix> post_tick_states;
};

/// State right after a tick, averaged over the tick time:
///   sum_j J_j rho_bar J_j^dagger / tr(...),   rho_bar = \int rho0(t) dt.
inline ComplexMatrix jump_conditioned_reset(const ClockModel& model,
                                            const ConditionedEvolution& ev) {
  detail::require_converged(ev);
  const double lambda = detail::tail_rate_checked(ev);
  ComplexMatrix rho_bar = ev.integrated_state + ev.unnormalized_states.back() / lambda;
  ComplexMatrix out = ComplexMatrix::Zero(model.dim(), model.dim());
  for (const auto& j : model.tick_jumps()) out.noalias() += j * rho_bar * j.adjoint();
  out = hermitian_part(out);
  const double tr = real_trace(out);
  if (!(tr > 0.0)) throw Error(ErrorKind::kInvalidState, "post-tick state has zero trace");
  return out / tr;
}

inline TickSequenceStatistics multi_tick_statistics(
    const ClockModel& model, int n_ticks, const IntegrationConfig& config = {},
    ResetPolicy policy = ResetPolicy::kJumpConditioned) {
  if (n_ticks < 1) throw Error(ErrorKind::kInvalidArgument, "n_ticks must be at least 1");
  TickSequenceStatistics out;
  out.reset_policy = policy;
  ClockModel current = model;
  for (int n = 1; n <= n_ticks; ++n) {
    const ConditionedEvolution ev = evolve_no_tick(current, config);
    if (!ev.converged) {
      throw Error(ErrorKind::kNotConverged,
                  "tick " + std::to_string(n) + " never happens within the horizon", n);
    }
    try {
      out.per_tick.push_back(tick_statistics(ev, current));
    } catch (const Error& e) {
      throw Error(e.kind(), "tick " + std::to_string(n) + ": " + e.what(), n);
    }
    if (n == n_ticks) break;
    if (policy == ResetPolicy::kJumpConditioned) {
      ComplexMatrix next = jump_conditioned_reset(current, ev);
      out.post_tick_states.push_back(next);
      current = current.with_initial_state(std::move(next));
    } else {
      out.post_tick_states.push_back(model.initial_state().matrix());
    }
  }
  return out;
}

struct CrossingResult {
  double t_star = 0.0;
  double t0 = 0.0;
  double early_interval_end = 0.0;
  /// Sign changes of P - P_Theta seen after t0 (exactly one when valid).
  int sign_changes = 0;
};

/// Relative slack on mu >= 1/Gamma for numerically computed means.
inline constexpr double kMeanFloorTolerance = 1e-8;

/// Survival differences below this are treated as zero by the crossing scan.
inline constexpr double kCrossingZeroBand = 1e-9;

/// Unique time t* > t0 where the clock's survival meets that of the Heaviside
/// population with the same mean, t0 = mu - 1/Gamma.
inline CrossingResult find_crossing(const ConditionedEvolution& ev, double gamma) {
  detail::require_converged(ev);
  const HeavisideOracle matched = heaviside_match(moment(ev, 1), gamma, kMeanFloorTolerance);
  CrossingResult out;
  out.t0 = matched.t0;
  auto diff = [&](double t) { return ev.survival_at(t) - heaviside_survival(matched, t); };
  auto sign_of = [](double d) { return d > kCrossingZeroBand ? 1 : (d < -kCrossingZeroBand ? -1 : 0); };

  // Early interval where no tick has happened yet.
  {
    constexpr double level = 1.0 - 1e-9;
    std::size_t k = 0;
    while (k + 1 < ev.size() && ev.survival[k + 1] >= level) ++k;
    if (k + 1 >= ev.size()) {
      out.early_interval_end = ev.horizon;
    } else {
      double lo = ev.times[k], hi = ev.times[k + 1];
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (ev.survival_at(mid) >= level ? lo : hi) = mid;
      }
      out.early_interval_end = lo;
    }
  }

  // Dense scan: grid points plus three interior points per step.
  std::vector<double> ts{out.t0};
  for (const auto& seg : ev.segments) {
    for (double f : {0.25, 0.5, 0.75, 1.0}) {
      const double t = seg.t_start + f * seg.h;
      if (t > out.t0) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  int last_sign = 0;
  double last_t = out.t0;
  std::optional<std::pair<double, double>> bracket;
  for (double t : ts) {
    const int s = sign_of(diff(t));
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      ++out.sign_changes;
      if (!bracket) bracket = {last_t, t};
    }
    last_sign = s;
    last_t = t;
  }
  if (out.sign_changes == 0) {
    throw Error(ErrorKind::kNoCrossing,
                "survival never crosses the matched Heaviside survival after t0 = " +
                    std::to_string(out.t0));
  }
  if (out.sign_changes > 1) {
    throw Error(ErrorKind::kMultipleCrossings,
                std::to_string(out.sign_changes) + " sign changes after t0 = " +
                    std::to_string(out.t0));
  }
  double lo = bracket->first, hi = bracket->second;
  const int s_lo = sign_of(diff(lo));
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double d = diff(mid);
    if ((d > 0.0 ? 1 : -1) == s_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.t_star = 0.5 * (lo + hi);
  return out;
}

}  // namespace tickbound
