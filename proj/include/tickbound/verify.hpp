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

// Invariant suite run over a model ensemble.
//
//   tradeoff          N nu^2 / Gamma^2 <= 1 + 1e-6
//   resolution        nu <= Gamma (1 + 1e-8)
//   variance_floor    sigma^2 >= (1 - 1e-6) / Gamma^2
//   moment_identity   survival and density routes agree, t1 and t2, 1e-6
//   sandwich          S_k e^{-Gamma dt} <= S_{k+1} <= S_k on the grid, 1e-8
//   rate_bound        conditional rate <= Gamma + 1e-8, pdf = rate * S
//   heaviside_match   t0 = mu - 1/Gamma >= 0
//   crossing          exactly one crossing after t0 unless the survival is
//                     already Heaviside-shaped

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tickbound/models.hpp"
#include "tickbound/notick.hpp"
#include "tickbound/parallel.hpp"
#include "tickbound/stats.hpp"

namespace tickbound {

inline const std::vector<std::string>& invariant_names() {
  static const std::vector<std::string> names = {
      "tradeoff", "resolution",      "variance_floor", "moment_identity",
      "sandwich", "rate_bound",      "heaviside_match", "crossing"};
  return names;
}

struct InvariantViolation {
  std::string check;
  std::size_t model_index = 0;
  std::string model_name;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct ModelCheck {
  std::string name;
  bool converged = false;
  TickStatistics stats;
  /// Relative disagreement of the two moment routes, max over k = 1, 2.
  double moment_gap = 0.0;
  /// Worst excess over the sandwich bounds on the grid.
  double sandwich_excess = 0.0;
  int crossings = -1;
  std::vector<InvariantViolation> violations;
};

struct InvariantReport {
  std::vector<ModelCheck> models;
  std::size_t converged = 0;
  bool passed() const {
    for (const auto& m : models) {
      if (!m.violations.empty()) return false;
    }
    return true;
  }
  std::vector<InvariantViolation> violations() const {
    std::vector<InvariantViolation> out;
    for (const auto& m : models) out.insert(out.end(), m.violations.begin(), m.violations.end());
    return out;
  }
};

/// Largest |P[t <= T] - P_Theta[t <= T]| over the grid and step midpoints.
inline double heaviside_deviation(const ConditionedEvolution& ev, const HeavisideOracle& o) {
  double worst = 0.0;
  for (const auto& seg : ev.segments) {
    for (double f : {0.0, 0.5, 1.0}) {
      const double t = seg.t_start + f * seg.h;
      worst = std::max(worst, std::abs(ev.survival_at(t) - heaviside_survival(o, t)));
    }
  }
  return worst;
}

/// Worst violation of S_k e^{-Gamma dt} <= S_{k+1} <= S_k (positive = broken).
inline double sandwich_excess(const ConditionedEvolution& ev, double gamma) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
    const double lower = ev.survival[k] * std::exp(-gamma * (ev.times[k + 1] - ev.times[k]));
    const double s = ev.survival[k + 1];
    double excess = std::max(lower - s, s - ev.survival[k]);
    if (!std::isfinite(s)) excess = std::numeric_limits<double>::infinity();
    worst = std::max(worst, excess);
  }
  return worst;
}

inline ModelCheck check_model(const ClockModel& model, std::size_t index,
                              const IntegrationConfig& config) {
  ModelCheck out;
  out.name = model.name();
  auto fail = [&](const char* check, double value, double limit, std::string detail = {}) {
    out.violations.push_back({check, index, model.name(), value, limit, std::move(detail)});
  };
  const double gamma = model.gamma();
  ConditionedEvolution ev;
  try {
    ev = evolve_no_tick(model, config);
  } catch (const Error& e) {
    fail("sandwich", std::numeric_limits<double>::infinity(), 1e-8, e.what());
    return out;
  }
  out.sandwich_excess = sandwich_excess(ev, gamma);
  if (!(out.sandwich_excess <= 1e-8)) fail("sandwich", out.sandwich_excess, 1e-8);
  double rate_excess = 0.0, pdf_gap = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    rate_excess = std::max(rate_excess, ev.conditional_rate[k] - gamma);
    const double expect = ev.conditional_rate[k] * ev.survival[k];
    pdf_gap = std::max(pdf_gap, std::abs(ev.tick_pdf[k] - expect) /
                                    std::max(std::abs(expect), 1e-300));
  }
  if (!(rate_excess <= 1e-8)) fail("rate_bound", rate_excess + gamma, gamma + 1e-8);
  if (!(pdf_gap <= 1e-8)) fail("rate_bound", pdf_gap, 1e-8, "tick_pdf != rate * survival");

  out.converged = ev.converged;
  if (!ev.converged) return out;
  try {
    out.stats = tick_statistics(ev, model);
    for (int k = 1; k <= 2; ++k) {
      const double a = moment(ev, k), b = moment_from_pdf(ev, k);
      out.moment_gap = std::max(out.moment_gap, std::abs(a - b) / std::abs(b));
    }
  } catch (const Error& e) {
    fail("moment_identity", std::numeric_limits<double>::infinity(), 1e-6, e.what());
    return out;
  }
  const TickStatistics& s = out.stats;
  if (!(s.bound_ratio <= 1.0 + 1e-6)) fail("tradeoff", s.bound_ratio, 1.0 + 1e-6);
  if (!(s.resolution_nu <= gamma * (1.0 + 1e-8))) {
    fail("resolution", s.resolution_nu, gamma * (1.0 + 1e-8));
  }
  const double floor = (1.0 - 1e-6) / (gamma * gamma);
  if (!(s.sigma2 >= floor)) fail("variance_floor", s.sigma2, floor);
  if (!(out.moment_gap <= 1e-6)) fail("moment_identity", out.moment_gap, 1e-6);

  HeavisideOracle matched;
  try {
    matched = heaviside_match(s.mu, gamma, kMeanFloorTolerance);
  } catch (const Error& e) {
    fail("heaviside_match", s.mu, 1.0 / gamma, e.what());
    return out;
  }
  try {
    out.crossings = find_crossing(ev, gamma).sign_changes;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kNoCrossing) {
      out.crossings = 0;
      const double dev = heaviside_deviation(ev, matched);
      if (dev > kCrossingZeroBand) fail("crossing", 0, 1, "no crossing although models differ");
    } else if (e.kind() == ErrorKind::kMultipleCrossings) {
      out.crossings = 2;
      fail("crossing", 2, 1, e.what());
    } else {
      fail("crossing", -1, 1, e.what());
    }
  }
  return out;
}

inline InvariantReport run_invariant_suite(const std::vector<ClockModel>& models,
                                           const IntegrationConfig& config = {},
                                           unsigned threads = 0) {
  InvariantReport report;
  report.models.resize(models.size());
  parallel_for(
      models.size(), [&](std::size_t i) { report.models[i] = check_model(models[i], i, config); },
      threads);
  for (const auto& m : report.models) report.converged += m.converged ? 1 : 0;
  return report;
}

/// Seed of the i-th model in an ensemble.
inline std::uint64_t ensemble_seed(std::uint64_t seed, std::size_t i) {
  return seed * 0x9E3779B97F4A7C15ULL + i;
}

inline std::vector<ClockModel> random_ensemble(std::uint64_t seed, std::size_t n,
                                               const RandomClockOptions& opt = {}) {
  std::vector<ClockModel> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(build_random_clock(ensemble_seed(seed, i), opt));
  return out;
}

}  // namespace tickbound
