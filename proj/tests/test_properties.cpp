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

// Invariants that must hold for every clock, checked on random models.

#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracle_support.hpp"

using namespace tickbound;

namespace {

const std::vector<ClockModel>& models() {
  static const std::vector<ClockModel> m = random_ensemble(2026, 60);
  return m;
}

const std::vector<ConditionedEvolution>& evolutions() {
  static const std::vector<ConditionedEvolution> ev = [] {
    std::vector<ConditionedEvolution> out;
    for (const auto& m : models()) out.push_back(evolve_no_tick(m));
    return out;
  }();
  return ev;
}

}  // namespace

TEST_CASE("accuracy never exceeds Gamma^2 / nu^2", "[properties]") {
  for (std::size_t i = 0; i < models().size(); ++i) {
    if (!evolutions()[i].converged) continue;
    const TickStatistics s = tick_statistics(evolutions()[i], models()[i]);
    INFO(models()[i].name());
    CHECK(s.bound_ratio <= 1.0 + 1e-6);
    CHECK(check_tradeoff(s).satisfied);
    CHECK(s.resolution_nu <= s.gamma * (1.0 + 1e-8));
    CHECK(s.sigma2 >= (1.0 - 1e-6) / (s.gamma * s.gamma));
  }
}

TEST_CASE("both moment routes agree", "[properties]") {
  for (std::size_t i = 0; i < models().size(); ++i) {
    const auto& ev = evolutions()[i];
    if (!ev.converged) continue;
    INFO(models()[i].name());
    for (int k = 1; k <= 2; ++k) {
      CHECK(testing::rel_diff(moment(ev, k), moment_from_pdf(ev, k)) <= 1e-6);
    }
  }
}

TEST_CASE("survival obeys the sandwich bounds and rate stays below Gamma", "[properties]") {
  for (std::size_t i = 0; i < models().size(); ++i) {
    const auto& ev = evolutions()[i];
    INFO(models()[i].name());
    CHECK(sandwich_excess(ev, models()[i].gamma()) <= 1e-8);
    for (std::size_t k = 0; k < ev.size(); ++k) {
      CHECK(ev.conditional_rate[k] <= models()[i].gamma() + 1e-8);
      CHECK(std::abs(ev.tick_pdf[k] - ev.conditional_rate[k] * ev.survival[k]) <=
            1e-8 * std::abs(ev.tick_pdf[k]) + 1e-300);
    }
  }
}

TEST_CASE("conditioned states remain density matrices", "[properties]") {
  for (std::size_t i = 0; i < models().size(); i += 3) {
    const auto& ev = evolutions()[i];
    for (double f : {0.1, 0.3, 0.6}) {
      const double t = f * ev.horizon;
      if (ev.survival_at(t) < 1e-10) continue;
      const DensityMatrix rho = normalized_state_at(ev, t);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
      CHECK(hermitian_min_eigenvalue(HermitianOperator(hermitian_part(rho.matrix()))) >= -1e-9);
    }
  }
}

TEST_CASE("each converged clock crosses its Heaviside match once", "[properties]") {
  for (std::size_t i = 0; i < models().size(); ++i) {
    const auto& ev = evolutions()[i];
    if (!ev.converged) continue;
    INFO(models()[i].name());
    const CrossingResult c = find_crossing(ev, models()[i].gamma());
    CHECK(c.sign_changes == 1);
    CHECK(c.t_star > c.t0);
  }
}

TEST_CASE("invariant suite flags a sign-flipped generator", "[properties]") {
  IntegrationConfig bug;
  bug.tick_sign = -1.0;
  bug.max_horizon = 50.0;
  const auto report = run_invariant_suite(random_ensemble(7, 8), bug, 1);
  CHECK_FALSE(report.passed());
  bool sandwich = false;
  for (const auto& v : report.violations()) sandwich = sandwich || v.check == "sandwich";
  CHECK(sandwich);
}

TEST_CASE("invariant suite passes a clean ensemble", "[properties]") {
  const auto report = run_invariant_suite(random_ensemble(11, 30));
  for (const auto& v : report.violations()) {
    UNSCOPED_INFO(v.check << " " << v.model_name << " value " << v.value << " " << v.detail);
  }
  CHECK(report.passed());
}
