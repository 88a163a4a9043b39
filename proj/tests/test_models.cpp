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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracle_support.hpp"

using namespace tickbound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("exponential builder", "[models]") {
  const ClockModel one = build_exponential_clock(1.0);
  CHECK_THAT(tick_statistics(evolve_no_tick(one), one).accuracy_N, WithinRel(1.0, 1e-8));
  CHECK_THAT(build_exponential_clock(2.0).gamma(), WithinRel(2.0, 1e-15));
  for (double r : evolve_no_tick(one).conditional_rate) CHECK_THAT(r, WithinAbs(1.0, 1e-8));
  CHECK_THROWS_AS(build_exponential_clock(0.0), Error);
}

TEST_CASE("Rabi and cascade builders", "[models]") {
  const ClockModel r = build_rabi_clock(5.0, 1.0);
  CHECK(r.dim() == 2);
  CHECK((r.initial_state().matrix() - ketbra(2, 0, 0)).norm() == 0.0);
  CHECK_THAT(r.hamiltonian()(0, 1).real(), WithinAbs(2.5, 1e-15));
  const ClockModel c = build_cascade_clock(1.0, 3);
  CHECK(c.dim() == 4);
  CHECK(c.notick_lindblad_ops().size() == 2);
  CHECK_THROWS_AS(build_cascade_clock(1.0, 0), Error);
}

TEST_CASE("thermal occupation", "[models]") {
  CHECK(thermal_occupation(std::numeric_limits<double>::infinity(), 1.0) == 0.0);
  CHECK_THAT(thermal_occupation(1.0, 1.0), WithinRel(1.0 / (std::exp(1.0) - 1.0), 1e-14));
  CHECK(std::isfinite(thermal_occupation(1e6, 5.0)));
  CHECK(thermal_occupation(1e6, 5.0) == 0.0);
}

TEST_CASE("ladder structure", "[models]") {
  for (int d = 2; d <= 6; ++d) {
    LadderParams p;
    p.d = d;
    const ClockModel m = build_ladder_clock(p);
    CHECK(m.dim() == 4 * d);
    CHECK_THAT(m.gamma(), WithinRel(p.gamma_tick, 1e-14));
    REQUIRE(m.tick_jumps().size() == 1);
    // Tick operator is Gamma on the top ladder level only.
    const ComplexMatrix& v = m.tick_operator().matrix();
    CHECK_THAT(v.trace().real(), WithinRel(4.0 * p.gamma_tick, 1e-14));
    // Initial state: qubits thermal, ladder in its ground state.
    CHECK_THAT(m.initial_state().trace(), WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("ladder dissipators obey detailed balance", "[models]") {
  LadderParams p;
  const ClockModel m = build_ladder_clock(p);
  // Ratio of down to up rates for each bath is exp(beta omega).
  const auto& ops = m.notick_lindblad_ops();
  REQUIRE(ops.size() == 4);
  const double n_c = thermal_occupation(p.beta_c, p.omega_c);
  const double n_h = thermal_occupation(p.beta_h, p.omega_h);
  const double up_c = ops[0].squaredNorm(), down_c = ops[1].squaredNorm();
  const double up_h = ops[2].squaredNorm(), down_h = ops[3].squaredNorm();
  CHECK_THAT(up_c / down_c, WithinRel(n_c / (n_c + 1.0), 1e-12));
  CHECK_THAT(up_h / down_h, WithinRel(n_h / (n_h + 1.0), 1e-12));
}

TEST_CASE("zero-temperature cold bath has no excitation", "[models]") {
  LadderParams p;
  p.beta_c = std::numeric_limits<double>::infinity();
  const ClockModel m = build_ladder_clock(p);
  CHECK(m.notick_lindblad_ops()[0].norm() == 0.0);
  const ConditionedEvolution ev = evolve_no_tick(m);
  CHECK(ev.converged);
}

TEST_CASE("ladder validation and warnings", "[models]") {
  LadderParams p;
  p.d = 1;
  CHECK_THROWS_AS(build_ladder_clock(p), Error);
  p = {};
  p.beta_h = 20.0;
  CHECK_THROWS_AS(build_ladder_clock(p), Error);
  p = {};
  p.beta_c = 0.0;
  CHECK_THROWS_AS(build_ladder_clock(p), Error);
  p = {};
  p.omega_l = 1.5;
  Warnings w;
  build_ladder_clock(p, &w);
  CHECK_FALSE(w.empty());
  Warnings none;
  build_ladder_clock(LadderParams{}, &none);
  CHECK(none.empty());
}

TEST_CASE("weak-coupling ladder of the two-level example", "[models]") {
  LadderParams p;
  p.d = 2;
  p.g = 0.01;
  p.beta_h = 0.1;
  p.gamma_tick = 0.005;
  const ClockModel m = build_ladder_clock(p);
  IntegrationConfig cfg;
  cfg.method = EngineMethod::kPropagator;
  const ConditionedEvolution ev = evolve_no_tick(m, cfg);
  REQUIRE(ev.converged);
  const TickStatistics s = tick_statistics(ev, m);
  CHECK(s.accuracy_N > 1.0);
  const auto t = testing::resolvent_moments(m, 2);
  CHECK_THAT(s.accuracy_N, WithinRel(t[0] * t[0] / (t[1] - t[0] * t[0]), 1e-6));
}

TEST_CASE("random clocks are deterministic and well formed", "[models]") {
  const ClockModel a = build_random_clock(1), b = build_random_clock(1), c = build_random_clock(2);
  CHECK(models_equal(a, b));
  CHECK_FALSE(models_equal(a, c));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ClockModel m = build_random_clock(seed);
    CHECK(m.dim() >= 2);
    CHECK(m.dim() <= 6);
    CHECK(hermitian_min_eigenvalue(m.tick_operator()) >= -1e-12);
    CHECK_THAT(m.gamma(), WithinRel(1.0, 1e-12));
  }
  RandomClockOptions opt;
  opt.dim_range = {3, 3};
  CHECK(build_random_clock(5, opt).dim() == 3);
  opt.dim_range = {4, 2};
  CHECK_THROWS_AS(build_random_clock(5, opt), Error);
}

TEST_CASE("most random clocks converge within the default horizon", "[models]") {
  int converged = 0;
  const auto models = random_ensemble(7, 200);
  for (const auto& m : models) converged += evolve_no_tick(m).converged ? 1 : 0;
  CHECK(converged >= 180);
}
