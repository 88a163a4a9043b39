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

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracle_support.hpp"

using namespace tickbound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Moments of the Heaviside pdf by adaptive quadrature over (t0, inf).
std::pair<double, double> heaviside_quadrature_moments(const HeavisideOracle& o) {
  boost::math::quadrature::exp_sinh<double> q;
  auto f1 = [&](double t) { return t * heaviside_pdf(o, t); };
  auto f2 = [&](double t) { return t * t * heaviside_pdf(o, t); };
  const double inf = std::numeric_limits<double>::infinity();
  return {q.integrate(f1, o.t0, inf), q.integrate(f2, o.t0, inf)};
}

}  // namespace

TEST_CASE("Heaviside survival and pdf examples", "[oracles]") {
  const HeavisideOracle o{1.0, 3.5};
  CHECK(heaviside_survival(o, 2.0) == 1.0);
  CHECK(heaviside_survival(o, 3.5) == 1.0);
  CHECK_THAT(heaviside_survival(o, 4.5), WithinRel(std::exp(-1.0), 1e-15));
  CHECK(heaviside_pdf(o, 3.0) == 0.0);
  CHECK_THAT(heaviside_pdf(o, 4.5), WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THROWS_AS(heaviside_survival(o, -1.0), Error);
}

TEST_CASE("Heaviside statistics examples", "[oracles]") {
  const TickStatistics a = heaviside_statistics({1.0, 0.0});
  CHECK(a.accuracy_N == 1.0);
  CHECK(a.resolution_nu == 1.0);
  const TickStatistics b = heaviside_statistics({1.0, 3.5});
  CHECK_THAT(b.accuracy_N, WithinRel(20.25, 1e-15));
  CHECK_THAT(b.resolution_nu, WithinRel(1.0 / 4.5, 1e-15));
  CHECK_THAT(b.mu, WithinRel(4.5, 1e-15));
  const TickStatistics c = heaviside_statistics({2.0, 1.0});
  CHECK_THAT(c.accuracy_N, WithinRel(9.0, 1e-15));
  CHECK_THAT(c.resolution_nu, WithinRel(2.0 / 3.0, 1e-15));
  CHECK_THAT(c.accuracy_N * c.resolution_nu * c.resolution_nu, WithinRel(4.0, 1e-15));
  CHECK_THROWS_AS(heaviside_statistics({0.0, 1.0}), Error);
  CHECK_THROWS_AS(heaviside_statistics({1.0, -1.0}), Error);
}

TEST_CASE("Heaviside closed form matches quadrature of its pdf", "[oracles]") {
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (int t0 = 0; t0 <= 10; ++t0) {
      const HeavisideOracle o{gamma, double(t0)};
      const auto [m1, m2] = heaviside_quadrature_moments(o);
      const double var = m2 - m1 * m1;
      const TickStatistics s = heaviside_statistics(o);
      INFO("gamma " << gamma << " t0 " << t0);
      CHECK_THAT(m1 * m1 / var, WithinRel(s.accuracy_N, 1e-8));
      CHECK_THAT(1.0 / m1, WithinRel(s.resolution_nu, 1e-8));
      CHECK_THAT(s.accuracy_N * s.resolution_nu * s.resolution_nu, WithinRel(gamma * gamma, 4e-16));
    }
  }
}

TEST_CASE("Erlang statistics examples", "[oracles]") {
  const TickStatistics a = erlang_statistics({1.0, 1});
  CHECK(a.accuracy_N == 1.0);
  CHECK(a.resolution_nu == 1.0);
  const TickStatistics b = erlang_statistics({1.0, 4});
  CHECK(b.accuracy_N == 4.0);
  CHECK(b.resolution_nu == 0.25);
  const TickStatistics c = erlang_statistics({1.0, 64});
  CHECK(c.accuracy_N == 64.0);
  CHECK(check_tradeoff(c).classical_ratio == 1.0);
  CHECK_THAT(c.bound_ratio, WithinRel(1.0 / 64, 1e-15));
  CHECK_THROWS_AS(erlang_statistics({1.0, 0}), Error);
}

TEST_CASE("Erlang survival integrates to its closed-form moments", "[oracles]") {
  boost::math::quadrature::exp_sinh<double> q;
  for (int m : {1, 2, 5, 17}) {
    const ErlangOracle o{1.3, m};
    const double m1 = q.integrate([&](double t) { return erlang_survival(o, t); }, 0.0,
                                  std::numeric_limits<double>::infinity());
    const double m2 = q.integrate([&](double t) { return 2 * t * erlang_survival(o, t); }, 0.0,
                                  std::numeric_limits<double>::infinity());
    const TickStatistics s = erlang_statistics(o);
    CHECK_THAT(m1, WithinRel(s.mu, 1e-10));
    CHECK_THAT(m2 - m1 * m1, WithinRel(s.sigma2, 1e-9));
  }
}

TEST_CASE("cascade clock reproduces the Erlang survival", "[oracles]") {
  for (int m : {1, 2, 4, 8}) {
    const ClockModel c = build_cascade_clock(1.0, m);
    const ConditionedEvolution ev = evolve_no_tick(c);
    REQUIRE(ev.converged);
    double worst = 0.0;
    for (double t = 0.0; t < 30.0; t += 0.25) {
      worst = std::max(worst, std::abs(ev.survival_at(t) - erlang_survival({1.0, m}, t)));
    }
    CHECK(worst < 1e-8);
    const TickStatistics s = tick_statistics(ev, c);
    CHECK_THAT(s.accuracy_N, WithinRel(double(m), 1e-7));
    CHECK_THAT(check_tradeoff(s).classical_ratio, WithinRel(1.0, 1e-7));
  }
}

TEST_CASE("Heaviside match examples", "[oracles]") {
  CHECK(heaviside_match(1.0, 1.0).t0 == 0.0);
  CHECK_THAT(heaviside_match(4.5, 1.0).t0, WithinRel(3.5, 1e-15));
  try {
    heaviside_match(0.5, 1.0);
    FAIL("expected MuBelowFloor");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMuBelowFloor);
  }
}
