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

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "oracle_support.hpp"

using namespace tickbound;
using Catch::Matchers::WithinAbs;

namespace {

IntegrationConfig mc_config() {
  IntegrationConfig c;
  c.abs_tol = 1e-8;
  c.rel_tol = 1e-6;
  return c;
}

// Pearson chi-squared p-value of the samples against a survival function,
// using equiprobable bins.
double goodness_of_fit(const std::vector<double>& w, const std::function<double(double)>& survival,
                       double t_max) {
  const int bins = 40;
  std::vector<double> edges = {0.0};
  // Bisect survival levels 1 - k/bins.
  for (int k = 1; k < bins; ++k) {
    const double level = 1.0 - double(k) / bins;
    double lo = edges.back(), hi = t_max;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (survival(mid) > level ? lo : hi) = mid;
    }
    edges.push_back(0.5 * (lo + hi));
  }
  std::vector<double> counts(bins, 0.0);
  for (double x : w) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    counts[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
  }
  const double expect = double(w.size()) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins - 1), chi2));
}

std::vector<double> first_ticks(const TrajectoryBatch& b) {
  std::vector<double> w;
  for (const auto& t : b.tick_times) {
    if (!t.empty()) w.push_back(t[0]);
  }
  return w;
}

}  // namespace

TEST_CASE("exponential clock sampling", "[trajectory]") {
  const ClockModel m = build_exponential_clock(1.0);
  const TrajectoryBatch b = sample_trajectories(m, 100000, 1, 42, mc_config());
  CHECK(b.censored_count == 0);
  const TickEstimate e = estimate_statistics(b, 1);
  CHECK(std::abs(e.mu_hat - 1.0) < 4 * e.se_mu);
  CHECK(std::abs(e.N_hat - 1.0) < 4 * e.se_N);
  CHECK(goodness_of_fit(first_ticks(b), [](double t) { return std::exp(-t); }, 50.0) > 1e-3);
}

TEST_CASE("dark state censors every trajectory", "[trajectory]") {
  const ClockModel dark = build_exponential_clock(1.0).with_initial_state(ketbra(2, 0, 0));
  IntegrationConfig cfg;
  cfg.max_horizon = 10.0;
  const TrajectoryBatch b = sample_trajectories(dark, 500, 1, 1, cfg);
  CHECK(b.censored_count == 500);
  try {
    estimate_statistics(b, 1);
    FAIL("expected AllCensored");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kAllCensored);
  }
}

TEST_CASE("estimation needs enough samples", "[trajectory]") {
  const TrajectoryBatch b = sample_trajectories(build_exponential_clock(1.0), 50, 1, 3);
  try {
    estimate_statistics(b, 1);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInsufficientSamples);
  }
  CHECK_THROWS_AS(estimate_statistics(b, 2), Error);
  CHECK_THROWS_AS(sample_trajectories(build_exponential_clock(1.0), 0, 1, 3), Error);
}

TEST_CASE("sampling is reproducible and independent of the thread count", "[trajectory]") {
  const ClockModel m = build_ladder_clock(LadderParams{});
  const auto a = sample_trajectories(m, 300, 3, 9, mc_config(), 1);
  const auto b = sample_trajectories(m, 300, 3, 9, mc_config(), 4);
  const auto c = sample_trajectories(m, 300, 3, 10, mc_config(), 1);
  CHECK(raw_tick_dump(a) == raw_tick_dump(b));
  CHECK(a.tick_times == b.tick_times);
  CHECK(raw_tick_dump(a) != raw_tick_dump(c));
  for (const auto& t : a.tick_times) {
    for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] > t[k - 1]);
  }
}

TEST_CASE("estimators on synthetic exponential samples", "[trajectory]") {
  PhiloxStream rng(77, 0);
  double prev_se = 0.0;
  for (std::size_t n : {1000u, 16000u, 256000u}) {
    std::vector<double> w(n);
    for (auto& x : w) x = rng.exponential();
    const TickEstimate e = estimate_from_samples(w);
    CHECK(std::abs(e.N_hat - 1.0) < 4 * e.se_N);
    if (prev_se > 0.0) CHECK_THAT(prev_se / e.se_N, WithinAbs(4.0, 0.6));
    prev_se = e.se_N;
  }
}

TEST_CASE("estimators on synthetic Erlang samples", "[trajectory]") {
  PhiloxStream rng(78, 0);
  // The N estimate is a ratio; check coverage of its standard error too.
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> w(2000);
    for (auto& x : w) x = rng.exponential() + rng.exponential() + rng.exponential() + rng.exponential();
    const TickEstimate e = estimate_from_samples(w);
    if (r == 0) CHECK(std::abs(e.N_hat - 4.0) < 4 * e.se_N);
    covered += std::abs(e.N_hat - 4.0) < 2 * e.se_N ? 1 : 0;
  }
  CHECK(covered >= 0.9 * reps);
}

TEST_CASE("Rabi first-tick distribution matches the oracle survival", "[trajectory]") {
  const ClockModel m = build_rabi_clock(5.0, 1.0);
  const TrajectoryBatch b = sample_trajectories(m, 20000, 1, 5, mc_config());
  const testing::ExpmOracle oracle(m);
  CHECK(goodness_of_fit(first_ticks(b), [&](double t) { return oracle.survival(t); }, 60.0) > 1e-3);
}

TEST_CASE("ladder d=2 batch agrees with the deterministic engine", "[trajectory]") {
  LadderParams p;
  p.d = 2;
  const ClockModel m = build_ladder_clock(p);
  const auto det = multi_tick_statistics(m, 2);
  const TrajectoryBatch b = sample_trajectories(m, 20000, 2, 21, mc_config());
  for (int k = 1; k <= 2; ++k) {
    const TickEstimate e = estimate_statistics(b, k);
    const TickStatistics& s = det.per_tick[static_cast<std::size_t>(k - 1)];
    INFO("tick " << k);
    CHECK(std::abs(e.mu_hat - s.mu) < 4 * e.se_mu);
    CHECK(std::abs(e.N_hat - s.accuracy_N) < 4 * e.se_N);
  }
}
