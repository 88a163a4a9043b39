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

// Prints accuracy, resolution and the trade-off ratio for a few clocks, then
// cross-checks the ladder clock against quantum-jump trajectories.

#include <cstdio>

#include "tickbound/tickbound.hpp"

using namespace tickbound;

namespace {

void row(const char* name, const TickStatistics& s) {
  const TradeoffCheck c = check_tradeoff(s);
  std::printf("%-22s N = %9.4f  nu = %8.5f  Gamma = %6.3f  N nu^2/Gamma^2 = %.6f  %s\n", name,
              s.accuracy_N, s.resolution_nu, s.gamma, c.ratio, c.satisfied ? "ok" : "VIOLATED");
}

}  // namespace

int main() {
  const ClockModel exponential = build_exponential_clock(1.0);
  row("exponential", tick_statistics(evolve_no_tick(exponential), exponential));

  const ClockModel rabi = build_rabi_clock(5.0, 1.0);
  row("rabi (omega = 5)", tick_statistics(evolve_no_tick(rabi), rabi));

  row("erlang (m = 4)", erlang_statistics({1.0, 4}));
  row("heaviside (t0 = 3.5)", heaviside_statistics({1.0, 3.5}));

  for (int d = 2; d <= 6; ++d) {
    LadderParams p;
    p.d = d;
    p.g = 0.2;
    p.gamma_tick = 0.2;
    const ClockModel ladder = build_ladder_clock(p);
    char name[32];
    std::snprintf(name, sizeof name, "ladder (d = %d)", d);
    row(name, tick_statistics(evolve_no_tick(ladder), ladder));
  }

  const ClockModel ladder = build_ladder_clock(LadderParams{});
  const TickStatistics det = tick_statistics(evolve_no_tick(ladder), ladder);
  IntegrationConfig mc;
  mc.rel_tol = 1e-6;
  mc.abs_tol = 1e-8;
  const TickEstimate est = estimate_statistics(sample_trajectories(ladder, 20000, 1, 1, mc), 1);
  std::printf("\nladder d = 3, 20000 trajectories: mu %.4f +- %.4f (engine %.4f), "
              "N %.4f +- %.4f (engine %.4f)\n",
              est.mu_hat, est.se_mu, det.mu, est.N_hat, est.se_N, det.accuracy_N);
  return 0;
}
