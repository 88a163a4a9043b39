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

// Quantum-jump unraveling of the clock. Between jumps the pure state follows
//   d psi/dt = -i H_eff psi,   H_eff = H - (i/2) (sum_k L_k^dag L_k + V),
// and a jump happens once ||psi||^2 falls to a uniform random level. The
// channel is picked with probability proportional to ||C psi||^2 over both
// the no-tick operators and the tick jumps; only the latter are recorded.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tickbound/clock_model.hpp"
#include "tickbound/dormand_prince.hpp"
#include "tickbound/notick.hpp"
#include "tickbound/parallel.hpp"
#include "tickbound/rng.hpp"

namespace tickbound {

struct TrajectoryBatch {
  std::uint64_t seed = 0;
  std::size_t n_traj = 0;
  int max_ticks = 1;
  /// Absolute tick times per trajectory, strictly increasing.
  std::vector<std::vector<double>> tick_times;
  /// Trajectories that hit the horizon before reaching max_ticks ticks.
  std::size_t censored_count = 0;
};

struct TickEstimate {
  int tick_index = 1;
  std::size_t n_samples = 0;
  std::size_t censored = 0;
  double mu_hat = 0.0;
  double sigma2_hat = 0.0;
  double N_hat = 0.0;
  double nu_hat = 0.0;
  double se_mu = 0.0;
  double se_sigma2 = 0.0;
  double se_N = 0.0;
  double se_nu = 0.0;
};

namespace detail {

struct JumpSystem {
  Eigen::Index dim = 0;
  ComplexMatrix h_eff;
  ComplexMatrix decay;  // sum_k C_k^dag C_k over every channel
  std::vector<ComplexMatrix> channels;
  std::size_t first_tick_channel = 0;
};

/// y = [psi / ||psi||; ln ||psi||^2].
class PureStateRhs {
 public:
  explicit PureStateRhs(const JumpSystem* sys) : sys_(sys), tmp_(sys->dim) {}

  void operator()(double, const ComplexVector& y, ComplexVector& dy) {
    const Eigen::Index d = sys_->dim;
    const auto psi = y.head(d);
    auto out = dy.head(d);
    tmp_.noalias() = sys_->h_eff * psi;
    // <psi|H_eff|psi> = <H> - (i/2) <decay>, so the decay rate costs no
    // second product.
    const double rate = -2.0 * psi.dot(tmp_).imag() / std::max(psi.squaredNorm(), 1e-300);
    out = Complex(0.0, -1.0) * tmp_ + (0.5 * rate) * psi;
    dy[d] = -rate;
  }

 private:
  const JumpSystem* sys_;
  ComplexVector tmp_;
};

inline JumpSystem make_jump_system(const ClockModel& model) {
  JumpSystem s;
  s.dim = model.dim();
  s.decay = ComplexMatrix::Zero(s.dim, s.dim);
  for (const auto& l : model.notick_lindblad_ops()) s.channels.push_back(l);
  s.first_tick_channel = s.channels.size();
  for (const auto& j : model.tick_jumps()) s.channels.push_back(j);
  for (const auto& c : s.channels) s.decay.noalias() += c.adjoint() * c;
  s.decay = hermitian_part(s.decay);
  s.h_eff = model.hamiltonian() - Complex(0.0, 0.5) * s.decay;
  return s;
}

struct InitialEnsemble {
  std::vector<double> weights;
  std::vector<ComplexVector> states;
};

inline InitialEnsemble spectral_ensemble(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  InitialEnsemble e;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()[k];
    if (w > 1e-14) {
      e.weights.push_back(w);
      e.states.push_back(es.eigenvectors().col(k));
    }
  }
  double total = 0.0;
  for (double w : e.weights) total += w;
  for (double& w : e.weights) w /= total;
  return e;
}

inline std::size_t draw_index(PhiloxStream& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  // Rounding can leave u just above the running sum.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) return k;
  }
  return 0;
}

inline std::vector<double> run_trajectory(const JumpSystem& sys, const InitialEnsemble& init,
                                          int max_ticks, double horizon, StepControl control,
                                          PhiloxStream& rng) {
  const Eigen::Index d = sys.dim;
  std::vector<double> ticks;
  DormandPrince54<PureStateRhs> stepper(PureStateRhs(&sys), d + 1, control);
  ComplexVector y(d + 1);
  y.head(d) = init.states[draw_index(rng, init.weights)];
  y[d] = 0.0;
  double t = 0.0;
  double last_tick = 0.0;
  double h_guess = 0.0;
  std::vector<double> channel_weights(sys.channels.size());
  ComplexVector psi(d);
  while (static_cast<int>(ticks.size()) < max_ticks) {
    const double target = std::log(rng.uniform_open());
    // The step size that suited the previous stretch is a good first guess.
    stepper.reset(t, y, h_guess);
    const double limit = last_tick + horizon;
    bool jumped = false;
    while (stepper.t() < limit) {
      const double t0 = stepper.t();
      const double h = stepper.step(limit);
      const DenseStep& dense = stepper.dense();
      std::array<double, 5> rr{};
      for (int i = 0; i < 5; ++i) rr[i] = dense.r[i][d].real();
      const StepPolynomial ell = DenseStep::power_basis(rr);
      if (ell(1.0) <= target) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (ell(mid) > target ? lo : hi) = mid;
        }
        const double theta = 0.5 * (lo + hi);
        t = t0 + theta * h;
        psi = dense.evaluate(theta).head(d);
        jumped = true;
        break;
      }
      y = stepper.y();
      y.head(d).normalize();
      stepper.replace_state(y);
    }
    if (!jumped) break;  // censored: no jump before the horizon
    h_guess = stepper.next_step();
    psi.normalize();
    for (std::size_t k = 0; k < sys.channels.size(); ++k) {
      channel_weights[k] = (sys.channels[k] * psi).squaredNorm();
    }
    const std::size_t k = draw_index(rng, channel_weights);
    psi = sys.channels[k] * psi;
    const double n = psi.norm();
    if (!(n > 0.0)) {
      throw Error(ErrorKind::kInvalidState, "jump to a zero vector");
    }
    y.head(d) = psi / n;
    y[d] = 0.0;
    if (k >= sys.first_tick_channel) {
      if (!ticks.empty() && !(t > ticks.back())) {
        t = std::nextafter(ticks.back(), std::numeric_limits<double>::infinity());
      }
      ticks.push_back(t);
      last_tick = t;
    }
  }
  return ticks;
}

}  // namespace detail

/// Samples n_traj independent trajectories up to max_ticks ticks each.
/// Deterministic in (model, n_traj, max_ticks, seed, config) regardless of
/// the thread count.
inline TrajectoryBatch sample_trajectories(const ClockModel& model, std::size_t n_traj,
                                           int max_ticks, std::uint64_t seed,
                                           const IntegrationConfig& config = {},
                                           unsigned threads = 0) {
  if (n_traj < 1) throw Error(ErrorKind::kInvalidArgument, "n_traj must be at least 1");
  if (max_ticks < 1) throw Error(ErrorKind::kInvalidArgument, "max_ticks must be at least 1");
  config.validate();
  const detail::JumpSystem sys = detail::make_jump_system(model);
  const detail::InitialEnsemble init = detail::spectral_ensemble(model.initial_state());
  StepControl control;
  control.abs_tol = config.abs_tol;
  control.rel_tol = config.rel_tol;
  const double horizon = config.resolved_horizon(model.gamma());
  TrajectoryBatch batch;
  batch.seed = seed;
  batch.n_traj = n_traj;
  batch.max_ticks = max_ticks;
  batch.tick_times.resize(n_traj);
  parallel_for(
      n_traj,
      [&](std::size_t i) {
        PhiloxStream rng(seed, i);
        batch.tick_times[i] = detail::run_trajectory(sys, init, max_ticks, horizon, control, rng);
      },
      threads);
  for (const auto& t : batch.tick_times) {
    if (static_cast<int>(t.size()) < max_ticks) ++batch.censored_count;
  }
  return batch;
}

/// Plug-in estimates for the waiting time before tick `tick_index` (1-based),
/// with delta-method standard errors.
inline TickEstimate estimate_from_samples(const std::vector<double>& w) {
  const double n = static_cast<double>(w.size());
  double mean = 0.0;
  for (double x : w) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : w) {
    const double e = x - mean;
    const double e2 = e * e;
    m2 += e2;
    m3 += e2 * e;
    m4 += e2 * e2;
  }
  const double s2 = m2 / (n - 1.0);
  m3 /= n;
  m4 /= n;
  TickEstimate est;
  est.n_samples = w.size();
  est.mu_hat = mean;
  est.sigma2_hat = s2;
  est.N_hat = mean * mean / s2;
  est.nu_hat = 1.0 / mean;
  const double var_mu = s2 / n;
  const double var_s2 = std::max(0.0, (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n);
  const double cov = m3 / n;
  const double dn_dmu = 2.0 * mean / s2;
  const double dn_ds2 = -mean * mean / (s2 * s2);
  const double var_n =
      dn_dmu * dn_dmu * var_mu + dn_ds2 * dn_ds2 * var_s2 + 2.0 * dn_dmu * dn_ds2 * cov;
  est.se_mu = std::sqrt(var_mu);
  est.se_sigma2 = std::sqrt(var_s2);
  est.se_N = std::sqrt(std::max(0.0, var_n));
  est.se_nu = est.se_mu / (mean * mean);
  return est;
}

inline TickEstimate estimate_statistics(const TrajectoryBatch& batch, int tick_index) {
  if (tick_index < 1 || tick_index > batch.max_ticks) {
    throw Error(ErrorKind::kInvalidArgument,
                "tick index " + std::to_string(tick_index) + " outside 1.." +
                    std::to_string(batch.max_ticks));
  }
  std::vector<double> w;
  w.reserve(batch.tick_times.size());
  const auto idx = static_cast<std::size_t>(tick_index);
  for (const auto& t : batch.tick_times) {
    if (t.size() >= idx) w.push_back(t[idx - 1] - (idx >= 2 ? t[idx - 2] : 0.0));
  }
  const std::size_t censored = batch.tick_times.size() - w.size();
  if (w.empty()) {
    throw Error(ErrorKind::kAllCensored,
                "no trajectory reached tick " + std::to_string(tick_index));
  }
  if (w.size() < 100) {
    throw Error(ErrorKind::kInsufficientSamples,
                std::to_string(w.size()) + " uncensored samples at tick " +
                    std::to_string(tick_index) + ", need 100");
  }
  TickEstimate est = estimate_from_samples(w);
  est.tick_index = tick_index;
  est.censored = censored;
  return est;
}

/// One line per trajectory, comma-separated tick times at 12 significant digits.
inline std::string raw_tick_dump(const TrajectoryBatch& batch) {
  std::string out;
  char buf[32];
  for (const auto& t : batch.tick_times) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k) out += ',';
      std::snprintf(buf, sizeof buf, "%.12g", t[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace tickbound
