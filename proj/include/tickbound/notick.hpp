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

// No-tick conditioned evolution
//   d rho0/dt = L_notick[rho0] - 1/2 {V, rho0}
// and the waiting-time quantities it determines: survival tr(rho0), tick
// density tr(V rho0) and conditional rate tr(V rho0)/tr(rho0).
//
// The engine integrates the trace-normalized state rho_n = rho0 / tr(rho0)
// together with l = ln tr(rho0):
//   d rho_n/dt = F(rho_n) - tr F(rho_n) rho_n,    dl/dt = tr F(rho_n),
// where F is the linear generator above. This is the same ODE, but the
// relative accuracy stays uniform while the survival decays by many decades.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tickbound/clock_model.hpp"
#include "tickbound/core.hpp"
#include "tickbound/dormand_prince.hpp"
#include "tickbound/matrix_exponential.hpp"
#include "tickbound/quadrature.hpp"

namespace tickbound {

enum class EngineMethod {
  /// Adaptive Dormand-Prince 5(4) with dense output (default).
  kDormandPrince,
  /// Exact stepping with exp(L h) of the vectorized generator, h adapted on a
  /// power-of-two ladder. For timescale-separated models where the explicit
  /// pair is stability-limited; costs O(dim^6) per cached step size.
  kPropagator,
};

struct IntegrationConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double survival_cutoff = 1e-9;
  /// Defaults to 1e4 / Gamma when unset.
  std::optional<double> max_horizon;
  /// Extra grid points produced by dense output.
  std::vector<double> sample_times;
  EngineMethod method = EngineMethod::kDormandPrince;
  /// Accepted-step budget. Exhausting it raises StepUnderflow: the explicit
  /// pair is stability-limited and the propagator method is the remedy.
  std::size_t max_steps = 1000000;
  /// Sign of the tick anticommutator. Anything but +1 is a deliberate
  /// mutation used to check that the invariant suite can fail.
  double tick_sign = 1.0;

  double resolved_horizon(double gamma) const {
    if (max_horizon) return *max_horizon;
    return 1e4 / gamma;
  }

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "integrator tolerances must be positive");
    }
    if (!(survival_cutoff > 0.0) || survival_cutoff >= 1.0) {
      throw Error(ErrorKind::kInvalidArgument, "survival cutoff must lie in (0, 1)");
    }
    if (max_steps == 0) throw Error(ErrorKind::kInvalidArgument, "max_steps must be positive");
    if (max_horizon && !(*max_horizon > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "max horizon must be positive");
    }
  }
};

namespace detail {

/// Generator data shared between an evolution and later dense-output queries.
/// Immutable once the evolution is returned.
struct NoTickSystem {
  Eigen::Index dim = 0;
  ComplexMatrix h_eff;
  ComplexMatrix h_eff_adj;
  std::vector<ComplexMatrix> dissipators;
  std::vector<ComplexMatrix> dissipators_adj;
  ComplexMatrix tick_operator;
  ComplexMatrix tick_operator_t;
  double tick_sign = 1.0;
  EngineMethod method = EngineMethod::kDormandPrince;
  StepControl control;
  std::size_t max_steps = 0;

  // Propagator mode only.
  ComplexMatrix superoperator;
  double base_step = 0.0;
  mutable std::map<int, ComplexMatrix> propagators;

  /// tr(V X).
  double tick_trace(const ComplexMatrix& x) const {
    return tick_operator_t.cwiseProduct(x).sum().real();
  }

  /// exp(L * base_step * 2^j).
  const ComplexMatrix& propagator(int j) const {
    auto it = propagators.find(j);
    if (it == propagators.end()) {
      it = propagators
               .emplace(j, matrix_exponential(superoperator * std::ldexp(base_step, j)))
               .first;
    }
    return it->second;
  }
};

inline std::shared_ptr<NoTickSystem> make_system(const ClockModel& model,
                                                 const IntegrationConfig& config) {
  auto sys = std::make_shared<NoTickSystem>();
  const Eigen::Index d = model.dim();
  sys->dim = d;
  sys->tick_sign = config.tick_sign;
  sys->method = config.method;
  sys->max_steps = config.max_steps;
  sys->control.abs_tol = config.abs_tol;
  sys->control.rel_tol = config.rel_tol;
  ComplexMatrix decay = ComplexMatrix::Zero(d, d);
  for (const auto& l : model.notick_lindblad_ops()) {
    sys->dissipators.push_back(l);
    sys->dissipators_adj.push_back(l.adjoint());
    decay.noalias() += l.adjoint() * l;
  }
  sys->tick_operator = model.tick_operator().matrix();
  sys->tick_operator_t = sys->tick_operator.transpose();
  decay += config.tick_sign * sys->tick_operator;
  sys->h_eff = model.hamiltonian() - Complex(0.0, 0.5) * decay;
  sys->h_eff_adj = sys->h_eff.adjoint();
  if (config.method == EngineMethod::kPropagator) {
    sys->superoperator = vectorize_superoperator(model.hamiltonian(), model.notick_lindblad_ops(),
                                                 model.tick_operator(), config.tick_sign);
    const double norm1 = sys->superoperator.cwiseAbs().colwise().sum().maxCoeff();
    sys->base_step = norm1 > 0.0 ? 1e-3 / norm1 : 1e-3;
  }
  return sys;
}

/// Right-hand side for y = [vec(rho_n); ln tr rho0].
class NormalizedRhs {
 public:
  explicit NormalizedRhs(const NoTickSystem* sys)
      : sys_(sys), tmp_(sys->dim, sys->dim) {}

  void operator()(double /*t*/, const ComplexVector& y, ComplexVector& dy) {
    const Eigen::Index d = sys_->dim;
    const Eigen::Map<const ComplexMatrix> rho(y.data(), d, d);
    Eigen::Map<ComplexMatrix> out(dy.data(), d, d);
    const Complex i(0.0, 1.0);
    out.noalias() = sys_->h_eff * rho;
    out *= -i;
    tmp_.noalias() = rho * sys_->h_eff_adj;
    out += i * tmp_;
    for (std::size_t k = 0; k < sys_->dissipators.size(); ++k) {
      tmp_.noalias() = sys_->dissipators[k] * rho;
      out.noalias() += tmp_ * sys_->dissipators_adj[k];
    }
    const Complex tr_f = out.trace();
    out -= tr_f * rho;
    dy[d * d] = Complex(tr_f.real(), 0.0);
  }

 private:
  const NoTickSystem* sys_;
  ComplexMatrix tmp_;
};

}  // namespace detail

/// One integrator step [t_start, t_start + h]. Survival and tick density are
/// recovered from the per-step polynomials in theta = (t - t_start) / h:
///   log form:   S = exp(first),               pdf = second * S
///   linear form: S = exp(log_scale) * first,   pdf = exp(log_scale) * second
struct EvolutionSegment {
  double t_start = 0.0;
  double h = 0.0;
  StepPolynomial first;
  StepPolynomial second;
  bool log_form = true;
  double log_scale = 0.0;
  /// Propagator ladder level (h = base_step * 2^level).
  int level = 0;
  /// Grid index of the state at t_start.
  std::size_t grid_index = 0;

  double survival(double theta) const {
    return log_form ? std::exp(first(theta)) : std::exp(log_scale) * first(theta);
  }
  double tick_pdf(double theta) const {
    return log_form ? second(theta) * std::exp(first(theta))
                    : std::exp(log_scale) * second(theta);
  }

  /// Number of equal sub-intervals for Gauss-Legendre quadrature over this
  /// step, chosen so survival drops by at most e^{-1/2} across each one.
  int quadrature_pieces() const {
    double drop = 0.0;
    if (log_form) {
      drop = std::abs(first(1.0) - first(0.0));
    } else {
      const double a = first(0.0), b = first(1.0);
      drop = (a > 0.0 && b > 0.0) ? std::abs(std::log(a / b)) : 0.0;
    }
    if (!std::isfinite(drop)) return 64;
    return std::clamp(static_cast<int>(std::ceil(2.0 * drop)), 1, 64);
  }

  /// Calls f(theta, weight) for a quadrature rule on [0, 1]; weights sum to 1.
  template <class F>
  void for_each_node(F&& f) const {
    const int pieces = quadrature_pieces();
    for (int j = 0; j < pieces; ++j) {
      for (std::size_t q = 0; q < GaussLegendre8::nodes.size(); ++q) {
        f((j + GaussLegendre8::nodes[q]) / pieces, GaussLegendre8::weights[q] / pieces);
      }
    }
  }
};

/// Result of a no-tick integration. Grid arrays are aligned: entry k refers
/// to times[k]. The grid holds every accepted step plus requested samples.
struct ConditionedEvolution {
  std::vector<double> times;
  std::vector<ComplexMatrix> unnormalized_states;
  std::vector<double> log_survival;
  std::vector<double> survival;
  std::vector<double> tick_pdf;
  std::vector<double> conditional_rate;
  bool converged = false;
  double horizon = 0.0;
  double survival_at_horizon = 1.0;
  /// Gamma of the model that produced this evolution.
  double gamma = 0.0;
  IntegrationConfig config;
  std::vector<EvolutionSegment> segments;
  /// Integral of rho0(t) over [0, horizon].
  ComplexMatrix integrated_state;
  std::shared_ptr<const detail::NoTickSystem> system;

  std::size_t size() const noexcept { return times.size(); }

  /// Segment containing t (the last one for t == horizon).
  std::size_t segment_index(double t) const {
    if (segments.empty()) {
      throw Error(ErrorKind::kTimeOutOfRange, "evolution has no steps");
    }
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const EvolutionSegment& s) { return v < s.t_start; });
    if (it == segments.begin()) return 0;
    return static_cast<std::size_t>(std::distance(segments.begin(), it)) - 1;
  }

  double theta_of(const EvolutionSegment& s, double t) const {
    return std::clamp((t - s.t_start) / s.h, 0.0, 1.0);
  }

  /// Dense survival P[t <= T].
  double survival_at(double t) const {
    const auto& s = segments[segment_index(t)];
    return s.survival(theta_of(s, t));
  }

  double tick_pdf_at(double t) const {
    const auto& s = segments[segment_index(t)];
    return s.tick_pdf(theta_of(s, t));
  }

  /// Conditional rate at the horizon, used for the exponential tail.
  double tail_rate() const { return conditional_rate.empty() ? 0.0 : conditional_rate.back(); }
};

namespace detail {

struct SegmentState {
  ComplexMatrix normalized;
  double log_survival = 0.0;
};

inline ComplexMatrix normalize_state(const ComplexMatrix& rho) {
  ComplexMatrix h = hermitian_part(rho);
  const double tr = real_trace(h);
  return h / tr;
}

inline SegmentState evaluate_dense(const NoTickSystem& sys, const EvolutionSegment& seg,
                                   const DenseStep& dense, double theta) {
  const Eigen::Index d = sys.dim;
  ComplexVector y = dense.evaluate(theta);
  SegmentState out;
  const ComplexMatrix m = Eigen::Map<const ComplexMatrix>(y.data(), d, d);
  if (seg.log_form) {
    out.normalized = normalize_state(m);
    out.log_survival = y[d * d].real();
  } else {
    const double tr = real_trace(m);
    out.normalized = normalize_state(m);
    out.log_survival = seg.log_scale + std::log(tr);
  }
  return out;
}

inline ComplexVector pack_state(const ComplexMatrix& normalized, double log_survival) {
  const Eigen::Index n = normalized.size();
  ComplexVector y(n + 1);
  y.head(n) = Eigen::Map<const ComplexVector>(normalized.data(), n);
  y[n] = log_survival;
  return y;
}

/// Quartic through y(0), y(1/2), y(1) with end slopes d0 = h y'(0), d1 = h y'(1),
/// in Hairer's dense form.
inline DenseStep quartic_dense(const ComplexVector& y0, const ComplexVector& ym,
                               const ComplexVector& y1, const ComplexVector& d0,
                               const ComplexVector& d1) {
  const ComplexVector a = y1 - y0 - d0;
  const ComplexVector b = d1 - d0;
  const ComplexVector c = 16.0 * (ym - y0 - 0.5 * d0);
  const ComplexVector c4 = c - 8.0 * a + 2.0 * b;
  const ComplexVector c3 = b - 2.0 * a - 2.0 * c4;
  const ComplexVector c2 = a - c3 - c4;
  DenseStep out;
  out.r[0] = y0;
  out.r[4] = c4;
  out.r[3] = -c3 - 2.0 * c4;
  out.r[2] = out.r[3] + out.r[4] - c2;
  out.r[1] = d0 - out.r[2];
  return out;
}

/// Rebuilds the dense output of one segment from the stored grid state.
inline DenseStep recover_dense(const ConditionedEvolution& ev, const EvolutionSegment& seg) {
  const NoTickSystem& sys = *ev.system;
  const Eigen::Index d = sys.dim;
  const ComplexMatrix normalized = normalize_state(ev.unnormalized_states[seg.grid_index]);
  if (seg.log_form) {
    DormandPrince54<NormalizedRhs> stepper(NormalizedRhs(&sys), d * d + 1, sys.control);
    DenseStep dense;
    stepper.dense_step_from(seg.t_start, pack_state(normalized, ev.log_survival[seg.grid_index]),
                            seg.h, dense);
    return dense;
  }
  const ComplexVector y0 = vec(normalized);
  const ComplexMatrix& half = sys.propagator(seg.level - 1);
  const ComplexVector ym = half * y0;
  const ComplexVector y1 = half * ym;
  const ComplexVector d0 = seg.h * (sys.superoperator * y0);
  const ComplexVector d1 = seg.h * (sys.superoperator * y1);
  return quartic_dense(y0, ym, y1, d0, d1);
}

class EvolutionBuilder {
 public:
  EvolutionBuilder(ConditionedEvolution& ev, const NoTickSystem& sys) : ev_(ev), sys_(sys) {}

  void record(double t, const ComplexMatrix& normalized, double log_survival) {
    const double scale = std::exp(log_survival);
    ComplexMatrix unnormalized = scale * normalized;
    const double surv = real_trace(unnormalized);
    ev_.times.push_back(t);
    ev_.log_survival.push_back(log_survival);
    ev_.survival.push_back(surv);
    ev_.tick_pdf.push_back(sys_.tick_trace(unnormalized));
    ev_.conditional_rate.push_back(sys_.tick_trace(normalized));
    ev_.unnormalized_states.push_back(std::move(unnormalized));
  }

  /// Records requested sample times inside (t_start, t_start + h) and adds the
  /// segment's contribution to the integrated state.
  void finish_segment(EvolutionSegment seg, const DenseStep& dense,
                      std::vector<double>::const_iterator& next_sample,
                      std::vector<double>::const_iterator samples_end) {
    const double t_end = seg.t_start + seg.h;
    seg.for_each_node([&](double theta, double w) {
      const SegmentState s = evaluate_dense(sys_, seg, dense, theta);
      ev_.integrated_state += (seg.h * w * std::exp(s.log_survival)) * s.normalized;
    });
    const double eps = 1e-13 * std::max(1.0, std::abs(t_end));
    while (next_sample != samples_end && *next_sample < t_end - eps) {
      if (*next_sample > seg.t_start + eps) {
        const double theta = (*next_sample - seg.t_start) / seg.h;
        const SegmentState s = evaluate_dense(sys_, seg, dense, theta);
        record(*next_sample, s.normalized, s.log_survival);
      }
      ++next_sample;
    }
    while (next_sample != samples_end && *next_sample <= t_end + eps) ++next_sample;
    ev_.segments.push_back(seg);
  }

 private:
  ConditionedEvolution& ev_;
  const NoTickSystem& sys_;
};

inline std::array<double, 5> trace_coefficients(const DenseStep& dense, Eigen::Index d,
                                                const NoTickSystem& sys, bool tick) {
  std::array<double, 5> out{};
  for (int i = 0; i < 5; ++i) {
    const Eigen::Map<const ComplexMatrix> m(dense.r[i].data(), d, d);
    out[i] = tick ? sys.tick_trace(m) : m.trace().real();
  }
  return out;
}

inline void check_step_budget(const ConditionedEvolution& ev, const NoTickSystem& sys) {
  if (ev.segments.size() >= sys.max_steps) {
    throw Error(ErrorKind::kStepUnderflow,
                "step budget of " + std::to_string(sys.max_steps) + " exhausted at t = " +
                    std::to_string(ev.times.back()) +
                    (sys.method == EngineMethod::kDormandPrince
                         ? "; the model looks stiff, try the propagator method"
                         : ""));
  }
}

inline void integrate_dormand_prince(ConditionedEvolution& ev, NoTickSystem& sys,
                                     const ComplexMatrix& rho0, double limit, double cutoff,
                                     const std::vector<double>& samples) {
  const Eigen::Index d = sys.dim;
  EvolutionBuilder builder(ev, sys);
  DormandPrince54<NormalizedRhs> stepper(NormalizedRhs(&sys), d * d + 1, sys.control);
  stepper.reset(0.0, pack_state(normalize_state(rho0), 0.0));
  auto next_sample = samples.begin();
  while (next_sample != samples.end() && *next_sample <= 0.0) ++next_sample;
  ComplexVector projected(d * d + 1);
  while (stepper.t() < limit) {
    check_step_budget(ev, sys);
    const std::size_t start_index = ev.times.size() - 1;
    const double t_start = stepper.t();
    const double h = stepper.step(limit);
    const DenseStep& dense = stepper.dense();
    EvolutionSegment seg;
    seg.t_start = t_start;
    seg.h = h;
    seg.log_form = true;
    seg.grid_index = start_index;
    std::array<double, 5> log_coeff{};
    for (int i = 0; i < 5; ++i) log_coeff[i] = dense.r[i][d * d].real();
    seg.first = DenseStep::power_basis(log_coeff);
    seg.second = DenseStep::power_basis(trace_coefficients(dense, d, sys, true));
    builder.finish_segment(seg, dense, next_sample, samples.end());

    // Re-symmetrize and renormalize the accepted state.
    const Eigen::Map<const ComplexMatrix> rho(stepper.y().data(), d, d);
    const ComplexMatrix normalized = normalize_state(rho);
    const double log_s = stepper.y()[d * d].real();
    projected = pack_state(normalized, log_s);
    stepper.replace_state(projected);
    builder.record(stepper.t(), normalized, log_s);
    if (ev.survival.back() <= cutoff) {
      ev.converged = true;
      break;
    }
  }
}

inline void integrate_propagator(ConditionedEvolution& ev, NoTickSystem& sys,
                                 const ComplexMatrix& rho0, double limit, double cutoff,
                                 const std::vector<double>& samples) {
  const Eigen::Index d = sys.dim;
  EvolutionBuilder builder(ev, sys);
  auto next_sample = samples.begin();
  while (next_sample != samples.end() && *next_sample <= 0.0) ++next_sample;
  ComplexMatrix normalized = normalize_state(rho0);
  double log_s = 0.0;
  double t = 0.0;
  int level = 1;
  constexpr int kMaxLevel = 80;
  const double atol = sys.control.abs_tol;
  const double rtol = sys.control.rel_tol;
  while (t < limit) {
    check_step_budget(ev, sys);
    const std::size_t start_index = ev.times.size() - 1;
    const ComplexVector y0 = vec(normalized);
    const ComplexVector f0 = sys.superoperator * y0;
    while (level > 1 && t + std::ldexp(sys.base_step, level) > limit) --level;
    if (t + std::ldexp(sys.base_step, level) > limit) break;
    ComplexVector ym, y1;
    double h = 0.0, err = 0.0;
    while (true) {
      h = std::ldexp(sys.base_step, level);
      const ComplexMatrix& half = sys.propagator(level - 1);
      ym = half * y0;
      y1 = half * ym;
      const ComplexVector f1 = sys.superoperator * y1;
      // Midpoint error of the cubic Hermite interpolant.
      const ComplexVector hermite = 0.5 * (y0 + y1) + (h / 8.0) * (f0 - f1);
      const double scale = std::max(std::abs(unvec(ym, d).trace().real()), 1e-300);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < ym.size(); ++i) {
        const double sk = atol * scale + rtol * std::abs(ym[i]);
        sum += std::norm(ym[i] - hermite[i]) / (sk * sk);
      }
      err = std::sqrt(sum / static_cast<double>(ym.size()));
      if (err <= 1.0 || level <= 1) break;
      --level;
    }
    if (err > 1.0) {
      throw Error(ErrorKind::kStepUnderflow,
                  "propagator step " + std::to_string(h) + " too coarse at t = " +
                      std::to_string(t));
    }
    const DenseStep dense =
        quartic_dense(y0, ym, y1, h * f0, h * (sys.superoperator * y1));
    EvolutionSegment seg;
    seg.t_start = t;
    seg.h = h;
    seg.log_form = false;
    seg.log_scale = log_s;
    seg.level = level;
    seg.grid_index = start_index;
    seg.first = DenseStep::power_basis(trace_coefficients(dense, d, sys, false));
    seg.second = DenseStep::power_basis(trace_coefficients(dense, d, sys, true));
    builder.finish_segment(seg, dense, next_sample, samples.end());

    const ComplexMatrix z = unvec(y1, d);
    const double tr = real_trace(z);
    if (!(tr > 0.0)) {
      throw Error(ErrorKind::kStepUnderflow, "propagated state lost all trace");
    }
    log_s += std::log(tr);
    normalized = normalize_state(z);
    t += h;
    builder.record(t, normalized, log_s);
    if (ev.survival.back() <= cutoff) {
      ev.converged = true;
      break;
    }
    if (err < 1.0 / 64.0 && level < kMaxLevel) ++level;
  }
}

}  // namespace detail

/// Integrates the no-tick evolution from the model's initial state until the
/// survival drops to the cutoff (converged) or the horizon is reached (not
/// converged; the partial result is still returned).
inline ConditionedEvolution evolve_no_tick(const ClockModel& model,
                                           const IntegrationConfig& config = {}) {
  config.validate();
  auto sys = detail::make_system(model, config);
  ConditionedEvolution ev;
  ev.gamma = model.gamma();
  ev.config = config;
  ev.integrated_state = ComplexMatrix::Zero(model.dim(), model.dim());
  double limit = config.resolved_horizon(model.gamma());
  if (!std::isfinite(limit)) {
    throw Error(ErrorKind::kInvalidArgument, "horizon is not finite (Gamma = 0?)");
  }
  std::vector<double> samples = config.sample_times;
  std::sort(samples.begin(), samples.end());
  const ComplexMatrix& rho0 = model.initial_state().matrix();
  detail::EvolutionBuilder(ev, *sys).record(0.0, detail::normalize_state(rho0), 0.0);
  if (config.method == EngineMethod::kDormandPrince) {
    detail::integrate_dormand_prince(ev, *sys, rho0, limit, config.survival_cutoff, samples);
  } else {
    detail::integrate_propagator(ev, *sys, rho0, limit, config.survival_cutoff, samples);
  }
  ev.horizon = ev.times.back();
  ev.survival_at_horizon = ev.survival.back();
  ev.system = std::move(sys);
  return ev;
}

/// rho0(t) / tr rho0(t) from the integrator's dense output. Eigenvalues pushed
/// below zero by truncation error (at most 100 (abs_tol + rel_tol)) are clipped.
inline DensityMatrix normalized_state_at(const ConditionedEvolution& ev, double t) {
  if (!(t >= 0.0) || t > ev.horizon) {
    throw Error(ErrorKind::kTimeOutOfRange,
                "t = " + std::to_string(t) + " outside [0, " + std::to_string(ev.horizon) + "]");
  }
  if (t == 0.0 || ev.segments.empty()) {
    return DensityMatrix(detail::normalize_state(ev.unnormalized_states.front()));
  }
  const auto& seg = ev.segments[ev.segment_index(t)];
  const DenseStep dense = detail::recover_dense(ev, seg);
  const auto s = detail::evaluate_dense(*ev.system, seg, dense, ev.theta_of(seg, t));
  if (std::exp(s.log_survival) < 1e-12) {
    throw Error(ErrorKind::kSurvivalUnderflow,
                "survival " + std::to_string(std::exp(s.log_survival)) + " at t = " +
                    std::to_string(t));
  }
  // Truncation error of the integrator can leave eigenvalues slightly below
  // zero; clip those within the tolerance budget, reject anything larger.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(s.normalized));
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig >= -kPositivityTolerance) return DensityMatrix(s.normalized);
  const double slack = 100.0 * (ev.config.abs_tol + ev.config.rel_tol);
  if (min_eig < -slack) {
    throw Error(ErrorKind::kInvalidState, "conditioned state has eigenvalue " +
                                              std::to_string(min_eig) + " at t = " +
                                              std::to_string(t));
  }
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  ComplexMatrix rho = eig.eigenvectors() * clipped.cast<Complex>().asDiagonal() *
                      eig.eigenvectors().adjoint();
  return DensityMatrix(hermitian_part(rho) / clipped.sum());
}

/// Top-level population p(t) = tr(V rho_n(t)) / Gamma on the grid.
inline std::vector<double> top_level_population(const ConditionedEvolution& ev, double gamma) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "gamma must be positive");
  }
  std::vector<double> p;
  p.reserve(ev.conditional_rate.size());
  for (double r : ev.conditional_rate) p.push_back(r / gamma);
  return p;
}

}  // namespace tickbound
