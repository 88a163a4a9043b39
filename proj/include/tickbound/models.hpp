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
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tickbound/clock_model.hpp"
#include "tickbound/core.hpp"
#include "tickbound/rng.hpp"

namespace tickbound {

/// Two-level system decaying at rate gamma: P[t <= T] = exp(-gamma t).
inline ClockModel build_exponential_clock(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kInvalidArgument, "gamma must be positive");
  }
  return ClockModel(ComplexMatrix::Zero(2, 2), {}, {std::sqrt(gamma) * ketbra(2, 0, 1)},
                    ketbra(2, 1, 1), "exponential");
}

/// Resonantly driven two-level system H = (omega/2) sigma_x whose excited
/// level decays at rate gamma; starts in the ground state.
inline ClockModel build_rabi_clock(double omega, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(omega)) {
    throw Error(ErrorKind::kInvalidArgument, "Rabi clock needs finite omega and gamma > 0");
  }
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5 * omega;
  return ClockModel(std::move(h), {}, {std::sqrt(gamma) * ketbra(2, 0, 1)}, ketbra(2, 0, 0),
                    "rabi");
}

/// Classical chain |m> -> |m-1> -> ... -> |1> -> |0> with every step at rate
/// gamma; only the last step ticks. The tick time is Erlang(m, gamma).
inline ClockModel build_cascade_clock(double gamma, int stages) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kInvalidArgument, "gamma must be positive");
  }
  if (stages < 1) throw Error(ErrorKind::kInvalidArgument, "cascade needs at least one stage");
  const Eigen::Index d = stages + 1;
  std::vector<ComplexMatrix> internal;
  for (Eigen::Index k = 2; k < d; ++k) internal.push_back(std::sqrt(gamma) * ketbra(d, k - 1, k));
  return ClockModel(ComplexMatrix::Zero(d, d), std::move(internal),
                    {std::sqrt(gamma) * ketbra(d, 0, 1)}, ketbra(d, d - 1, d - 1),
                    "cascade-" + std::to_string(stages));
}

/// Parameters of the thermal-machine ladder clock: a cold and a hot qubit
/// coupled to baths, exchanging excitations with a d-level ladder whose top
/// level decays back to the bottom, emitting the tick.
struct LadderParams {
  int d = 3;
  double omega_c = 1.0;
  double omega_h = 2.0;
  double omega_l = 1.0;
  double g = 0.5;
  double gamma_c = 1.0;
  double gamma_h = 1.0;
  /// Inverse temperatures; +infinity is allowed and means zero occupation.
  double beta_c = 10.0;
  double beta_h = 0.5;
  double gamma_tick = 0.5;

  double detuning() const { return std::abs(omega_c + omega_l - omega_h); }
  bool resonant(double tol = 1e-12) const {
    return detuning() <= tol * std::max({1.0, omega_c, omega_h, omega_l});
  }

  void validate() const {
    if (d < 2) throw Error(ErrorKind::kInvalidArgument, "ladder dimension must be at least 2");
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::kInvalidArgument, std::string(name) + " must be positive");
      }
    };
    positive(omega_c, "omega_c");
    positive(omega_h, "omega_h");
    positive(omega_l, "omega_l");
    positive(g, "g");
    positive(gamma_c, "gamma_c");
    positive(gamma_h, "gamma_h");
    positive(gamma_tick, "gamma_tick");
    if (!(beta_c > 0.0) || !(beta_h > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "inverse temperatures must be positive (beta = 0 has divergent occupation)");
    }
    if (!(beta_h < beta_c)) {
      throw Error(ErrorKind::kInvalidArgument, "the hot bath must be hotter: need beta_h < beta_c");
    }
  }
};

/// Bose-Einstein occupation 1 / (e^{beta omega} - 1); zero for beta = inf.
inline double thermal_occupation(double beta, double omega) {
  if (std::isinf(beta)) return 0.0;
  return 1.0 / std::expm1(beta * omega);
}

/// Optional sink for non-fatal builder diagnostics.
using Warnings = std::vector<std::string>;

/// Hilbert space cold qubit (x) hot qubit (x) ladder, dim 4 d. The ladder
/// coupling g (|10><01| (x) |n+1><n| + h.c.) runs over n = 0 .. d-2.
inline ClockModel build_ladder_clock(const LadderParams& p, Warnings* warnings = nullptr) {
  p.validate();
  if (warnings && !p.resonant()) {
    warnings->push_back("ladder is off resonance: |omega_c + omega_l - omega_h| = " +
                        std::to_string(p.detuning()));
  }
  const Eigen::Index d = p.d;
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix il = ComplexMatrix::Identity(d, d);
  const ComplexMatrix excited = ketbra(2, 1, 1);
  ComplexMatrix ladder_energy = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) ladder_energy(n, n) = static_cast<double>(n) * p.omega_l;
  ComplexMatrix h = kron({p.omega_c * excited, i2, il}) + kron({i2, p.omega_h * excited, il}) +
                    kron({i2, i2, ladder_energy});
  const ComplexMatrix swap = kron(ketbra(2, 1, 0), ketbra(2, 0, 1));  // |10><01|_CH
  ComplexMatrix raise = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) raise(n + 1, n) = 1.0;
  const ComplexMatrix h_int = p.g * kron(swap, raise);
  h += h_int + h_int.adjoint();

  const double n_c = thermal_occupation(p.beta_c, p.omega_c);
  const double n_h = thermal_occupation(p.beta_h, p.omega_h);
  const ComplexMatrix up = ketbra(2, 1, 0), down = ketbra(2, 0, 1);
  std::vector<ComplexMatrix> ops = {
      std::sqrt(n_c * p.gamma_c) * kron({up, i2, il}),
      std::sqrt((1.0 + n_c) * p.gamma_c) * kron({down, i2, il}),
      std::sqrt(n_h * p.gamma_h) * kron({i2, up, il}),
      std::sqrt((1.0 + n_h) * p.gamma_h) * kron({i2, down, il}),
  };
  const ComplexMatrix jump = std::sqrt(p.gamma_tick) * kron({i2, i2, ketbra(d, 0, d - 1)});

  auto thermal = [](double n) {
    ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
    rho(0, 0) = (1.0 + n) / (1.0 + 2.0 * n);
    rho(1, 1) = n / (1.0 + 2.0 * n);
    return rho;
  };
  ComplexMatrix rho0 = kron({thermal(n_c), thermal(n_h), ketbra(d, 0, 0)});
  return ClockModel(std::move(h), std::move(ops), {jump}, std::move(rho0),
                    "ladder-d" + std::to_string(p.d));
}

struct RandomClockOptions {
  std::pair<int, int> dim_range{2, 6};
  int max_notick_ops = 2;
  int max_jumps = 2;
};

namespace detail {

inline ComplexMatrix gaussian_matrix(PhiloxStream& rng, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

inline double log_uniform(PhiloxStream& rng, double lo, double hi) {
  return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

inline double spectral_norm(const ComplexMatrix& m) {
  return std::sqrt(std::max(0.0, hermitian_max_eigenvalue(ComplexMatrix(m.adjoint() * m))));
}

/// Orthonormal basis of the smallest subspace containing psi that is
/// invariant under every operator in `ops`.
inline ComplexMatrix reachable_subspace(const ComplexVector& psi,
                                        const std::vector<ComplexMatrix>& ops) {
  const Eigen::Index d = psi.size();
  std::vector<ComplexVector> basis;
  auto add = [&](ComplexVector v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    const double n = v.norm();
    if (n > 1e-8) {
      basis.push_back(v / n);
      return true;
    }
    return false;
  };
  add(psi);
  for (std::size_t k = 0; k < basis.size() && static_cast<Eigen::Index>(basis.size()) < d; ++k) {
    for (const auto& op : ops) add(op * basis[k]);
  }
  ComplexMatrix out(d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
  return out;
}

}  // namespace detail

/// Random clock for property tests, deterministic in `seed`.
///   H: Gaussian Hermitian, spectral norm log-uniform in [0.1, 10] Gamma.
///   Tick jumps: rank one or full rank, jointly scaled to Gamma = 1.
///   No-tick ops: Gaussian, each with rate ||L^dagger L|| log-uniform in
///   [0.01, 10].
///   Initial state: Haar-random pure state from which a tick is reachable.
inline ClockModel build_random_clock(std::uint64_t seed, const RandomClockOptions& opt = {}) {
  const auto [dmin, dmax] = opt.dim_range;
  if (dmin < 2 || dmax < dmin || opt.max_notick_ops < 0 || opt.max_jumps < 1) {
    throw Error(ErrorKind::kInvalidArgument, "invalid random clock ranges");
  }
  PhiloxStream rng(seed, 0x52414e44434c4bULL);
  const Eigen::Index d = rng.uniform_int(dmin, dmax);
  const int n_ops = static_cast<int>(rng.uniform_int(0, opt.max_notick_ops));
  const int n_jumps = static_cast<int>(rng.uniform_int(1, opt.max_jumps));

  ComplexMatrix a = detail::gaussian_matrix(rng, d, d);
  ComplexMatrix h = 0.5 * (a + a.adjoint());
  h *= detail::log_uniform(rng, 0.1, 10.0) / detail::spectral_norm(h);

  std::vector<ComplexMatrix> jumps;
  for (int j = 0; j < n_jumps; ++j) {
    if (rng.uniform() < 0.5) {
      jumps.push_back(detail::gaussian_matrix(rng, d, 1) * detail::gaussian_matrix(rng, d, 1).adjoint());
    } else {
      jumps.push_back(detail::gaussian_matrix(rng, d, d));
    }
    jumps.back() *= std::sqrt(detail::log_uniform(rng, 0.01, 1.0));
  }
  const double v_norm = hermitian_max_eigenvalue(build_tick_operator(jumps));
  for (auto& j : jumps) j /= std::sqrt(v_norm);

  std::vector<ComplexMatrix> ops;
  for (int k = 0; k < n_ops; ++k) {
    ComplexMatrix l = detail::gaussian_matrix(rng, d, d);
    const double rate = detail::log_uniform(rng, 0.01, 10.0);
    l *= std::sqrt(rate) / detail::spectral_norm(l);
    ops.push_back(std::move(l));
  }

  const ComplexMatrix v = build_tick_operator(jumps).matrix();
  std::vector<ComplexMatrix> generators = ops;
  generators.push_back(h - Complex(0.0, 0.5) * v);
  for (int attempt = 0; attempt < 100; ++attempt) {
    ComplexVector psi = detail::gaussian_matrix(rng, d, 1).col(0);
    psi.normalize();
    const ComplexMatrix basis = detail::reachable_subspace(psi, generators);
    const double exposure = hermitian_max_eigenvalue(ComplexMatrix(basis.adjoint() * v * basis));
    if (exposure > 1e-6) {
      ComplexMatrix rho = psi * psi.adjoint();
      rho = hermitian_part(rho);
      rho /= real_trace(rho);
      return ClockModel(std::move(h), std::move(ops), std::move(jumps), std::move(rho),
                        "random-" + std::to_string(seed));
    }
  }
  throw Error(ErrorKind::kEnsembleRejection,
              "no initial state reaches a tick after 100 draws (seed " + std::to_string(seed) + ")");
}

}  // namespace tickbound
