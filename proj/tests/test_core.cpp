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
#include <vector>

#include "oracle_support.hpp"

using namespace tickbound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ComplexMatrix random_matrix(PhiloxStream& rng, Eigen::Index d) {
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST_CASE("gamma is the largest eigenvalue of the tick operator", "[core]") {
  ComplexMatrix v = ComplexMatrix::Zero(2, 2);
  v(1, 1) = 2.0;
  CHECK_THAT(hermitian_max_eigenvalue(v), WithinAbs(2.0, 1e-14));
  CHECK_THAT(hermitian_max_eigenvalue(ComplexMatrix::Zero(2, 2)), WithinAbs(0.0, 1e-14));

  const std::vector<ComplexMatrix> jumps = {ketbra(3, 0, 1), ketbra(3, 0, 2)};
  const HermitianOperator op = build_tick_operator(jumps);
  ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
  expect(1, 1) = expect(2, 2) = 1.0;
  CHECK((op.matrix() - expect).norm() < 1e-15);
  CHECK_THAT(hermitian_max_eigenvalue(op), WithinAbs(1.0, 1e-14));
}

TEST_CASE("tick operator examples", "[core]") {
  const std::vector<ComplexMatrix> one = {std::sqrt(2.0) * ketbra(2, 0, 1)};
  ComplexMatrix diag02 = ComplexMatrix::Zero(2, 2);
  diag02(1, 1) = 2.0;
  CHECK((build_tick_operator(one).matrix() - diag02).norm() < 1e-14);

  const std::vector<ComplexMatrix> ladder = {std::sqrt(0.01) * ketbra(4, 0, 3)};
  CHECK((build_tick_operator(ladder).matrix() - 0.01 * ketbra(4, 3, 3)).norm() < 1e-15);

  CHECK(kind_of([] { build_tick_operator(std::vector<ComplexMatrix>{}); }) ==
        ErrorKind::kEmptyOperand);
  const std::vector<ComplexMatrix> mixed = {ketbra(2, 0, 1), ketbra(3, 0, 1)};
  CHECK(kind_of([&] { build_tick_operator(mixed); }) == ErrorKind::kDimensionMismatch);
}

TEST_CASE("operator validation", "[core]") {
  ComplexMatrix nh = ComplexMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK(kind_of([&] { HermitianOperator{nh}; }) == ErrorKind::kNonHermitian);
  ComplexMatrix nan = ComplexMatrix::Zero(2, 2);
  nan(0, 0) = std::nan("");
  CHECK(kind_of([&] { HermitianOperator{nan}; }) == ErrorKind::kNonFinite);
  CHECK(kind_of([] { DensityMatrix{ComplexMatrix(0, 0)}; }) == ErrorKind::kEmptyOperand);
  CHECK(kind_of([] { DensityMatrix{ComplexMatrix::Zero(2, 3)}; }) ==
        ErrorKind::kDimensionMismatch);
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK(kind_of([&] { DensityMatrix{neg}; }) == ErrorKind::kInvalidState);
  CHECK(kind_of([] { DensityMatrix{2.0 * ketbra(2, 0, 0)}; }) == ErrorKind::kInvalidState);
  // Sub-normalized states are allowed; trace is survival.
  CHECK_THAT(DensityMatrix(0.25 * ketbra(2, 1, 1)).trace(), WithinAbs(0.25, 1e-15));
}

TEST_CASE("clock model validation", "[core]") {
  const ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  CHECK(kind_of([&] { ClockModel(h, {}, {}, ketbra(2, 1, 1)); }) == ErrorKind::kEmptyOperand);
  CHECK(kind_of([&] { ClockModel(h, {}, {ketbra(3, 0, 1)}, ketbra(2, 1, 1)); }) ==
        ErrorKind::kDimensionMismatch);
  CHECK(kind_of([&] { ClockModel(h, {}, {ketbra(2, 0, 1)}, 0.5 * ketbra(2, 1, 1)); }) ==
        ErrorKind::kInvalidState);
  const ClockModel m(h, {}, {std::sqrt(3.0) * ketbra(2, 0, 1)}, ketbra(2, 1, 1));
  CHECK_THAT(m.gamma(), WithinRel(3.0, 1e-14));
}

TEST_CASE("no-tick generator examples", "[core]") {
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  const std::vector<ComplexMatrix> none;
  const ComplexMatrix rho = ketbra(2, 1, 1);
  CHECK(apply_no_tick_generator(zero, none, zero, rho).norm() == 0.0);
  CHECK(vectorize_superoperator(zero, none, HermitianOperator(zero)).norm() == 0.0);

  const double g = 0.7;
  const ComplexMatrix v = g * ketbra(2, 1, 1);
  const ComplexMatrix out = apply_no_tick_generator(zero, none, v, rho);
  CHECK((out + g * rho).norm() < 1e-15);
  const ComplexVector stacked = vectorize_superoperator(zero, none, HermitianOperator(v)) * vec(rho);
  CHECK((stacked + g * vec(rho)).norm() < 1e-15);
}

TEST_CASE("vectorized generator matches direct action and reference", "[core]") {
  PhiloxStream rng(11, 0);
  for (int d = 2; d <= 5; ++d) {
    const ComplexMatrix a = random_matrix(rng, d);
    const ComplexMatrix h = 0.5 * (a + a.adjoint());
    const std::vector<ComplexMatrix> ls = {random_matrix(rng, d), random_matrix(rng, d)};
    const std::vector<ComplexMatrix> js = {random_matrix(rng, d)};
    const HermitianOperator v = build_tick_operator(js);
    const ComplexMatrix rho = random_matrix(rng, d);
    const ComplexMatrix sup = vectorize_superoperator(h, ls, v);
    const ComplexMatrix direct = apply_no_tick_generator(h, ls, v.matrix(), rho);
    CHECK((unvec(sup * vec(rho), d) - direct).norm() < 1e-12 * (1.0 + direct.norm()));

    ComplexMatrix rho_d = ComplexMatrix::Identity(d, d) / double(d);
    const ClockModel model(h, ls, js, rho_d);
    CHECK((testing::reference_generator(model) - sup).norm() < 1e-12 * sup.norm());
  }
}

TEST_CASE("trace of the generator equals minus the tick rate", "[core]") {
  PhiloxStream rng(12, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    const ComplexMatrix a = random_matrix(rng, d);
    const ComplexMatrix h = 0.5 * (a + a.adjoint());
    const std::vector<ComplexMatrix> ls = {random_matrix(rng, d)};
    const ComplexMatrix jm = random_matrix(rng, d);
    const HermitianOperator v = build_tick_operator(std::vector<ComplexMatrix>{jm});
    const ComplexMatrix b = random_matrix(rng, d);
    const ComplexMatrix rho = b * b.adjoint();
    const Complex tr = apply_no_tick_generator(h, ls, v.matrix(), rho).trace();
    const Complex rate = (v.matrix() * rho).trace();
    CHECK(std::abs(tr + rate) < 1e-11 * std::abs(rate));
  }
}

TEST_CASE("kronecker and stacking conventions", "[core]") {
  PhiloxStream rng(13, 0);
  const ComplexMatrix a = random_matrix(rng, 2), x = random_matrix(rng, 3),
                      b = random_matrix(rng, 3);
  // vec(A X B) = (B^T kron A) vec(X) for square operands of equal size.
  const ComplexMatrix a3 = random_matrix(rng, 3);
  CHECK((vec(a3 * x * b) - kron(b.transpose(), a3) * vec(x)).norm() < 1e-12);
  CHECK((unvec(vec(x), 3) - x).norm() == 0.0);
  const ComplexMatrix k = kron({a, a, a});
  CHECK(k.rows() == 8);
  CHECK((k - kron(a, kron(a, a))).norm() < 1e-13);
}

TEST_CASE("matrix exponential agrees with Eigen MatrixFunctions", "[core]") {
  PhiloxStream rng(14, 0);
  for (double scale : {1e-3, 0.1, 1.0, 10.0, 300.0}) {
    for (int d : {1, 3, 9, 16}) {
      ComplexMatrix a = random_matrix(rng, d);
      a *= scale / a.norm();
      // Shift left so large scales stay representable.
      a -= Complex(scale, 0.0) * ComplexMatrix::Identity(d, d);
      const ComplexMatrix mine = matrix_exponential(a);
      const ComplexMatrix ref = a.exp();
      INFO("scale " << scale << " dim " << d);
      CHECK((mine - ref).norm() <= 1e-12 * std::max(1.0, ref.norm()) + 1e-300);
    }
  }
}

TEST_CASE("Gauss-Legendre rule integrates degree 15 exactly", "[core]") {
  double wsum = 0.0;
  for (double w : GaussLegendre8::weights) wsum += w;
  CHECK_THAT(wsum, WithinAbs(1.0, 1e-15));
  for (int p = 0; p <= 15; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      s += GaussLegendre8::weights[i] * std::pow(GaussLegendre8::nodes[i], p);
    }
    CHECK_THAT(s, WithinRel(1.0 / (p + 1), 1e-14));
  }
  double s16 = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    s16 += GaussLegendre8::weights[i] * std::pow(GaussLegendre8::nodes[i], 16);
  }
  CHECK(std::abs(s16 - 1.0 / 17) > 1e-12);
}

TEST_CASE("Dormand-Prince integrates a rotation with dense output", "[core]") {
  // y' = A y with A = [[0, -w], [w, 0]] as complex vector.
  const double w = 3.0;
  auto rhs = [w](double, const ComplexVector& y, ComplexVector& dy) {
    dy(0) = -w * y(1);
    dy(1) = w * y(0);
  };
  StepControl control;
  control.abs_tol = 1e-12;
  control.rel_tol = 1e-12;
  DormandPrince54<decltype(rhs)> dp(rhs, 2, control);
  ComplexVector y0(2);
  y0 << 1.0, 0.0;
  dp.reset(0.0, y0);
  double worst = 0.0, worst_dense = 0.0;
  int steps = 0;
  while (dp.t() < 10.0) {
    const double h = dp.step(10.0);
    ++steps;
    const double t = dp.t();
    worst = std::max(worst, std::abs(dp.y()(0) - std::cos(w * t)));
    const double tm = t - 0.37 * h;
    const ComplexVector ym = dp.dense().evaluate(0.63);
    worst_dense = std::max(worst_dense, std::abs(ym(1) - std::sin(w * tm)));
  }
  CHECK(dp.t() == 10.0);
  CHECK(worst < 1e-9);
  CHECK(worst_dense < 1e-8);
  CHECK(steps < 2000);
}

TEST_CASE("Dormand-Prince rejects a zero-length request", "[core]") {
  auto rhs = [](double, const ComplexVector& y, ComplexVector& dy) { dy = -y; };
  DormandPrince54<decltype(rhs)> dp(rhs, 1);
  ComplexVector y0(1);
  y0 << 1.0;
  dp.reset(1.0, y0);
  CHECK(kind_of([&] { dp.step(1.0); }) == ErrorKind::kStepUnderflow);
}

TEST_CASE("Philox4x32-10 known-answer vectors", "[core]") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Philox streams are independent and reproducible", "[core]") {
  PhiloxStream a(5, 0), b(5, 0), c(5, 1), d(6, 0);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    same_c += x == c() ? 1 : 0;
    same_d += x == d() ? 1 : 0;
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);

  PhiloxStream u(9, 3);
  double mean = 0.0, var = 0.0, emean = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    mean += x;
    const double z = u.normal();
    var += z * z;
    emean += u.exponential();
  }
  CHECK_THAT(mean / n, WithinAbs(0.5, 5 * std::sqrt(1.0 / 12 / n)));
  CHECK_THAT(var / n, WithinAbs(1.0, 5 * std::sqrt(2.0 / n)));
  CHECK_THAT(emean / n, WithinAbs(1.0, 5 * std::sqrt(1.0 / n)));
  for (int i = 0; i < 1000; ++i) {
    const auto k = u.uniform_int(-2, 2);
    REQUIRE(k >= -2);
    REQUIRE(k <= 2);
  }
}

TEST_CASE("parallel_for covers every index once and propagates errors", "[core]") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(
                      10, [](std::size_t i) {
                        if (i == 7) throw Error(ErrorKind::kInvalidArgument, "boom");
                      },
                      3),
                  Error);
}
