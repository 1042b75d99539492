// Copyright 2026 The orbit-tracer Authors
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

#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/numkit.hpp"

using namespace orbit_tracer;
using namespace orbit_tracer::numkit;

namespace {

RealMatrix duffing_A() {
  RealMatrix A(2, 2);
  A << 0.0, 1.0, -1.5, -0.5;
  return A;
}

// Random stable matrix: shifted so every eigenvalue has real part <= -0.5.
RealMatrix random_hurwitz(std::mt19937& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  RealMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = N(rng);
  double shift = 0.0;
  for (const auto& l : eig_general(M)) shift = std::max(shift, l.real());
  return M - (shift + 0.5) * RealMatrix::Identity(n, n);
}

std::complex<double> char_poly(const RealMatrix& M, std::complex<double> z) {
  const Eigen::MatrixXcd D = z * Eigen::MatrixXcd::Identity(M.rows(), M.cols()) - M.cast<std::complex<double>>();
  return D.determinant();
}

}  // namespace

TEST_CASE("lyapunov: duffing design matrix") {
  const RealMatrix P = solve_lyapunov(duffing_A(), RealMatrix::Identity(2, 2));
  CHECK(P(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(P(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(P(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(P(1, 1) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  const RealMatrix R = P * duffing_A() + duffing_A().transpose() * P + RealMatrix::Identity(2, 2);
  CHECK(max_abs(R) < 1e-12);
}

TEST_CASE("lyapunov: random stable matrices give SPD solutions") {
  std::mt19937 rng(7);
  for (int n = 1; n <= 6; ++n) {
    const RealMatrix A = random_hurwitz(rng, n);
    RealMatrix B = RealMatrix::Random(n, n);
    const RealMatrix S = B * B.transpose() + RealMatrix::Identity(n, n);
    const RealMatrix P = solve_lyapunov(A, S);
    const RealMatrix R = P * A + A.transpose() * P + S;
    CHECK(max_abs(R) < 1e-9 * (1.0 + max_abs(P)));
    CHECK(max_abs(P - P.transpose()) == 0.0);
    CHECK(eig_sym(P).front() > 0.0);
  }
}

TEST_CASE("lyapunov: rejects bad input") {
  RealMatrix A(2, 2);
  A << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS_AS(solve_lyapunov(A, RealMatrix::Identity(2, 2)), Error);
  RealMatrix S(2, 2);
  S << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(solve_lyapunov(duffing_A(), S), Error);
  S << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(solve_lyapunov(duffing_A(), S), Error);
}

TEST_CASE("eig_sym: reconstruction and orthonormality") {
  std::mt19937 rng(11);
  for (int n = 1; n <= 8; ++n) {
    RealMatrix B = RealMatrix::Random(n, n);
    const RealMatrix M = B + B.transpose();
    const auto d = eig_sym_decompose(M);
    CHECK(std::is_sorted(d.values.data(), d.values.data() + n));
    CHECK(max_abs(d.vectors.transpose() * d.vectors - RealMatrix::Identity(n, n)) < 1e-12);
    CHECK(max_abs(d.vectors * d.values.asDiagonal() * d.vectors.transpose() - M) < 1e-11);
  }
  RealMatrix P(2, 2);
  P << 8.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 5.0 / 3.0;
  const auto l = eig_sym(P);
  CHECK(l[0] == doctest::Approx(13.0 / 6.0 - std::sqrt(13.0) / 6.0).epsilon(1e-13));
  CHECK(l[1] == doctest::Approx(13.0 / 6.0 + std::sqrt(13.0) / 6.0).epsilon(1e-13));
}

TEST_CASE("eig_general: known spectra and characteristic polynomial") {
  const auto l = eig_general(duffing_A());
  REQUIRE(l.size() == 2);
  for (const auto& z : l) {
    CHECK(z.real() == doctest::Approx(-0.25).epsilon(1e-13));
    CHECK(std::abs(z.imag()) == doctest::Approx(std::sqrt(1.5 - 0.0625)).epsilon(1e-13));
  }
  // Companion matrix of (z-1)(z-2)(z-3)(z^2+1) = z^5 - 6z^4 + 12z^3 - 12z^2 + 11z - 6.
  RealMatrix C = RealMatrix::Zero(5, 5);
  const double c[5] = {-6.0, 11.0, -12.0, 12.0, -6.0};
  for (int i = 1; i < 5; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < 5; ++i) C(i, 4) = -c[i];
  auto z = eig_general(C);
  std::sort(z.begin(), z.end(), [](auto a, auto b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  CHECK(std::abs(z[0] - std::complex<double>(0, -1)) < 1e-10);
  CHECK(std::abs(z[1] - std::complex<double>(0, 1)) < 1e-10);
  CHECK(std::abs(z[2] - 1.0) < 1e-10);
  CHECK(std::abs(z[3] - 2.0) < 1e-10);
  CHECK(std::abs(z[4] - 3.0) < 1e-10);

  std::mt19937 rng(3);
  for (int n = 2; n <= 8; ++n) {
    const RealMatrix M = RealMatrix::Random(n, n);
    for (const auto& zz : eig_general(M)) CHECK(std::abs(char_poly(M, zz)) < 1e-9);
  }
  CHECK_THROWS_AS(eig_general(RealMatrix::Identity(9, 9)), Error);
}

TEST_CASE("hurwitz and linear solves") {
  CHECK(hurwitz_check(duffing_A()));
  CHECK_FALSE(hurwitz_check(RealMatrix::Zero(2, 2)));
  RealMatrix M(2, 2);
  M << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(solve_real(M, RealVector::Ones(2)), Error);
  M << 0.0, 1.0, 1.0, 0.0;
  const RealVector x = solve_real(M, RealVector{{3.0, 4.0}});
  CHECK(x(0) == 4.0);
  CHECK(x(1) == 3.0);
  ComplexMatrix Z(2, 2);
  Z << Complex(0, 1), 1.0, 1.0, Complex(0, -1);
  Z(1, 1) = 2.0;
  const ComplexVector b = ComplexVector::Ones(2);
  const ComplexVector y = solve_complex(Z, b);
  CHECK((Z * y - b).norm() < 1e-14);
  CHECK(all_finite(RealMatrix::Ones(2, 2)));
  RealMatrix N = RealMatrix::Ones(2, 2);
  N(1, 1) = std::nan("");
  CHECK_FALSE(all_finite(N));
}
