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

#include <cmath>
#include <random>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/signal.hpp"

using namespace orbit_tracer;
using namespace orbit_tracer::signal;

namespace {

RealMatrix duffing_A() {
  RealMatrix A(2, 2);
  A << 0.0, 1.0, -1.5, -0.5;
  return A;
}
const RealVector duffing_b = RealVector::Unit(2, 1);

FourierSeries random_series(std::mt19937& rng, double w, int K) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> a(K), b(K);
  for (int k = 0; k < K; ++k) {
    a[k] = U(rng);
    b[k] = U(rng);
  }
  return FourierSeries(w, U(rng), a, b);
}

}  // namespace

TEST_CASE("dft round trip") {
  std::mt19937 rng(5);
  for (const double w : {0.3, 1.0, 2.7}) {
    const auto f = random_series(rng, w, 5);
    const int N = 1024;
    const double t0 = 10.0 * f.period();
    std::vector<double> s(N);
    for (int j = 0; j < N; ++j) s[j] = f.eval(t0 + j * f.period() / N);
    const auto g = dft_truncate(s, 5, w, t0);
    CHECK((g.packed() - f.packed()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("dft rejects aliasing-prone sample counts") {
  std::vector<double> s(23, 0.0);
  CHECK_THROWS_AS(dft_truncate(s, 5, 1.0), Error);
}

TEST_CASE("fourier series evaluation and packing") {
  const FourierSeries f(2.0, 0.5, {1.0, 0.0}, {0.0, 3.0});
  CHECK(f.eval(0.0) == doctest::Approx(1.5));
  CHECK(f.eval_derivative(0.0) == doctest::Approx(3.0 * 4.0));
  CHECK(f.period() == doctest::Approx(M_PI));
  const auto g = FourierSeries::from_packed(2.0, f.packed());
  CHECK(g.packed() == f.packed());
  CHECK(f.sup_norm() <= 0.5 + 1.0 + 3.0);
  CHECK_THROWS_AS(FourierSeries(-1.0, 0.0, {1.0}, {1.0}), Error);
  CHECK_THROWS_AS(FourierSeries(1.0, 0.0, {1.0}, {}), Error);
}

TEST_CASE("synthesized reference satisfies r' = A r + b v") {
  std::mt19937 rng(9);
  for (const double w : {0.2, 1.0, 3.0}) {
    const auto v = random_series(rng, w, 5);
    const auto r = synthesize_reference(v, duffing_A(), duffing_b);
    double res = 0.0;
    for (int j = 0; j < 257; ++j) {
      const double t = j * v.period() / 257;
      const RealVector e = r.eval_derivative(t) - duffing_A() * r.eval(t) - duffing_b * v.eval(t);
      res = std::max(res, e.cwiseAbs().maxCoeff());
    }
    CHECK(res < 1e-10);
    const auto v2 = generator_from_reference(r, duffing_A(), duffing_b);
    CHECK((v2.packed() - v.packed()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("resolvent singularity is reported") {
  RealMatrix A(2, 2);
  A << 0.0, 1.0, -1.0, 0.0;
  const FourierSeries v(1.0, 0.0, {1.0}, {0.0});
  CHECK_THROWS_AS(synthesize_reference(v, A, duffing_b), Error);
}

TEST_CASE("pe_gram levels") {
  const int N = 1025;
  const double T = 2.0 * M_PI;
  std::vector<RealVector> Q(N);
  for (int j = 0; j < N; ++j) Q[j] = RealVector::Constant(2, 1.0);
  CHECK(pe_gram(Q, T).alpha == doctest::Approx(0.0).epsilon(1e-12));
  for (int j = 0; j < N; ++j) {
    const double t = j * T / (N - 1);
    Q[j] = RealVector{{std::cos(t), std::sin(t)}};
  }
  const auto rep = pe_gram(Q, T);
  CHECK(rep.alpha == doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(std::abs(rep.gram(0, 1)) < 1e-12);
  std::vector<RealVector> even(1024, RealVector::Ones(2));
  CHECK_THROWS_AS(pe_gram(even, T), Error);
}

TEST_CASE("pe_running is constant on periodic signals") {
  const VectorSignal Q = [](double t) { return RealVector{{std::cos(t), std::sin(t)}}; };
  const auto run = pe_running(Q, 0.0, 8.0 * M_PI, 2.0 * M_PI, M_PI, 257);
  REQUIRE(run.size() == 7);
  for (const auto& [t, a] : run) CHECK(a == doctest::Approx(M_PI).epsilon(1e-8));
}

TEST_CASE("json round trip is strict") {
  const FourierSeries f(1.5, 0.25, {1.0, 2.0}, {3.0, 4.0});
  nlohmann::json j = f;
  const auto g = j.get<FourierSeries>();
  CHECK(g.packed() == f.packed());
  CHECK(g.omega() == f.omega());
  j["phase"] = 0.0;
  CHECK_THROWS_AS(j.get<FourierSeries>(), Error);
}
