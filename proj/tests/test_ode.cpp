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
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/ode.hpp"

using namespace orbit_tracer;
using namespace orbit_tracer::ode;

namespace {

const Field decay = [](double, StateRef y, DerivRef dy) { dy = -y; };
const Field oscillator = [](double, StateRef y, DerivRef dy) {
  dy(0) = y(1);
  dy(1) = -y(0);
};
// y' = -y + sin t, y(0) = 0: y = (sin t - cos t + e^{-t}) / 2.
const Field forced = [](double t, StateRef y, DerivRef dy) { dy(0) = -y(0) + std::sin(t); };
double forced_exact(double t) { return 0.5 * (std::sin(t) - std::cos(t) + std::exp(-t)); }

}  // namespace

TEST_CASE("integrate: exponential decay ends exactly at t1") {
  const auto tr = integrate(decay, State::Ones(1), 0.0, 5.0);
  CHECK(tr.t_end() == 5.0);
  CHECK(std::abs(tr.back()(0) - std::exp(-5.0)) < 1e-9);
  CHECK(tr.accepted_steps() > 0);
}

TEST_CASE("integrate: backwards-free invariants of the oscillator") {
  const auto tr = integrate(oscillator, State{{1.0, 0.0}}, 0.0, 20.0 * M_PI);
  CHECK(std::abs(tr.back()(0) - 1.0) < 1e-7);
  CHECK(std::abs(tr.back()(1)) < 1e-7);
}

TEST_CASE("dense output matches the exact solution between steps") {
  const auto tr = integrate(forced, State::Zero(1), 0.0, 10.0);
  double err = 0.0;
  for (int j = 0; j <= 1000; ++j) {
    const double t = 10.0 * j / 1000.0;
    err = std::max(err, std::abs(tr.at(t)(0) - forced_exact(t)));
  }
  CHECK(err < 1e-8);
  CHECK_THROWS_AS(tr.at(10.5), Error);
}

TEST_CASE("fixed-step Dormand-Prince converges at order 5") {
  IntegratorConfig cfg;
  cfg.adaptive = false;
  double prev = 0.0;
  for (const double h : {0.2, 0.1, 0.05}) {
    cfg.h_init = h;
    const auto tr = integrate(forced, State::Zero(1), 0.0, 4.0, cfg);
    const double err = std::abs(tr.back()(0) - forced_exact(4.0));
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      CHECK(order > 4.7);
      CHECK(order < 5.5);
    }
    prev = err;
  }
}

TEST_CASE("blowup is reported as a numerical failure") {
  const Field blow = [](double, StateRef y, DerivRef dy) { dy(0) = y(0) * y(0); };
  try {
    (void)integrate(blow, State::Ones(1), 0.0, 2.0);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
  }
}

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  cfg.rtol = -1.0;
  CHECK_THROWS_AS(integrate(decay, State::Ones(1), 0.0, 1.0, cfg), Error);
}

TEST_CASE("monodromy of a constant system equals the matrix exponential") {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, -1.5, -0.5;
  const double T = 2.0 * M_PI;
  const Eigen::MatrixXd Phi = monodromy([&](double) { return A; }, 2, 0.0, T);
  const Eigen::MatrixXd E = (A * T).exp();
  CHECK((Phi - E).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("sample_period and csv") {
  const auto s = sample_period(oscillator, State{{1.0, 0.0}}, 0.0, 2.0 * M_PI, 8);
  REQUIRE(s.times.size() == 8);
  CHECK(s.times[4] == doctest::Approx(M_PI));
  CHECK(std::abs(s.states[4](0) + 1.0) < 1e-8);
  CHECK(std::abs(s.terminal(0) - 1.0) < 1e-8);
  std::ostringstream os;
  s.trajectory.write_csv(os);
  CHECK(os.str().rfind("t,y0,y1\n", 0) == 0);
}
