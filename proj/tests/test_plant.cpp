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

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/ode.hpp"
#include "orbit_tracer/plant.hpp"

using namespace orbit_tracer;
using namespace orbit_tracer::plant;

namespace {

// Settled open-loop orbit harmonics of q_i over one period.
signal::FourierSeries settled_harmonics(const Plant& p, int i, int periods) {
  const double T = period(p);
  const ode::Field f = [&](double t, ode::StateRef y, ode::DerivRef dy) { respond(p, t, y, 0.0, dy); };
  const auto tr = ode::integrate(f, RealVector::Zero(state_dim(p)), 0.0, (periods + 1) * T);
  std::vector<double> s(1024);
  for (int j = 0; j < 1024; ++j) s[j] = tr.at(periods * T + j * T / 1024)(i);
  return signal::dft_truncate(s, 5, forcing_omega(p), periods * T);
}

}  // namespace

TEST_CASE("duffing respond is the forced Duffing oscillator") {
  const auto d = duffing(1.3);
  const RealVector q{{0.7, -0.2}};
  RealVector dq(2);
  d.respond(0.4, q, 0.25, dq);
  CHECK(dq(0) == doctest::Approx(-0.2));
  const double expect = -1.5 * 0.7 - 0.5 * -0.2 + 0.25 + 0.5 * 0.7 + 0.4 * -0.2 - 0.04 * 0.343 + std::sin(1.3 * 0.4);
  CHECK(dq(1) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(d.period() == doctest::Approx(2.0 * M_PI / 1.3));
}

TEST_CASE("sealed plants trap ground-truth access") {
  const auto d = duffing(1.0).sealed();
  CHECK(d.is_sealed());
  try {
    (void)d.theta();
    FAIL("expected trap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ModelFreeViolation);
  }
  RealVector dq(2);
  CHECK_NOTHROW(d.respond(0.0, RealVector::Zero(2), 0.0, dq));
  const auto s = scalar_sine(1.0).sealed();
  CHECK_THROWS_AS(s.k_true(), Error);
  CHECK_THROWS_AS(s.f(0.0, 0.0), Error);
  CHECK(s.respond(0.0, 0.5, 0.1) == doctest::Approx(-0.5 + std::sin(0.5) + 0.1));
  CHECK_THROWS_AS(open_loop_jacobian(Plant(d), 0.0, RealVector::Zero(2)), Error);
}

TEST_CASE("open-loop Jacobian matches finite differences") {
  const Plant p = duffing(1.0);
  const RealVector q{{1.1, -0.3}};
  const RealMatrix J = open_loop_jacobian(p, 0.7, q);
  RealVector f0(2), f1(2);
  respond(p, 0.7, q, 0.0, f0);
  for (int j = 0; j < 2; ++j) {
    RealVector qp = q;
    qp(j) += 1e-7;
    respond(p, 0.7, qp, 0.0, f1);
    CHECK(((f1 - f0) / 1e-7 - J.col(j)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("duffing open-loop orbit at omega=1") {
  const auto q1 = settled_harmonics(duffing(1.0), 0, 200);
  const auto q2 = settled_harmonics(duffing(1.0), 1, 200);
  CHECK(std::abs(q1.a()[0] + 0.9928) < 2e-3);
  CHECK(std::abs(q1.b()[0] - 2.9876) < 2e-3);
  CHECK(std::abs(q1.a()[2] - 0.0336) < 2e-3);
  CHECK(std::abs(q1.b()[2] + 0.0255) < 2e-3);
  CHECK(std::abs(q2.a()[0] - 2.9876) < 2e-3);
  CHECK(std::abs(q2.b()[0] - 0.9928) < 2e-3);
  CHECK(std::abs(q2.a()[2] + 0.0765) < 2e-3);
  CHECK(std::abs(q2.b()[2] + 0.1008) < 2e-3);
}

TEST_CASE("scalar open-loop orbit at omega=1") {
  const auto q = settled_harmonics(scalar_sine(1.0), 0, 300);
  CHECK(std::abs(q.a()[0] + 0.9849) < 2e-3);
  CHECK(std::abs(q.b()[0] - 0.1160) < 2e-3);
  CHECK(std::abs(q.a()[2] - 0.0053) < 2e-3);
  CHECK(std::abs(q.b()[2] - 0.0115) < 2e-3);
}

TEST_CASE("forcing g vanishes on the open-loop orbit") {
  const Plant p = duffing(1.0);
  std::vector<signal::FourierSeries> c = {settled_harmonics(p, 0, 200), settled_harmonics(p, 1, 200)};
  const auto g = true_forcing_g(p, signal::VectorFourierSeries(c));
  CHECK(g.sup_norm < 2e-3);
  const signal::VectorFourierSeries r17({signal::FourierSeries(1.0, 0.0, {1.0}, {1.0}),
                                         signal::FourierSeries(1.0, 0.0, {1.0}, {-1.0})});
  CHECK(true_forcing_g(p, r17).sup_norm > 0.1);
}

TEST_CASE("plant construction validates its model") {
  StructuredModel m = duffing(1.0).model();
  m.sigma = [](double t) { return std::sin(1.5 * t); };
  CHECK_THROWS_AS(StructuredPlant("bad", m, RealVector::Zero(3)), Error);
  m = duffing(1.0).model();
  m.A(1, 0) = 1.5;
  CHECK_THROWS_AS(StructuredPlant("bad", m, RealVector::Zero(3)), Error);
  CHECK_THROWS_AS(duffing(-1.0), Error);
}

TEST_CASE("disturbances add to the response and carry their bound") {
  const auto d = duffing(1.0).with_disturbance(harmonic_disturbance(2, 1, 0.1, 1.0));
  REQUIRE(d.disturbance());
  CHECK(d.disturbance()->h_b == doctest::Approx(0.1));
  CHECK(d.disturbance()->periodic);
  RealVector a(2), b(2);
  duffing(1.0).respond(0.0, RealVector::Zero(2), 0.0, a);
  d.respond(0.0, RealVector::Zero(2), 0.0, b);
  CHECK(b(1) - a(1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(sine_disturbance(2, 2, 0.1, 1.0, false), Error);
}

TEST_CASE("beam model is well formed") {
  BeamParameters bp;
  bp.k01_nlin = 0.3;
  bp.kpe_lin = 0.1;
  const auto beam = beam_2dof(bp);
  CHECK(beam.n() == 4);
  CHECK(beam.m() == 3);
  RealVector dq(4);
  beam.respond(0.0, RealVector::Zero(4), 0.0, dq);
  CHECK(dq.norm() == 0.0);
}
