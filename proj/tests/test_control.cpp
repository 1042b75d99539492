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

#include "orbit_tracer/control.hpp"
#include "orbit_tracer/error.hpp"

using namespace orbit_tracer;
using namespace orbit_tracer::control;

namespace {

signal::VectorFourierSeries qstar() {
  using signal::FourierSeries;
  return signal::VectorFourierSeries({FourierSeries(1.0, 0.0, {-0.9928, 0.0, 0.0336, 0.0, -0.0005},
                                                    {2.9876, 0.0, -0.0255, 0.0, 0.00002}),
                                      FourierSeries(1.0, 0.0, {2.9876, 0.0, -0.0765, 0.0, 0.0001},
                                                    {0.9928, 0.0, -0.1008, 0.0, 0.0025})});
}

}  // namespace

TEST_CASE("projection operator") {
  const double R = 2.0, eps = 0.1;
  const RealVector y{{1.0, 0.5}};
  const RealVector inside{{0.5, 0.0}};
  CHECK(proj(inside, y, R, eps) == y);
  const RealVector edge{{R, 0.0}};
  const RealVector out = proj(edge, y, R, eps);
  CHECK(std::abs(out(0)) < 1e-14);
  CHECK(out(1) == doctest::Approx(0.5));
  const RealVector inward{{-1.0, 0.5}};
  CHECK(proj(edge, inward, R, eps) == inward);
  const RealVector mid{{R / std::sqrt(1.0 + eps) * 1.02, 0.0}};
  const RealVector part = proj(mid, y, R, eps);
  CHECK(part(0) > 0.0);
  CHECK(part(0) < 1.0);
}

TEST_CASE("lyapunov-based MRAC state") {
  RealMatrix A(2, 2);
  A << 0.0, 1.0, -1.5, -0.5;
  const auto s = MracState::make(A, RealMatrix::Identity(2, 2), 1.0, std::nullopt, RealVector::Zero(3),
                                 RealVector::Zero(2));
  CHECK(s.P(0, 0) == doctest::Approx(8.0 / 3.0));
  CHECK(s.P(1, 1) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("theta-free reference model reproduces the ideal error dynamics") {
  const auto plant = plant::duffing(1.0);
  const auto loop = assemble_closed_loop(plant, MracSpec{}, qstar());
  const auto f = loop.field();
  const auto& L = loop.layout();
  const RealVector theta = plant.theta();
  const auto& m = plant.model();
  const RealMatrix P = loop.P();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = 0.37 * k;
    RealVector z = RealVector::Random(L.size()) * 2.0;
    RealVector dz(L.size());
    f(t, z, dz);
    const RealVector q = z.head(2), xm = z.segment(2, 2), th = z.tail(3);
    const RealVector r = qstar().eval(t), rd = qstar().eval_derivative(t);
    const RealVector e = xm - (q - r);
    const RealVector Qq = m.eval_Q(t, q);
    const RealVector de = dz.segment(2, 2) - (dz.head(2) - rd);
    const RealVector ideal = m.A * e + m.b * (th - theta).dot(Qq);
    worst = std::max(worst, (de - ideal).cwiseAbs().maxCoeff());
    const RealVector dth = -(e.dot(P * m.b)) * Qq;
    CHECK((dz.tail(3) - dth).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("initial state starts with zero prediction error") {
  const auto loop = assemble_closed_loop(plant::duffing(1.0), MracSpec{}, qstar());
  const RealVector z0 = loop.initial_state(RealVector{{0.3, -0.1}}, 0.0);
  CHECK(loop.prediction_error(0.0, z0).norm() < 1e-15);
  CHECK(loop.control(0.0, z0) == 0.0);
}

TEST_CASE("short run with the orbit reference keeps V nonincreasing and within bounds") {
  const auto plant = plant::duffing(1.0);
  const auto loop = assemble_closed_loop(plant, MracSpec{}, qstar());
  auto run = simulate(loop, loop.initial_state(RealVector::Zero(2)), 0.0, 40.0, 0.05);
  const auto rep = lyapunov_diagnostics(run, loop, plant.theta());
  CHECK(rep.V_nonincreasing);
  CHECK(rep.e_within_bound);
  CHECK(rep.theta_within_bound);
  CHECK(rep.e_bound == doctest::Approx(1.0254).epsilon(1e-3));
  CHECK(rep.theta_bound == doctest::Approx(1.2831).epsilon(1e-3));
  std::ostringstream os;
  run.write_csv(os);
  CHECK(os.str().rfind("t,q1,q2,xm1,xm2,theta_hat1,theta_hat2,theta_hat3,u,e_norm,V\n", 0) == 0);
}

TEST_CASE("projection keeps the estimate in the ball") {
  const auto plant = plant::duffing(1.0);
  MracSpec spec;
  spec.projection = ProjectionBall{0.3, 0.1};
  const auto loop = assemble_closed_loop(plant, spec, qstar());
  const auto run = simulate(loop, loop.initial_state(RealVector::Zero(2)), 0.0, 60.0, 0.05);
  for (const auto& z : run.z) CHECK(z.tail(3).norm() <= 0.3 * std::sqrt(1.1) + 1e-8);
}

TEST_CASE("scalar adaptive gain is nondecreasing") {
  const signal::VectorFourierSeries r({signal::FourierSeries(1.0, 0.0, {1.0}, {1.0})});
  const auto loop = assemble_closed_loop(plant::scalar_sine(1.0), ScalarAdaptiveSpec{100.0, 0.0}, r);
  const auto run = simulate(loop, loop.initial_state(RealVector::Zero(1)), 0.0, 30.0, 0.05);
  for (std::size_t k = 1; k < run.z.size(); ++k) CHECK(run.z[k](1) >= run.z[k - 1](1));
  std::ostringstream os;
  run.write_csv(os);
  CHECK(os.str().rfind("t,q1,k_hat,u\n", 0) == 0);
}

TEST_CASE("unsupported pairs and dimension mismatches") {
  CHECK_THROWS_AS(assemble_closed_loop(plant::duffing(1.0), ScalarAdaptiveSpec{}, qstar()), Error);
  const signal::VectorFourierSeries r1({signal::FourierSeries(1.0, 0.0, {1.0}, {1.0})});
  CHECK_THROWS_AS(assemble_closed_loop(plant::duffing(1.0), MracSpec{}, r1), Error);
  CHECK_THROWS_AS(assemble_closed_loop(plant::duffing(2.0), MracSpec{}, qstar()), Error);
  CHECK_THROWS_AS(assemble_closed_loop(plant::scalar_sine(1.0), MracSpec{}, r1), Error);
}

TEST_CASE("proportional control law") {
  const auto loop = assemble_closed_loop(plant::duffing(1.0), ProportionalSpec{RealVector{{1.0, 0.0, 0.0}}}, qstar());
  RealVector z = loop.initial_state(RealVector::Zero(2));
  const double u = loop.control(0.0, z);
  CHECK(u == doctest::Approx(qstar().eval(0.0)(0)));
}
