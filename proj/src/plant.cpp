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

#include "orbit_tracer/plant.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/numkit.hpp"

namespace orbit_tracer::plant {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void sealed_access(const std::string& name, const char* what) {
  fail(ErrorKind::ModelFreeViolation, "plant '" + name + "': sealed ground truth (" + what + ") was read");
}

// Q and sigma are declared T-periodic; closures cannot be proven so, so spot-check.
void check_periodicity(const StructuredModel& m, const std::string& name) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> ut(0.0, 50.0), uq(-2.0, 2.0);
  const double T = m.period();
  RealVector q(m.n()), Q1(m.m), Q2(m.m);
  for (int i = 0; i < 16; ++i) {
    const double t = ut(rng);
    for (int j = 0; j < m.n(); ++j) q(j) = uq(rng);
    m.Q(t, q, Q1);
    m.Q(t + T, q, Q2);
    const double s1 = m.sigma(t), s2 = m.sigma(t + T);
    const double scale = 1.0 + Q1.cwiseAbs().maxCoeff();
    if ((Q1 - Q2).cwiseAbs().maxCoeff() > 1e-12 * scale * (1.0 + t) ||
        std::abs(s1 - s2) > 1e-12 * (1.0 + std::abs(s1)) * (1.0 + t)) {
      fail(ErrorKind::InvalidArgument, "plant '" + name + "': Q or sigma is not periodic with the declared period");
    }
  }
}

}  // namespace

double StructuredModel::period() const { return kTwoPi / omega; }

RealVector StructuredModel::eval_Q(double t, VecIn q) const {
  RealVector out(m);
  Q(t, q, out);
  return out;
}

StructuredPlant::StructuredPlant(std::string name, StructuredModel model, RealVector theta)
    : name_(std::move(name)), model_(std::move(model)), theta_(std::make_shared<const RealVector>(std::move(theta))) {
  const int n = model_.n();
  if (n < 1 || model_.A.cols() != n || model_.b.size() != n) {
    fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': A must be n x n and b length n");
  }
  if (model_.m < 1 || theta_->size() != model_.m) {
    fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': theta length must equal m");
  }
  if (!(model_.omega > 0.0)) fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': omega must be > 0");
  if (!model_.Q || !model_.Q_q || !model_.sigma) {
    fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': Q, Q_q and sigma are required");
  }
  if (!numkit::hurwitz_check(model_.A)) fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': A is not Hurwitz");
  check_periodicity(model_, name_);
}

void StructuredPlant::respond(double t, VecIn q, double u, VecOut dq) const {
  RealVector Qv(model_.m);
  model_.Q(t, q, Qv);
  dq.noalias() = model_.A * q;
  dq += model_.b * (u + theta_->dot(Qv) + model_.sigma(t));
  if (disturbance_) {
    RealVector h(q.size());
    disturbance_->h(t, q, h);
    dq += h;
  }
}

const RealVector& StructuredPlant::theta() const {
  if (sealed_) sealed_access(name_, "theta");
  return *theta_;
}

StructuredPlant StructuredPlant::sealed() const {
  StructuredPlant copy = *this;
  copy.sealed_ = true;
  return copy;
}

StructuredPlant StructuredPlant::with_disturbance(Disturbance d) const {
  if (!d.h) fail(ErrorKind::InvalidArgument, "disturbance: h is required");
  if (!(d.h_b >= 0.0)) fail(ErrorKind::InvalidArgument, "disturbance: h_b must be >= 0");
  // Bound check on a sampled grid.
  std::mt19937_64 rng(0xd157);
  std::uniform_real_distribution<double> ut(0.0, 100.0), uq(-5.0, 5.0);
  RealVector q(n()), h(n());
  for (int i = 0; i < 64; ++i) {
    const double t = ut(rng);
    for (int j = 0; j < n(); ++j) q(j) = uq(rng);
    d.h(t, q, h);
    if (h.norm() > d.h_b * (1.0 + 1e-12) + 1e-15) {
      fail(ErrorKind::InvalidArgument, "disturbance: |h| exceeds the declared bound h_b");
    }
  }
  StructuredPlant copy = *this;
  copy.disturbance_ = std::move(d);
  return copy;
}

double ScalarModel::period() const { return kTwoPi / omega; }

ScalarPlant::ScalarPlant(std::string name, ScalarModel model, double k_true, ScalarStateFn f, ScalarStateFn f_q,
                         double f_b)
    : name_(std::move(name)),
      model_(std::move(model)),
      hidden_(std::make_shared<const Hidden>(Hidden{k_true, std::move(f), std::move(f_q)})),
      f_b_(f_b) {
  if (!(model_.a < 0.0)) fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': a must be < 0");
  if (model_.b == 0.0) fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': b must be nonzero");
  if (!(model_.omega > 0.0)) fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': omega must be > 0");
  if (!model_.sigma || !hidden_->f || !hidden_->f_q) {
    fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': sigma, f and f_q are required");
  }
  std::mt19937_64 rng(0xf00d);
  std::uniform_real_distribution<double> ut(0.0, 50.0), uq(-10.0, 10.0);
  const double T = model_.period();
  for (int i = 0; i < 64; ++i) {
    const double t = ut(rng), q = uq(rng);
    if (std::abs(hidden_->f(t, q)) > f_b_ * (1.0 + 1e-12)) {
      fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': |f| exceeds the declared bound");
    }
    if (i < 16 && std::abs(model_.sigma(t) - model_.sigma(t + T)) > 1e-12 * (1.0 + t)) {
      fail(ErrorKind::InvalidArgument, "plant '" + name_ + "': sigma is not periodic with the declared period");
    }
  }
}

double ScalarPlant::respond(double t, double q, double u) const {
  return model_.a * q + model_.b * (hidden_->k * q + hidden_->f(t, q) + model_.sigma(t) + u);
}

double ScalarPlant::k_true() const {
  if (sealed_) sealed_access(name_, "k");
  return hidden_->k;
}

double ScalarPlant::f(double t, double q) const {
  if (sealed_) sealed_access(name_, "f");
  return hidden_->f(t, q);
}

double ScalarPlant::f_q(double t, double q) const {
  if (sealed_) sealed_access(name_, "f_q");
  return hidden_->f_q(t, q);
}

ScalarPlant ScalarPlant::sealed() const {
  ScalarPlant copy = *this;
  copy.sealed_ = true;
  return copy;
}

int state_dim(const Plant& p) {
  return std::visit([](const auto& x) -> int {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, StructuredPlant>) return x.n();
    else return 1;
  }, p);
}

double period(const Plant& p) {
  return std::visit([](const auto& x) { return x.period(); }, p);
}

double forcing_omega(const Plant& p) {
  return std::visit([](const auto& x) { return x.omega(); }, p);
}

RealMatrix known_A(const Plant& p) {
  if (const auto* s = std::get_if<StructuredPlant>(&p)) return s->model().A;
  return std::get<ScalarPlant>(p).model().A();
}

RealVector known_b(const Plant& p) {
  if (const auto* s = std::get_if<StructuredPlant>(&p)) return s->model().b;
  return std::get<ScalarPlant>(p).model().bvec();
}

void respond(const Plant& p, double t, VecIn q, double u, VecOut dq) {
  if (const auto* s = std::get_if<StructuredPlant>(&p)) {
    s->respond(t, q, u, dq);
  } else {
    dq(0) = std::get<ScalarPlant>(p).respond(t, q(0), u);
  }
}

Plant sealed(const Plant& p) {
  return std::visit([](const auto& x) -> Plant { return x.sealed(); }, p);
}

RealMatrix open_loop_jacobian(const Plant& p, double t, VecIn q) {
  if (const auto* s = std::get_if<StructuredPlant>(&p)) {
    const auto& m = s->model();
    RealMatrix Qq(m.m, m.n());
    m.Q_q(t, q, Qq);
    return m.A + m.b * (s->theta().transpose() * Qq);
  }
  const auto& sp = std::get<ScalarPlant>(p);
  const auto& m = sp.model();
  return RealMatrix::Constant(1, 1, m.a + m.b * (sp.k_true() + sp.f_q(t, q(0))));
}

StructuredPlant duffing(double omega) {
  if (!(omega > 0.0)) fail(ErrorKind::InvalidArgument, "duffing: omega must be > 0");
  StructuredModel m;
  m.A.resize(2, 2);
  m.A << 0.0, 1.0, -1.5, -0.5;
  m.b = RealVector::Unit(2, 1);
  m.m = 3;
  m.Q = [](double, VecIn q, VecOut out) {
    out(0) = q(0);
    out(1) = q(1);
    out(2) = q(0) * q(0) * q(0);
  };
  m.Q_q = [](double, VecIn q, Eigen::Ref<RealMatrix> J) {
    J.setZero();
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    J(2, 0) = 3.0 * q(0) * q(0);
  };
  m.sigma = [omega](double t) { return std::sin(omega * t); };
  m.omega = omega;
  RealVector theta(3);
  theta << 0.5, 0.4, -0.04;
  return StructuredPlant("duffing", std::move(m), std::move(theta));
}

StructuredPlant linear_oscillator(double omega, const RealVector& theta) {
  if (!(omega > 0.0)) fail(ErrorKind::InvalidArgument, "linear: omega must be > 0");
  if (theta.size() != 2) fail(ErrorKind::InvalidArgument, "linear: theta must have length 2");
  StructuredModel m;
  m.A.resize(2, 2);
  m.A << 0.0, 1.0, -1.5, -0.5;
  m.b = RealVector::Unit(2, 1);
  m.m = 2;
  m.Q = [](double, VecIn q, VecOut out) { out = q; };
  m.Q_q = [](double, VecIn, Eigen::Ref<RealMatrix> J) { J.setIdentity(); };
  m.sigma = [omega](double t) { return std::sin(omega * t); };
  m.omega = omega;
  return StructuredPlant("linear", std::move(m), theta);
}

ScalarPlant scalar_sine(double omega) {
  if (!(omega > 0.0)) fail(ErrorKind::InvalidArgument, "scalar_sine: omega must be > 0");
  ScalarModel m;
  m.a = -1.0;
  m.b = 1.0;
  m.sigma = [omega](double t) { return std::sin(omega * t); };
  m.omega = omega;
  return ScalarPlant(
      "scalar_sine", std::move(m), 0.0, [](double, double q) { return std::sin(q); },
      [](double, double q) { return std::cos(q); }, 1.0);
}

StructuredPlant beam_2dof(const BeamParameters& p) {
  if (!(p.m1 > 0.0) || !(p.m2 > 0.0)) fail(ErrorKind::InvalidArgument, "beam_2dof: masses must be > 0");
  if (!(p.omega_pe > 0.0)) fail(ErrorKind::InvalidArgument, "beam_2dof: omega_pe must be > 0");
  StructuredModel m;
  m.A.resize(4, 4);
  m.A << 0.0, 1.0, 0.0, 0.0,
      -(p.k01_lin + p.k12) / p.m1, -(p.c01 + p.c12) / p.m1, p.k12 / p.m1, p.c12 / p.m1,
      0.0, 0.0, 0.0, 1.0,
      p.k12 / p.m2, p.c12 / p.m2, -(p.k02 + p.k12) / p.m2, -(p.c02 + p.c12) / p.m2;
  if (!numkit::hurwitz_check(m.A)) fail(ErrorKind::InvalidArgument, "beam_2dof: A is not Hurwitz");
  m.b = RealVector::Unit(4, 1);
  m.m = 3;
  const double W = p.omega_pe;
  m.Q = [W](double t, VecIn q, VecOut out) {
    const double c = std::cos(W * t);
    const double q3 = q(0) * q(0) * q(0);
    out(0) = q3;
    out(1) = q(0) * c;
    out(2) = q3 * c;
  };
  m.Q_q = [W](double t, VecIn q, Eigen::Ref<RealMatrix> J) {
    const double c = std::cos(W * t);
    J.setZero();
    J(0, 0) = 3.0 * q(0) * q(0);
    J(1, 0) = c;
    J(2, 0) = 3.0 * q(0) * q(0) * c;
  };
  m.sigma = [](double) { return 0.0; };
  m.omega = W;
  RealVector theta(3);
  theta << p.k01_nlin, p.kpe_lin, p.kpe_nlin;
  theta *= -1.0 / p.m1;
  return StructuredPlant("beam_2dof", std::move(m), std::move(theta));
}

Disturbance sine_disturbance(int n, int direction, double amplitude, double frequency, bool periodic) {
  if (direction < 0 || direction >= n) fail(ErrorKind::InvalidArgument, "disturbance: direction out of range");
  Disturbance d;
  d.h = [direction, amplitude, frequency](double t, VecIn, VecOut out) {
    out.setZero();
    out(direction) = amplitude * std::sin(frequency * t);
  };
  d.h_b = std::abs(amplitude);
  d.periodic = periodic;
  return d;
}

Disturbance harmonic_disturbance(int n, int direction, double amplitude, double omega) {
  if (direction < 0 || direction >= n) fail(ErrorKind::InvalidArgument, "disturbance: direction out of range");
  Disturbance d;
  d.h = [direction, amplitude, omega](double t, VecIn, VecOut out) {
    out.setZero();
    out(direction) = amplitude * std::cos(2.0 * omega * t);
  };
  d.h_b = std::abs(amplitude);
  d.periodic = true;
  return d;
}

ForcingG true_forcing_g(const Plant& p, const signal::VectorFourierSeries& r) {
  const double T = period(p);
  if (std::abs(r.period() - T) > 1e-12 * T) {
    fail(ErrorKind::InvalidArgument, "true_forcing_g: reference period differs from plant period");
  }
  if (static_cast<int>(r.dim()) != state_dim(p)) fail(ErrorKind::InvalidArgument, "true_forcing_g: dimension mismatch");
  ForcingG out;
  if (const auto* s = std::get_if<StructuredPlant>(&p)) {
    const RealVector theta = s->theta();
    const StructuredModel model = s->model();
    out.g = [theta, model, r](double t) {
      const RealVector rv = r.eval(t);
      RealVector Qr(model.m);
      model.Q(t, rv, Qr);
      return RealVector(-r.eval_derivative(t) + model.A * rv + model.b * (theta.dot(Qr) + model.sigma(t)));
    };
  } else {
    const ScalarPlant sp = std::get<ScalarPlant>(p);
    const double k = sp.k_true();
    out.g = [sp, k, r](double t) {
      const double rv = r[0].eval(t);
      const auto& m = sp.model();
      return RealVector::Constant(1, (m.a + m.b * k) * rv + m.b * (sp.f(t, rv) + m.sigma(t)) - r[0].eval_derivative(t));
    };
  }
  for (int j = 0; j < 256; ++j) out.sup_norm = std::max(out.sup_norm, out.g(j * T / 256.0).norm());
  out.identically_zero = out.sup_norm < 1e-8;
  return out;
}

}  // namespace orbit_tracer::plant
