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

#include "orbit_tracer/control.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/numkit.hpp"

namespace orbit_tracer::control {

using plant::Plant;
using plant::ScalarPlant;
using plant::StructuredModel;
using plant::StructuredPlant;

RealVector proj(const RealVector& theta_hat, const RealVector& y, double R, double eps) {
  if (!(R > 0.0) || !(eps > 0.0)) fail(ErrorKind::InvalidArgument, "proj: R and eps must be > 0");
  if (theta_hat.size() != y.size()) fail(ErrorKind::InvalidArgument, "proj: dimension mismatch");
  const double nrm2 = theta_hat.squaredNorm();
  const double f = ((1.0 + eps) * nrm2 - R * R) / (eps * R * R);
  if (f <= 0.0) return y;
  // grad f is parallel to theta_hat; only its direction matters below.
  const double radial = theta_hat.dot(y);
  if (radial <= 0.0) return y;
  return y - f * (radial / nrm2) * theta_hat;
}

MracState MracState::make(const RealMatrix& A, const RealMatrix& S, double Gamma,
                          std::optional<ProjectionBall> projection, RealVector theta_hat, RealVector x_m) {
  if (!(Gamma > 0.0)) fail(ErrorKind::InvalidArgument, "mrac: Gamma must be > 0");
  if (projection && (!(projection->R > 0.0) || !(projection->eps > 0.0))) {
    fail(ErrorKind::InvalidArgument, "mrac: projection R and eps must be > 0");
  }
  MracState s;
  s.P = numkit::solve_lyapunov(A, S);
  s.S = S;
  s.Gamma = Gamma;
  s.projection = projection;
  s.theta_hat = std::move(theta_hat);
  s.x_m = std::move(x_m);
  return s;
}

double proportional_u(const RealVector& k, const StructuredModel& model, double t, VecIn q, VecIn r) {
  if (k.size() != model.m) fail(ErrorKind::InvalidArgument, "proportional: gain length must equal m");
  return -k.dot(model.eval_Q(t, q) - model.eval_Q(t, r));
}

double mrac_u(const MracState& s, const StructuredModel& model, double t, VecIn q, VecIn r) {
  return proportional_u(s.theta_hat, model, t, q, r);
}

MracRates mrac_rates(const MracState& s, const StructuredModel& model, double t, VecIn q, const ReferenceSample& ref) {
  const RealVector Qq = model.eval_Q(t, q);
  const RealVector Qr = model.eval_Q(t, ref.r);
  const RealVector e = s.x_m - (q - ref.r);
  const double ePb = e.dot(s.P * model.b);
  RealVector y = -ePb * Qq;
  if (s.projection) y = proj(s.theta_hat, y, s.projection->R, s.projection->eps);
  MracRates out;
  out.dtheta_hat = s.Gamma * y;
  out.dx_m = model.A * s.x_m + model.b * (s.theta_hat.dot(Qr) + model.sigma(t)) - ref.r_dot + model.A * ref.r;
  return out;
}

double scalar_rates(const ScalarAdaptiveState& s, double x, double b_s) { return s.Gamma * b_s * x * x; }

// ---------------------------------------------------------------------------

struct ClosedLoop::Impl {
  Impl(Plant p, ControllerSpec c, signal::VectorFourierSeries r)
      : plant(std::move(p)), controller(std::move(c)), reference(std::move(r)) {}
  Plant plant;
  ControllerSpec controller;
  signal::VectorFourierSeries reference;
  StateLayout layout;
  // MRAC
  RealMatrix A, P, S;
  RealVector b, Pb;
  double Gamma = 1.0;
  std::optional<ProjectionBall> projection;
  RealVector adapt0;
};

namespace {

struct Scratch {
  RealVector r, rd, Qq, Qr, x, e, y;
};

}  // namespace

ClosedLoop assemble_closed_loop(const Plant& plant, const ControllerSpec& controller,
                                const signal::VectorFourierSeries& r) {
  auto impl = std::make_shared<ClosedLoop::Impl>(plant, controller, r);
  impl->reference = r;
  const int n = plant::state_dim(plant);
  if (static_cast<int>(r.dim()) != n) fail(ErrorKind::InvalidArgument, "closed loop: reference dimension mismatch");
  const double T = plant::period(plant);
  if (std::abs(r.period() - T) > 1e-12 * T) {
    fail(ErrorKind::InvalidArgument, "closed loop: reference period differs from plant period");
  }
  impl->layout.n = n;
  const auto* sp = std::get_if<StructuredPlant>(&plant);

  if (const auto* p = std::get_if<ProportionalSpec>(&controller)) {
    if (!sp) fail(ErrorKind::InvalidArgument, "closed loop: proportional control needs a structured plant");
    if (p->k.size() != sp->m()) fail(ErrorKind::InvalidArgument, "closed loop: gain length must equal m");
  } else if (const auto* m = std::get_if<MracSpec>(&controller)) {
    if (!sp) fail(ErrorKind::InvalidArgument, "closed loop: MRAC needs a structured plant");
    const auto& model = sp->model();
    const RealMatrix S = m->S.value_or(RealMatrix::Identity(n, n));
    if (S.rows() != n || S.cols() != n) fail(ErrorKind::InvalidArgument, "closed loop: S must be n x n");
    const RealVector th0 = m->theta_hat0.value_or(RealVector::Zero(model.m));
    if (th0.size() != model.m) fail(ErrorKind::InvalidArgument, "closed loop: theta_hat0 length must equal m");
    const MracState st = MracState::make(model.A, S, m->Gamma, m->projection, th0, RealVector::Zero(n));
    impl->A = model.A;
    impl->b = model.b;
    impl->P = st.P;
    impl->S = S;
    impl->Pb = st.P * model.b;
    impl->Gamma = m->Gamma;
    impl->projection = m->projection;
    impl->adapt0 = th0;
    impl->layout.n_xm = n;
    impl->layout.n_adapt = model.m;
  } else if (const auto* s = std::get_if<ScalarAdaptiveSpec>(&controller)) {
    if (sp) fail(ErrorKind::InvalidArgument, "closed loop: scalar adaptive control needs a scalar plant");
    if (!(s->Gamma > 0.0)) fail(ErrorKind::InvalidArgument, "closed loop: Gamma must be > 0");
    impl->Gamma = s->Gamma;
    impl->adapt0 = RealVector::Constant(1, s->k_hat0);
    impl->layout.n_adapt = 1;
  }
  ClosedLoop loop;
  loop.impl_ = std::move(impl);
  return loop;
}

const StateLayout& ClosedLoop::layout() const { return impl_->layout; }
const Plant& ClosedLoop::plant() const { return impl_->plant; }
const ControllerSpec& ClosedLoop::controller() const { return impl_->controller; }
const signal::VectorFourierSeries& ClosedLoop::reference() const { return impl_->reference; }
bool ClosedLoop::is_mrac() const { return std::holds_alternative<MracSpec>(impl_->controller); }
bool ClosedLoop::is_scalar_adaptive() const { return std::holds_alternative<ScalarAdaptiveSpec>(impl_->controller); }
const RealMatrix& ClosedLoop::P() const { return impl_->P; }
double ClosedLoop::Gamma() const { return impl_->Gamma; }

ode::Field ClosedLoop::field() const {
  auto impl = impl_;
  const int n = impl->layout.n;
  auto scratch = std::make_shared<Scratch>();
  scratch->r.resize(n);
  scratch->rd.resize(n);
  scratch->x.resize(n);
  scratch->e.resize(n);

  if (const auto* sp = std::get_if<StructuredPlant>(&impl->plant)) {
    const int m = sp->m();
    scratch->Qq.resize(m);
    scratch->Qr.resize(m);
    scratch->y.resize(m);
    if (std::holds_alternative<MracSpec>(impl->controller)) {
      return [impl, sp, scratch, n, m](double t, ode::StateRef z, ode::DerivRef dz) {
        Scratch& w = *scratch;
        const auto& model = sp->model();
        auto q = z.segment(0, n);
        auto xm = z.segment(n, n);
        auto th = z.segment(2 * n, m);
        impl->reference.eval(t, w.r, w.rd);
        model.Q(t, q, w.Qq);
        model.Q(t, w.r, w.Qr);
        const double u = -th.dot(w.Qq - w.Qr);
        sp->respond(t, q, u, dz.segment(0, n));
        w.e = xm - (q - w.r);
        w.y = -w.e.dot(impl->Pb) * w.Qq;
        if (impl->projection) w.y = proj(th, w.y, impl->projection->R, impl->projection->eps);
        dz.segment(2 * n, m) = impl->Gamma * w.y;
        dz.segment(n, n).noalias() = impl->A * (xm + w.r);
        dz.segment(n, n) += impl->b * (th.dot(w.Qr) + model.sigma(t)) - w.rd;
      };
    }
    if (const auto* p = std::get_if<ProportionalSpec>(&impl->controller)) {
      const RealVector k = p->k;
      return [impl, sp, scratch, k, n](double t, ode::StateRef z, ode::DerivRef dz) {
        Scratch& w = *scratch;
        const auto& model = sp->model();
        auto q = z.segment(0, n);
        impl->reference.eval(t, w.r, w.rd);
        model.Q(t, q, w.Qq);
        model.Q(t, w.r, w.Qr);
        sp->respond(t, q, -k.dot(w.Qq - w.Qr), dz);
      };
    }
    return [sp](double t, ode::StateRef z, ode::DerivRef dz) { sp->respond(t, z, 0.0, dz); };
  }

  const auto* sc = std::get_if<ScalarPlant>(&impl->plant);
  if (std::holds_alternative<ScalarAdaptiveSpec>(impl->controller)) {
    return [impl, sc, scratch](double t, ode::StateRef z, ode::DerivRef dz) {
      Scratch& w = *scratch;
      impl->reference.eval(t, w.r, w.rd);
      const double x = z(0) - w.r(0);
      const double k_hat = z(1);
      dz(0) = sc->respond(t, z(0), -k_hat * x);
      dz(1) = scalar_rates({k_hat, impl->Gamma}, x, sc->model().b);
    };
  }
  return [sc](double t, ode::StateRef z, ode::DerivRef dz) { dz(0) = sc->respond(t, z(0), 0.0); };
}

RealVector ClosedLoop::initial_state(VecIn q0, double t0) const {
  const auto& L = impl_->layout;
  if (q0.size() != L.n) fail(ErrorKind::InvalidArgument, "closed loop: initial state dimension mismatch");
  RealVector z = RealVector::Zero(L.size());
  z.head(L.n) = q0;
  if (L.n_adapt > 0) z.tail(L.n_adapt) = impl_->adapt0;
  reinit_reference_model(z, t0);
  return z;
}

void ClosedLoop::reinit_reference_model(RealVector& z, double t) const {
  const auto& L = impl_->layout;
  if (z.size() != L.size()) fail(ErrorKind::InvalidArgument, "closed loop: state dimension mismatch");
  if (L.n_xm > 0) z.segment(L.xm_offset(), L.n_xm) = z.head(L.n) - impl_->reference.eval(t);
}

double ClosedLoop::control(double t, VecIn z) const {
  const auto& L = impl_->layout;
  const RealVector r = impl_->reference.eval(t);
  if (const auto* sp = std::get_if<StructuredPlant>(&impl_->plant)) {
    if (std::holds_alternative<MracSpec>(impl_->controller)) {
      return proportional_u(z.segment(L.adapt_offset(), L.n_adapt), sp->model(), t, z.head(L.n), r);
    }
    if (const auto* p = std::get_if<ProportionalSpec>(&impl_->controller)) {
      return proportional_u(p->k, sp->model(), t, z.head(L.n), r);
    }
    return 0.0;
  }
  if (std::holds_alternative<ScalarAdaptiveSpec>(impl_->controller)) return -z(1) * (z(0) - r(0));
  return 0.0;
}

RealVector ClosedLoop::prediction_error(double t, VecIn z) const {
  const auto& L = impl_->layout;
  if (L.n_xm == 0) return {};
  return z.segment(L.xm_offset(), L.n_xm) - (z.head(L.n) - impl_->reference.eval(t));
}

ClosedLoopRun simulate(const ClosedLoop& loop, const RealVector& z0, double t0, double t1, double sample_dt,
                       const ode::IntegratorConfig& cfg) {
  if (!(sample_dt > 0.0)) fail(ErrorKind::InvalidArgument, "simulate: sample_dt must be > 0");
  if (z0.size() != loop.layout().size()) fail(ErrorKind::InvalidArgument, "simulate: state dimension mismatch");
  ClosedLoopRun run;
  run.layout = loop.layout();
  run.trajectory = ode::integrate(loop.field(), z0, t0, t1, cfg);
  const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / sample_dt + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = std::min(t1, t0 + static_cast<double>(i) * sample_dt);
    run.t.push_back(t);
    run.z.push_back(run.trajectory.at(t));
  }
  if (run.t.back() < t1) {
    run.t.push_back(t1);
    run.z.push_back(run.trajectory.back());
  }
  for (std::size_t i = 0; i < run.t.size(); ++i) {
    run.u.push_back(loop.control(run.t[i], run.z[i]));
    if (run.layout.n_xm > 0) run.e_norm.push_back(loop.prediction_error(run.t[i], run.z[i]).norm());
  }
  return run;
}

void ClosedLoopRun::write_csv(std::ostream& os) const {
  const bool scalar_adapt = layout.n_xm == 0 && layout.n_adapt == 1;
  os << "t";
  for (int i = 0; i < layout.n; ++i) os << ",q" << i + 1;
  for (int i = 0; i < layout.n_xm; ++i) os << ",xm" << i + 1;
  if (scalar_adapt) {
    os << ",k_hat";
  } else {
    for (int i = 0; i < layout.n_adapt; ++i) os << ",theta_hat" << i + 1;
  }
  os << ",u";
  const bool diag = !e_norm.empty() && V.size() == t.size();
  if (diag) os << ",e_norm,V";
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << t[k];
    for (Eigen::Index i = 0; i < z[k].size(); ++i) os << "," << z[k](i);
    os << "," << u[k];
    if (diag) os << "," << e_norm[k] << "," << V[k];
    os << "\n";
  }
}

LyapunovReport lyapunov_diagnostics(ClosedLoopRun& run, const ClosedLoop& loop, const RealVector& theta,
                                    double drift_tol, std::optional<double> R) {
  if (!loop.is_mrac()) fail(ErrorKind::InvalidArgument, "lyapunov_diagnostics: needs a structured MRAC run");
  const auto& L = run.layout;
  if (theta.size() != L.n_adapt) fail(ErrorKind::InvalidArgument, "lyapunov_diagnostics: theta length mismatch");
  LyapunovReport rep;
  const RealMatrix& P = loop.P();
  const double Gamma = loop.Gamma();
  rep.lambda_min_P = numkit::eig_sym(P).front();
  rep.R = R.value_or(std::max(run.z.front().segment(L.adapt_offset(), L.n_adapt).norm(), theta.norm()));
  rep.e_bound = 2.0 * rep.R / std::sqrt(rep.lambda_min_P * Gamma);
  rep.theta_bound = 2.0 * rep.R;
  rep.V_nonincreasing = true;
  rep.e_within_bound = true;
  rep.theta_within_bound = true;
  for (std::size_t k = 0; k < run.t.size(); ++k) {
    const RealVector e = loop.prediction_error(run.t[k], run.z[k]);
    const RealVector dth = run.z[k].segment(L.adapt_offset(), L.n_adapt) - theta;
    const double V = e.dot(P * e) + dth.squaredNorm() / Gamma;
    rep.V.push_back(V);
    rep.e_norm.push_back(e.norm());
    rep.theta_err.push_back(dth.norm());
    if (k > 0) {
      const double inc = V - rep.V[k - 1];
      rep.max_V_increase = std::max(rep.max_V_increase, inc);
      if (inc > drift_tol) rep.V_nonincreasing = false;
    }
    if (e.norm() > rep.e_bound) rep.e_within_bound = false;
    if (dth.norm() > rep.theta_bound) rep.theta_within_bound = false;
  }
  run.V = rep.V;
  run.theta_err = rep.theta_err;
  if (run.e_norm.size() != run.t.size()) run.e_norm = rep.e_norm;
  return rep;
}

}  // namespace orbit_tracer::control
