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

#include "orbit_tracer/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "orbit_tracer/error.hpp"
#include "orbit_tracer/numkit.hpp"

namespace orbit_tracer::continuation {

using plant::Plant;

void ExperimentProtocol::validate() const {
  if (n_transient_periods < 1) fail(ErrorKind::InvalidArgument, "protocol.n_transient_periods must be >= 1");
  if (K < 1) fail(ErrorKind::InvalidArgument, "protocol.K must be >= 1");
  if (n_samples < 4 * K + 4) fail(ErrorKind::InvalidArgument, "protocol.n_samples must be >= 4K+4");
  if (!(conv_tol > 0.0)) fail(ErrorKind::InvalidArgument, "protocol.conv_tol must be > 0");
  integrator.validate();
}

void ChartSettings::validate() const {
  if (!(h_min > 0.0)) fail(ErrorKind::InvalidArgument, "continuation.h_min must be > 0");
  if (!(h_min <= h0 && h0 <= h_max)) fail(ErrorKind::InvalidArgument, "continuation.h0 must lie in [h_min, h_max]");
  if (!(grow >= 1.0)) fail(ErrorKind::InvalidArgument, "continuation.grow must be >= 1");
  if (!(shrink > 0.0 && shrink < 1.0)) fail(ErrorKind::InvalidArgument, "continuation.shrink must lie in (0, 1)");
  if (newton_cap < 1) fail(ErrorKind::InvalidArgument, "continuation.newton_cap must be >= 1");
  if (!(fd_step > 0.0)) fail(ErrorKind::InvalidArgument, "continuation.fd_step must be > 0");
  if (max_points < 1) fail(ErrorKind::InvalidArgument, "continuation.max_points must be >= 1");
  if (threads < 1) fail(ErrorKind::InvalidArgument, "continuation.threads must be >= 1");
}

RealVector pack_unknowns(const signal::FourierSeries& generator) {
  const RealVector p = generator.packed();
  RealVector xi(p.size() + 1);
  xi << p, generator.omega();
  return xi;
}

signal::FourierSeries generator_of(const RealVector& xi) {
  if (xi.size() < 4 || xi.size() % 2 != 0) fail(ErrorKind::InvalidArgument, "xi: size must be 2K+2");
  const double w = omega_of(xi);
  if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorKind::InvalidArgument, "xi: omega must be > 0");
  return signal::FourierSeries::from_packed(w, xi.head(xi.size() - 1));
}

double reference_amplitude(const signal::VectorFourierSeries& r, int samples) {
  const double T = r.period();
  double m = 0.0;
  for (int j = 0; j < samples; ++j) m = std::max(m, std::abs(r[0].eval(j * T / samples)));
  return m;
}

// Experiment -----------------------------------------------------------------

Experiment::Experiment(plant::PlantFamily family, control::ControllerSpec controller, ExperimentProtocol protocol)
    : family_(std::move(family)), controller_(std::move(controller)), protocol_(std::move(protocol)) {
  protocol_.validate();
  if (!family_) fail(ErrorKind::InvalidArgument, "experiment: empty plant family");
}

signal::VectorFourierSeries Experiment::reference(const RealVector& xi) const {
  const auto v = generator_of(xi);
  if (v.order() != protocol_.K) fail(ErrorKind::InvalidArgument, "xi: order differs from protocol.K");
  const Plant p = family_(v.omega());
  return signal::synthesize_reference(v, plant::known_A(p), plant::known_b(p));
}

ResidualResult Experiment::residual(const RealVector& xi, const std::optional<RealVector>& warm) const {
  const auto v = generator_of(xi);
  if (v.order() != protocol_.K) fail(ErrorKind::InvalidArgument, "xi: order differs from protocol.K");
  const double w = v.omega();
  const Plant p = family_(w);
  const auto r = signal::synthesize_reference(v, plant::known_A(p), plant::known_b(p));
  const auto loop = control::assemble_closed_loop(p, controller_, r);
  const auto& L = loop.layout();

  if (warm && warm->size() != L.size()) fail(ErrorKind::InvalidArgument, "residual: warm state dimension mismatch");
  RealVector z;
  if (warm && protocol_.warm_start == WarmStart::Chain) {
    z = *warm;
    loop.reinit_reference_model(z, 0.0);
  } else {
    z = loop.initial_state(RealVector::Zero(L.n), 0.0);
    if (warm && L.n_adapt > 0 && protocol_.adaptation_reset == AdaptationReset::CarryThetaHat) {
      z.segment(L.adapt_offset(), L.n_adapt) = warm->segment(L.adapt_offset(), L.n_adapt);
    }
  }
  if (L.n_adapt > 0 && protocol_.adaptation_reset == AdaptationReset::ResetKHatZero) {
    const RealVector z0 = loop.initial_state(z.head(L.n), 0.0);
    z.segment(L.adapt_offset(), L.n_adapt) = z0.segment(L.adapt_offset(), L.n_adapt);
  }

  const double T = 2.0 * M_PI / w;
  const double t_sample = protocol_.n_transient_periods * T;
  ode::Trajectory traj;
  try {
    traj = ode::integrate(loop.field(), z, 0.0, t_sample + T, protocol_.integrator);
  } catch (const Error& e) {
    std::ostringstream os;
    os << "residual at omega=" << std::setprecision(10) << w << " (|xi|=" << xi.norm() << "): " << e.what();
    throw Error(e.kind(), os.str());
  }

  const int N = protocol_.n_samples;
  std::vector<double> u(N);
  RealVector zs(L.size());
  for (int j = 0; j < N; ++j) {
    const double t = t_sample + j * T / N;
    traj.at(t, zs);
    u[j] = loop.control(t, zs);
  }
  ResidualResult out;
  out.F = signal::dft_truncate(u, protocol_.K, w, t_sample).packed();
  out.terminal = traj.back();
  if (!numkit::all_finite(out.F) || !numkit::all_finite(out.terminal)) {
    fail(ErrorKind::Numerical, "residual: non-finite entries");
  }
  return out;
}

ResidualFn Experiment::residual_fn() const {
  return [self = *this](const RealVector& xi, const std::optional<RealVector>& warm) {
    return self.residual(xi, warm);
  };
}

ResidualResult steady_control_residual(const plant::PlantFamily& family, const control::ControllerSpec& controller,
                                       const RealVector& xi, const ExperimentProtocol& protocol,
                                       const std::optional<RealVector>& warm) {
  return Experiment(family, controller, protocol).residual(xi, warm);
}

// Jacobian and corrector -----------------------------------------------------

namespace {

RealMatrix fd_columns(const ResidualFn& residual, const RealVector& xi, const RealVector& F0, double fd_step,
                      const std::optional<RealVector>& anchor, int threads) {
  const int cols = static_cast<int>(xi.size());
  RealMatrix J(F0.size(), cols);
  std::vector<std::exception_ptr> errors(cols);
  auto column = [&](int j) {
    try {
      RealVector x = xi;
      x(j) += fd_step;
      const auto res = residual(x, anchor);
      J.col(j) = (res.F - F0) / fd_step;
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  const int workers = std::clamp(threads, 1, cols);
  if (workers == 1) {
    for (int j = 0; j < cols; ++j) column(j);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int j = next++; j < cols; j = next++) column(j);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return J;
}

}  // namespace

JacobianResult fd_jacobian(const ResidualFn& residual, const RealVector& xi, double fd_step,
                           const std::optional<RealVector>& anchor, int threads) {
  if (!(fd_step > 0.0)) fail(ErrorKind::InvalidArgument, "fd_jacobian: fd_step must be > 0");
  JacobianResult out;
  auto base = residual(xi, anchor);
  out.F_base = std::move(base.F);
  out.terminal = std::move(base.terminal);
  out.J = fd_columns(residual, xi, out.F_base, fd_step, anchor, threads);
  return out;
}

RealVector tangent_from_jacobian(const RealMatrix& J, const RealVector& previous) {
  const auto m = J.rows();
  if (J.cols() != m + 1 || previous.size() != m + 1) fail(ErrorKind::InvalidArgument, "tangent: shape mismatch");
  RealMatrix M(m + 1, m + 1);
  M << J, previous.transpose();
  RealVector rhs = RealVector::Zero(m + 1);
  rhs(m) = 1.0;
  RealVector t = numkit::solve_real(M, rhs);
  t.normalize();
  if (t.dot(previous) < 0.0) t = -t;
  return t;
}

namespace {

struct CorrectorRun {
  NewtonOutcome outcome;
  std::optional<RealMatrix> last_J;
};

CorrectorRun correct(const RealVector& xi_p, const RealVector& tangent, const ResidualFn& residual,
                     const ChartSettings& settings, double conv_tol, const std::optional<RealVector>& warm) {
  CorrectorRun run;
  auto& out = run.outcome;
  const auto n = xi_p.size();
  if (tangent.size() != n) fail(ErrorKind::InvalidArgument, "newton: tangent size mismatch");
  if (std::abs(tangent.norm() - 1.0) > 1e-8) fail(ErrorKind::InvalidArgument, "newton: tangent must be unit norm");
  RealVector xi = xi_p;
  std::optional<RealVector> chain = warm;
  try {
    for (int it = 0;; ++it) {
      if (!(omega_of(xi) > 0.0)) {
        out.reason = "omega left the positive axis";
        break;
      }
      auto base = residual(xi, chain);
      out.xi = xi;
      out.F = base.F;
      out.residual_norm = base.F.norm();
      out.terminal = base.terminal;
      out.iterations = it;
      if (out.residual_norm <= conv_tol) {
        out.converged = true;
        break;
      }
      if (it >= settings.newton_cap) {
        out.reason = "newton cap reached";
        break;
      }
      const RealMatrix J = fd_columns(residual, xi, base.F, settings.fd_step, base.terminal, settings.threads);
      RealMatrix M(n, n);
      M << J, tangent.transpose();
      RealVector rhs(n);
      rhs << -base.F, -tangent.dot(xi - xi_p);
      const RealVector delta = numkit::solve_real(M, rhs);
      if (!numkit::all_finite(delta)) {
        out.reason = "non-finite update";
        break;
      }
      run.last_J = J;
      xi += delta;
      chain = base.terminal;
    }
  } catch (const Error& e) {
    out.converged = false;
    out.reason = e.what();
  }
  return run;
}

BranchPoint make_point(const Experiment& ex, const NewtonOutcome& out, const RealVector& tangent, double step) {
  BranchPoint p;
  p.xi = out.xi;
  p.tangent = tangent;
  p.residual_norm = out.residual_norm;
  p.amplitude = reference_amplitude(ex.reference(out.xi));
  p.terminal_state = out.terminal;
  p.newton_iters = out.iterations;
  p.step = step;
  return p;
}

RealVector tangent_after(const ResidualFn& residual, const CorrectorRun& run, const RealVector& previous,
                         const ChartSettings& settings) {
  if (run.last_J) return tangent_from_jacobian(*run.last_J, previous);
  const auto& o = run.outcome;
  const RealMatrix J = fd_columns(residual, o.xi, o.F, settings.fd_step, o.terminal, settings.threads);
  return tangent_from_jacobian(J, previous);
}

}  // namespace

NewtonOutcome newton_correct(const RealVector& xi_p, const RealVector& tangent, const ResidualFn& residual,
                             const ChartSettings& settings, double conv_tol, const std::optional<RealVector>& warm) {
  return correct(xi_p, tangent, residual, settings, conv_tol, warm).outcome;
}

BranchPoint converge_initial_point(const Experiment& experiment, const RealVector& xi_guess,
                                   const ChartSettings& settings, const std::optional<RealVector>& warm) {
  settings.validate();
  const auto residual = experiment.residual_fn();
  RealVector e_w = RealVector::Zero(xi_guess.size());
  e_w(e_w.size() - 1) = 1.0;
  const auto run = correct(xi_guess, e_w, residual, settings, experiment.protocol().conv_tol, warm);
  if (!run.outcome.converged) {
    std::ostringstream os;
    os << "initial point at omega=" << omega_of(xi_guess) << " did not converge: " << run.outcome.reason
       << " (|F|=" << run.outcome.residual_norm << ")";
    fail(ErrorKind::NonConvergence, os.str());
  }
  const RealVector t = tangent_after(residual, run, e_w, settings);
  return make_point(experiment, run.outcome, t, 0.0);
}

// Branch tracing ---------------------------------------------------------------

std::vector<std::size_t> Branch::folds() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i].tangent(points[i].tangent.size() - 1);
    const double b = points[i + 1].tangent(points[i + 1].tangent.size() - 1);
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) out.push_back(i);
  }
  return out;
}

namespace {

void put(std::ostream& os, double x) {
  if (std::isnan(x)) {
    os << "nan";
  } else {
    os << x;
  }
}

}  // namespace

void Branch::write_csv(std::ostream& os, int K) const {
  os << "idx,omega,amplitude,residual_norm,newton_iters,step,floq_re1,floq_im1,floq_re2,floq_im2,coeff_a0";
  for (int k = 1; k <= K; ++k) os << ",coeff_a" << k;
  for (int k = 1; k <= K; ++k) os << ",coeff_b" << k;
  os << '\n';
  const auto old = os.precision(17);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    os << i << ',';
    put(os, p.omega());
    os << ',';
    put(os, p.amplitude);
    os << ',';
    put(os, p.residual_norm);
    os << ',' << p.newton_iters << ',';
    put(os, p.step);
    for (std::size_t m = 0; m < 2; ++m) {
      const Complex mu = m < p.floquet.size() ? p.floquet[m] : Complex(nan, nan);
      os << ',';
      put(os, mu.real());
      os << ',';
      put(os, mu.imag());
    }
    for (int j = 0; j < 2 * K + 1; ++j) {
      os << ',';
      put(os, p.xi(j));
    }
    os << '\n';
  }
  os.precision(old);
}

Branch continue_branch(const Experiment& experiment, const BranchPoint& start, std::pair<double, double> omega_range,
                       const ChartSettings& settings, Direction direction) {
  settings.validate();
  if (!(omega_range.first < omega_range.second)) fail(ErrorKind::InvalidArgument, "omega_range must be increasing");
  if (start.xi.size() != experiment.unknowns()) fail(ErrorKind::InvalidArgument, "start point: size mismatch");
  const auto residual = experiment.residual_fn();
  const double tol = experiment.protocol().conv_tol;

  auto trace = [&](double sign, std::string& status) {
    std::vector<BranchPoint> pts;
    BranchPoint cur = start;
    cur.tangent = sign * start.tangent;
    double h = settings.h0;
    for (;;) {
      if (static_cast<int>(pts.size()) + 1 >= settings.max_points) {
        status = "budget";
        break;
      }
      const RealVector xi_p = cur.xi + h * cur.tangent;
      const auto run = correct(xi_p, cur.tangent, residual, settings, tol, cur.terminal_state);
      const auto& o = run.outcome;
      if (!o.converged || (o.xi - cur.xi).norm() > 2.0 * h) {
        h *= settings.shrink;
        if (h < settings.h_min) {
          status = "stalled";
          break;
        }
        continue;
      }
      RealVector t;
      try {
        t = tangent_after(residual, run, cur.tangent, settings);
      } catch (const Error&) {
        h *= settings.shrink;
        if (h < settings.h_min) {
          status = "stalled";
          break;
        }
        continue;
      }
      pts.push_back(make_point(experiment, o, t, h));
      cur = pts.back();
      if (o.iterations <= settings.grow_below_iters) h = std::min(h * settings.grow, settings.h_max);
      const double w = cur.omega();
      if (w < omega_range.first || w > omega_range.second) {
        status = "range";
        break;
      }
    }
    return pts;
  };

  Branch branch;
  std::string s_down, s_up;
  if (direction == Direction::Up) {
    branch.points.push_back(start);
    auto up = trace(1.0, s_up);
    branch.points.insert(branch.points.end(), up.begin(), up.end());
    branch.status = s_up;
  } else if (direction == Direction::Down) {
    branch.points.push_back(start);
    auto down = trace(-1.0, s_down);
    branch.points.insert(branch.points.end(), down.begin(), down.end());
    branch.status = s_down;
  } else {
    auto down = trace(-1.0, s_down);
    for (auto it = down.rbegin(); it != down.rend(); ++it) {
      branch.points.push_back(*it);
      branch.points.back().tangent = -it->tangent;
    }
    branch.points.push_back(start);
    auto up = trace(1.0, s_up);
    branch.points.insert(branch.points.end(), up.begin(), up.end());
    branch.status = s_down + "/" + s_up;
  }
  return branch;
}

// Open-loop tools --------------------------------------------------------------

namespace {

ode::Field open_loop_field(const Plant& p) {
  return [p](double t, ode::StateRef y, ode::DerivRef dy) { plant::respond(p, t, y, 0.0, dy); };
}

}  // namespace

RealVector initial_guess_from_simulation(const Plant& p, int K, int settle_periods, const ode::IntegratorConfig& cfg) {
  if (settle_periods < 1) fail(ErrorKind::InvalidArgument, "initial guess: settle_periods must be >= 1");
  const int n = plant::state_dim(p);
  const double T = plant::period(p);
  const double w = plant::forcing_omega(p);
  const auto traj = ode::integrate(open_loop_field(p), RealVector::Zero(n), 0.0, (settle_periods + 1) * T, cfg);
  const int N = std::max(1024, 4 * K + 4);
  std::vector<signal::FourierSeries> comps;
  std::vector<double> s(N);
  RealVector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < N; ++j) {
      traj.at(settle_periods * T + j * T / N, y);
      s[j] = y(i);
    }
    comps.push_back(signal::dft_truncate(s, K, w, settle_periods * T));
  }
  const signal::VectorFourierSeries r(std::move(comps));
  return pack_unknowns(signal::generator_from_reference(r, plant::known_A(p), plant::known_b(p)));
}

std::vector<SweepPoint> open_loop_sweep(const plant::PlantFamily& family, const std::vector<double>& omega_grid,
                                        int settle_periods, const RealVector& q0, const ode::IntegratorConfig& cfg,
                                        double converged_tol) {
  if (omega_grid.empty()) fail(ErrorKind::InvalidArgument, "sweep: empty grid");
  if (settle_periods < 2) fail(ErrorKind::InvalidArgument, "sweep: settle_periods must be >= 2");
  if (omega_grid.size() > 1) {
    const bool up = omega_grid[1] > omega_grid[0];
    for (std::size_t i = 1; i < omega_grid.size(); ++i) {
      if (up ? !(omega_grid[i] > omega_grid[i - 1]) : !(omega_grid[i] < omega_grid[i - 1])) {
        fail(ErrorKind::InvalidArgument, "sweep: grid must be strictly monotone");
      }
    }
  }
  std::vector<SweepPoint> out;
  RealVector state = q0;
  const int N = 1024;
  for (const double w : omega_grid) {
    if (!(w > 0.0)) fail(ErrorKind::InvalidArgument, "sweep: omega must be > 0");
    const Plant p = family(w);
    if (state.size() != plant::state_dim(p)) fail(ErrorKind::InvalidArgument, "sweep: q0 dimension mismatch");
    const double T = plant::period(p);
    const auto traj = ode::integrate(open_loop_field(p), state, 0.0, (settle_periods + 1) * T, cfg);
    SweepPoint sp;
    sp.omega = w;
    RealVector y(state.size());
    for (int j = 0; j < N; ++j) {
      traj.at(settle_periods * T + j * T / N, y);
      sp.amplitude = std::max(sp.amplitude, std::abs(y(0)));
    }
    const RealVector a = traj.at((settle_periods - 1) * T);
    const RealVector b = traj.at(settle_periods * T);
    sp.converged = (b - a).norm() <= converged_tol * (1.0 + b.norm());
    sp.terminal = traj.back();
    state = sp.terminal;
    out.push_back(std::move(sp));
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& up, const std::vector<SweepPoint>& down) {
  os << "direction,omega,amplitude,converged\n";
  const auto old = os.precision(17);
  for (const auto& p : up) os << "up," << p.omega << ',' << p.amplitude << ',' << (p.converged ? 1 : 0) << '\n';
  for (const auto& p : down) os << "down," << p.omega << ',' << p.amplitude << ',' << (p.converged ? 1 : 0) << '\n';
  os.precision(old);
}

std::vector<Complex> floquet_diagnostics(const Plant& p, const RealVector& xi, const ode::IntegratorConfig& cfg) {
  const auto v = generator_of(xi);
  const double w = v.omega();
  if (std::abs(w - plant::forcing_omega(p)) > 1e-12 * w) fail(ErrorKind::InvalidArgument, "floquet: omega mismatch");
  const auto r = signal::synthesize_reference(v, plant::known_A(p), plant::known_b(p));
  const int n = plant::state_dim(p);
  const double T = plant::period(p);
  const auto field = open_loop_field(p);
  RealVector q0 = r.eval(0.0);
  RealMatrix Phi;
  for (int it = 0;; ++it) {
    const auto traj = ode::integrate(field, q0, 0.0, T, cfg);
    Phi = ode::monodromy([&](double t) { return plant::open_loop_jacobian(p, t, traj.at(t)); }, n, 0.0, T, cfg);
    const RealVector res = traj.back() - q0;
    if (res.norm() <= 1e-10 * (1.0 + q0.norm())) break;
    if (it >= 10) fail(ErrorKind::NonConvergence, "floquet: shooting Newton did not converge");
    q0 -= numkit::solve_real(Phi - RealMatrix::Identity(n, n), res);
    if (!numkit::all_finite(q0)) fail(ErrorKind::Numerical, "floquet: shooting Newton diverged");
  }
  auto mu = numkit::eig_general(Phi);
  std::stable_sort(mu.begin(), mu.end(), [](const Complex& a, const Complex& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a.imag() > b.imag();
  });
  return mu;
}

}  // namespace orbit_tracer::continuation
