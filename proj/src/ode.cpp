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

#include "orbit_tracer/ode.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "orbit_tracer/error.hpp"

namespace orbit_tracer::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output (Hairer & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI step-size control.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kMinRatio = 0.2;
constexpr double kMaxRatio = 5.0;

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) fail(ErrorKind::InvalidArgument, "integrator: tolerances must be > 0");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max)) {
    fail(ErrorKind::InvalidArgument, "integrator: require 0 < h_min <= h_init <= h_max");
  }
  if (max_steps == 0) fail(ErrorKind::InvalidArgument, "integrator: max_steps must be positive");
}

State Trajectory::state(std::size_t i) const {
  return Eigen::Map<const State>(states_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
}

void Trajectory::push_start(double t, const State& y) {
  times_.push_back(t);
  states_.insert(states_.end(), y.data(), y.data() + y.size());
}

void Trajectory::push_step(double t_new, const State& y_new, const State* rcont) {
  times_.push_back(t_new);
  states_.insert(states_.end(), y_new.data(), y_new.data() + y_new.size());
  for (int k = 0; k < 5; ++k) dense_.insert(dense_.end(), rcont[k].data(), rcont[k].data() + rcont[k].size());
}

void Trajectory::at(double t, Eigen::Ref<Eigen::VectorXd> out) const {
  if (times_.empty()) fail(ErrorKind::InvalidArgument, "trajectory: empty");
  const double span = std::max(std::abs(t_begin()), std::abs(t_end()));
  const double slack = 1e-12 * std::max(1.0, span);
  if (t < t_begin() - slack || t > t_end() + slack) {
    std::ostringstream os;
    os << "trajectory: t=" << t << " outside [" << t_begin() << ", " << t_end() << "]";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  if (times_.size() == 1) {
    out = state(0);
    return;
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t step = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  step = std::min(step, times_.size() - 2);
  const double t0 = times_[step];
  const double h = times_[step + 1] - t0;
  const double s = std::clamp((t - t0) / h, 0.0, 1.0);
  const double s1 = 1.0 - s;
  const auto n = static_cast<Eigen::Index>(dim_);
  const double* r = dense_.data() + step * 5 * dim_;
  Eigen::Map<const State> r1(r, n), r2(r + dim_, n), r3(r + 2 * dim_, n), r4(r + 3 * dim_, n),
      r5(r + 4 * dim_, n);
  out = r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
}

State Trajectory::at(double t) const {
  State out(static_cast<Eigen::Index>(dim_));
  at(t, out);
  return out;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t";
  for (std::size_t i = 0; i < dim_; ++i) os << ",y" << i;
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < times_.size(); ++k) {
    os << times_[k];
    for (std::size_t i = 0; i < dim_; ++i) os << "," << states_[k * dim_ + i];
    os << "\n";
  }
}

Trajectory integrate(const Field& field, const State& y0, double t0, double t1, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(t1 > t0)) fail(ErrorKind::InvalidArgument, "integrate: require t1 > t0");
  if (!y0.allFinite()) fail(ErrorKind::InvalidArgument, "integrate: non-finite initial state");

  const Eigen::Index n = y0.size();
  Trajectory traj(static_cast<std::size_t>(n));
  traj.push_start(t0, y0);

  State y = y0, y_new(n), ytmp(n), err(n);
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  State rcont[5] = {State(n), State(n), State(n), State(n), State(n)};

  double t = t0;
  field(t, y, k1);
  std::size_t evals = 1;
  double h = std::min(cfg.h_init, t1 - t0);
  double facold = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;
  const double expo = 0.2 - kBeta * 0.75;

  while (t < t1) {
    if (++steps > cfg.max_steps) {
      std::ostringstream os;
      os << "integrate: max_steps (" << cfg.max_steps << ") exceeded at t=" << t;
      fail(ErrorKind::Numerical, os.str());
    }
    bool final_step = false;
    if (t + h >= t1 || (t1 - (t + h)) <= 1e-13 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      final_step = true;
    }

    ytmp = y + h * a21 * k1;
    field(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    field(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    field(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    field(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    field(t + h, ytmp, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    field(t + h, y_new, k7);
    evals += 6;

    double err_norm = 0.0;
    if (cfg.adaptive) {
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sk = cfg.atol + cfg.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
        const double r = err(i) / sk;
        acc += r * r;
      }
      err_norm = std::sqrt(acc / static_cast<double>(n));
      if (!std::isfinite(err_norm) || !y_new.allFinite()) err_norm = std::numeric_limits<double>::infinity();
    } else if (!y_new.allFinite()) {
      std::ostringstream os;
      os << "stiffness/blowup: non-finite state at t=" << t;
      fail(ErrorKind::Numerical, os.str());
    }

    if (!cfg.adaptive || err_norm <= 1.0) {
      rcont[0] = y;
      rcont[1] = y_new - y;
      rcont[2] = h * k1 - rcont[1];
      rcont[3] = rcont[1] - h * k7 - rcont[2];
      rcont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      t = final_step ? t1 : t + h;
      traj.push_step(t, y_new, rcont);
      y = y_new;
      k1 = k7;
      if (!cfg.adaptive) continue;
      const double fac11 = std::pow(err_norm, expo);
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxRatio, 1.0 / kMinRatio);
      facold = std::max(err_norm, 1e-4);
      double h_new = std::min(h / fac, cfg.h_max);
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = h_new;
    } else {
      ++traj.rejected_;
      const double fac11 = std::isfinite(err_norm) ? std::pow(err_norm, expo) : 1.0 / kMinRatio;
      h = h / std::min(1.0 / kMinRatio, fac11 / kSafety);
      last_rejected = true;
      if (h < cfg.h_min) {
        std::ostringstream os;
        os << "stiffness/blowup: step size " << h << " below h_min at t=" << t;
        fail(ErrorKind::Numerical, os.str());
      }
    }
  }
  traj.evaluations_ = evals;
  return traj;
}

PeriodSamples sample_period(const Field& field, const State& y_start, double t_start, double T, std::size_t N,
                            const IntegratorConfig& cfg) {
  if (!(T > 0.0)) fail(ErrorKind::InvalidArgument, "sample_period: T must be > 0");
  if (N < 2) fail(ErrorKind::InvalidArgument, "sample_period: need at least 2 samples");
  PeriodSamples out;
  out.trajectory = integrate(field, y_start, t_start, t_start + T, cfg);
  out.times.reserve(N);
  out.states.reserve(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double tj = t_start + static_cast<double>(j) * T / static_cast<double>(N);
    out.times.push_back(tj);
    out.states.push_back(out.trajectory.at(tj));
  }
  out.terminal = out.trajectory.back();
  return out;
}

Eigen::MatrixXd monodromy(const JacobianFn& jac, std::size_t n, double t0, double T, const IntegratorConfig& cfg) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "monodromy: empty system");
  const auto ni = static_cast<Eigen::Index>(n);
  Field variational = [&](double t, StateRef y, DerivRef dy) {
    const Eigen::MatrixXd J = jac(t);
    Eigen::Map<const Eigen::MatrixXd> Phi(y.data(), ni, ni);
    Eigen::Map<Eigen::MatrixXd>(dy.data(), ni, ni).noalias() = J * Phi;
  };
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(ni, ni);
  State y0 = Eigen::Map<State>(I.data(), ni * ni);
  const Trajectory traj = integrate(variational, y0, t0, t0 + T, cfg);
  const State yT = traj.back();
  return Eigen::Map<const Eigen::MatrixXd>(yT.data(), ni, ni);
}

}  // namespace orbit_tracer::ode
