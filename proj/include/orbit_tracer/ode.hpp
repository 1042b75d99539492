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

#ifndef ORBIT_TRACER_ODE_HPP_
#define ORBIT_TRACER_ODE_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace orbit_tracer::ode {

using State = Eigen::VectorXd;
using StateRef = Eigen::Ref<const Eigen::VectorXd>;
using DerivRef = Eigen::Ref<Eigen::VectorXd>;

/// Right-hand side dy = f(t, y). Implementations write into `dy`, which is
/// pre-sized to y.size().
using Field = std::function<void(double t, StateRef y, DerivRef dy)>;

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 1e-2;
  double h_min = 1e-12;
  double h_max = 1.0;
  std::size_t max_steps = 5'000'000;
  /// When false, steps of exactly h_init are taken (last one clipped) and
  /// no error control is applied.
  bool adaptive = true;

  void validate() const;
};

/// Accepted steps of a Dormand-Prince run plus the 4th-order dense-output
/// coefficients of each step. Immutable once returned by integrate().
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }

  State state(std::size_t i) const;
  State back() const { return state(size() - 1); }

  /// Dense-output evaluation; t must lie in [t_begin, t_end].
  State at(double t) const;
  void at(double t, Eigen::Ref<Eigen::VectorXd> out) const;

  std::size_t accepted_steps() const { return size() == 0 ? 0 : size() - 1; }
  std::size_t rejected_steps() const { return rejected_; }
  std::size_t evaluations() const { return evaluations_; }

  /// `t,y0,y1,...` with 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  friend Trajectory integrate(const Field&, const State&, double, double, const IntegratorConfig&);
  void push_start(double t, const State& y);
  void push_step(double t_new, const State& y_new, const State* rcont);

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> states_;  // dim_ per time
  std::vector<double> dense_;   // 5 * dim_ per accepted step
  std::size_t rejected_ = 0;
  std::size_t evaluations_ = 0;
};

/// Adaptive Dormand-Prince 5(4) from t0 to exactly t1.
Trajectory integrate(const Field& field, const State& y0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

struct PeriodSamples {
  std::vector<double> times;   // t_start + j T / N
  std::vector<State> states;
  State terminal;              // state at t_start + T
  Trajectory trajectory;
};

/// N uniform dense-output samples over [t_start, t_start + T).
PeriodSamples sample_period(const Field& field, const State& y_start, double t_start, double T,
                            std::size_t N, const IntegratorConfig& cfg = {});

using JacobianFn = std::function<Eigen::MatrixXd(double t)>;

/// Phi(t0 + T) for dPhi/dt = J(t) Phi, Phi(t0) = I.
Eigen::MatrixXd monodromy(const JacobianFn& jac, std::size_t n, double t0, double T,
                          const IntegratorConfig& cfg = {});

}  // namespace orbit_tracer::ode

#endif  // ORBIT_TRACER_ODE_HPP_
