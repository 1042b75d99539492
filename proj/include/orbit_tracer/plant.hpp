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

#ifndef ORBIT_TRACER_PLANT_HPP_
#define ORBIT_TRACER_PLANT_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "orbit_tracer/signal.hpp"

namespace orbit_tracer::plant {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using VecIn = Eigen::Ref<const RealVector>;
using VecOut = Eigen::Ref<RealVector>;

using VectorFn = std::function<void(double t, VecIn q, VecOut out)>;
using MatrixFn = std::function<void(double t, VecIn q, Eigen::Ref<RealMatrix> out)>;
using TimeFn = std::function<double(double t)>;
using ScalarStateFn = std::function<double(double t, double q)>;

/// The part of a structured plant a controller may use: A, b, the regressor
/// Q(t, q) with its q-Jacobian, the forcing sigma(t), and the forcing
/// frequency. The unknown parameter vector is not here.
struct StructuredModel {
  RealMatrix A;
  RealVector b;
  int m = 0;
  VectorFn Q;
  MatrixFn Q_q;  // m x n
  TimeFn sigma;
  double omega = 1.0;

  int n() const { return static_cast<int>(A.rows()); }
  double period() const;
  RealVector eval_Q(double t, VecIn q) const;
};

/// Bounded additive disturbance h(t, q) entering the state equation.
struct Disturbance {
  VectorFn h;
  double h_b = 0.0;
  bool periodic = false;
};

/// dq/dt = A q + b (u + theta^T Q(t, q) + sigma(t)) [+ h(t, q)].
class StructuredPlant {
 public:
  StructuredPlant(std::string name, StructuredModel model, RealVector theta);

  const std::string& name() const { return name_; }
  const StructuredModel& model() const { return model_; }
  int n() const { return model_.n(); }
  int m() const { return model_.m; }
  double omega() const { return model_.omega; }
  double period() const { return model_.period(); }

  /// The simulated experiment. This is the only path by which the hidden
  /// parameters act on a closed-loop run.
  void respond(double t, VecIn q, double u, VecOut dq) const;

  /// Ground truth, for diagnostics only. Throws ModelFreeViolation on a
  /// sealed plant.
  const RealVector& theta() const;

  /// Copy whose ground-truth accessors throw.
  StructuredPlant sealed() const;
  bool is_sealed() const { return sealed_; }

  const std::optional<Disturbance>& disturbance() const { return disturbance_; }
  StructuredPlant with_disturbance(Disturbance d) const;

 private:
  std::string name_;
  StructuredModel model_;
  std::shared_ptr<const RealVector> theta_;
  std::optional<Disturbance> disturbance_;
  bool sealed_ = false;
};

/// a and b_s are known; sigma(t) is known.
struct ScalarModel {
  double a = -1.0;
  double b = 1.0;
  TimeFn sigma;
  double omega = 1.0;

  double period() const;
  RealMatrix A() const { return RealMatrix::Constant(1, 1, a); }
  RealVector bvec() const { return RealVector::Constant(1, b); }
};

/// dq/dt = a q + b (k q + f(t, q) + sigma(t) + u); k and f are unknown.
class ScalarPlant {
 public:
  ScalarPlant(std::string name, ScalarModel model, double k_true, ScalarStateFn f, ScalarStateFn f_q, double f_b);

  const std::string& name() const { return name_; }
  const ScalarModel& model() const { return model_; }
  double omega() const { return model_.omega; }
  double period() const { return model_.period(); }

  double respond(double t, double q, double u) const;

  double k_true() const;
  double f(double t, double q) const;
  double f_q(double t, double q) const;
  double f_bound() const { return f_b_; }

  ScalarPlant sealed() const;
  bool is_sealed() const { return sealed_; }

 private:
  struct Hidden {
    double k;
    ScalarStateFn f, f_q;
  };
  std::string name_;
  ScalarModel model_;
  std::shared_ptr<const Hidden> hidden_;
  double f_b_ = 0.0;
  bool sealed_ = false;
};

using Plant = std::variant<StructuredPlant, ScalarPlant>;
using PlantFamily = std::function<Plant(double omega)>;

int state_dim(const Plant& p);
double period(const Plant& p);
double forcing_omega(const Plant& p);
/// Known linear part (A, b); 1x1 for scalar plants.
RealMatrix known_A(const Plant& p);
RealVector known_b(const Plant& p);
void respond(const Plant& p, double t, VecIn q, double u, VecOut dq);
Plant sealed(const Plant& p);

/// df/dq of the open-loop field (uses ground truth).
RealMatrix open_loop_jacobian(const Plant& p, double t, VecIn q);

// Catalog -------------------------------------------------------------------

/// Duffing oscillator with A = [[0,1],[-1.5,-0.5]], b = (0,1),
/// theta = (0.5, 0.4, -0.04), Q = (q1, q2, q1^3), sigma = sin(omega t).
StructuredPlant duffing(double omega);

/// Same A, b, sigma as duffing() with Q(t, q) = q; a linear plant.
StructuredPlant linear_oscillator(double omega, const RealVector& theta);

/// dq/dt = -q + sin q + sin(omega t) + u.
ScalarPlant scalar_sine(double omega);

struct BeamParameters {
  double m1 = 1.0, m2 = 1.0;
  double k01_lin = 1.0, k12 = 1.0, k02 = 1.0;
  double c01 = 0.05, c12 = 0.05, c02 = 0.05;
  double k01_nlin = 0.0, kpe_lin = 0.0, kpe_nlin = 0.0;
  double omega_pe = 1.0;
};

/// Parametrically excited two-mass cantilever model, sigma = 0,
/// Q = (q1^3, q1 cos(W t), q1^3 cos(W t)).
StructuredPlant beam_2dof(const BeamParameters& p);

/// h = amplitude * sin(frequency t) * e_direction; not periodic in general.
Disturbance sine_disturbance(int n, int direction, double amplitude, double frequency, bool periodic);

/// h = amplitude * cos(2 omega t) * e_direction.
Disturbance harmonic_disturbance(int n, int direction, double amplitude, double omega);

// Diagnostics ---------------------------------------------------------------

struct ForcingG {
  std::function<RealVector(double)> g;
  bool identically_zero = false;
  double sup_norm = 0.0;  // max over 256 points of one period
};

/// g(t) = -r' + A r + b (theta^T Q(t, r) + sigma) for structured plants and
/// (a + b k) r + b (f(t, r) + sigma) - r' for scalar ones. Uses ground truth.
ForcingG true_forcing_g(const Plant& p, const signal::VectorFourierSeries& r);

}  // namespace orbit_tracer::plant

#endif  // ORBIT_TRACER_PLANT_HPP_
