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

#ifndef ORBIT_TRACER_CONTROL_HPP_
#define ORBIT_TRACER_CONTROL_HPP_

#include <iosfwd>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "orbit_tracer/ode.hpp"
#include "orbit_tracer/plant.hpp"
#include "orbit_tracer/signal.hpp"

namespace orbit_tracer::control {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using VecIn = Eigen::Ref<const RealVector>;

/// Ball of radius R with a boundary layer of relative width eps.
struct ProjectionBall {
  double R = 10.0;
  double eps = 0.1;
};

/// Smooth projection of an adaptation direction y at estimate theta_hat.
/// Leaves y untouched inside ||theta_hat|| <= R / sqrt(1 + eps) or when y
/// points inward; scales away the outward radial part in the boundary layer.
RealVector proj(const RealVector& theta_hat, const RealVector& y, double R, double eps);

struct MracState {
  RealVector theta_hat;
  RealVector x_m;
  RealMatrix P;
  RealMatrix S;
  double Gamma = 1.0;
  std::optional<ProjectionBall> projection;

  /// P from the Lyapunov equation for the given A and S.
  static MracState make(const RealMatrix& A, const RealMatrix& S, double Gamma,
                        std::optional<ProjectionBall> projection, RealVector theta_hat, RealVector x_m);
};

struct ScalarAdaptiveState {
  double k_hat = 0.0;
  double Gamma = 1.0;
};

struct ReferenceSample {
  RealVector r;
  RealVector r_dot;
};

/// u = -k^T (Q(t, q) - Q(t, r)).
double proportional_u(const RealVector& k, const plant::StructuredModel& model, double t, VecIn q, VecIn r);

/// u = -theta_hat^T (Q(t, q) - Q(t, r)).
double mrac_u(const MracState& s, const plant::StructuredModel& model, double t, VecIn q, VecIn r);

struct MracRates {
  RealVector dtheta_hat;
  RealVector dx_m;
};

/// Adaptation law and reference-model dynamics. The reference model is
/// evaluated in its theta-free form
///   dx_m = A x_m + b (theta_hat^T Q(t, r) + sigma) - r' + A r.
MracRates mrac_rates(const MracState& s, const plant::StructuredModel& model, double t, VecIn q,
                     const ReferenceSample& ref);

/// dk_hat = Gamma b x^2.
double scalar_rates(const ScalarAdaptiveState& s, double x, double b_s);

// Controller configuration.
struct NoControl {};
struct ProportionalSpec {
  RealVector k;
};
struct MracSpec {
  double Gamma = 1.0;
  std::optional<RealMatrix> S;  // identity when absent
  std::optional<ProjectionBall> projection;
  std::optional<RealVector> theta_hat0;  // zero when absent
};
struct ScalarAdaptiveSpec {
  double Gamma = 1.0;
  double k_hat0 = 0.0;
};
using ControllerSpec = std::variant<NoControl, ProportionalSpec, MracSpec, ScalarAdaptiveSpec>;

/// Augmented state z = (q, x_m, theta_hat) or (q, k_hat) or q.
struct StateLayout {
  int n = 0;        // plant states
  int n_xm = 0;     // reference-model states
  int n_adapt = 0;  // adaptive parameters
  int size() const { return n + n_xm + n_adapt; }
  int xm_offset() const { return n; }
  int adapt_offset() const { return n + n_xm; }
};

/// A plant, a controller and a reference bound into one ODE.
class ClosedLoop {
 public:
  const StateLayout& layout() const;
  const plant::Plant& plant() const;
  const ControllerSpec& controller() const;
  const signal::VectorFourierSeries& reference() const;
  bool is_mrac() const;
  bool is_scalar_adaptive() const;
  /// P of the MRAC design (empty otherwise).
  const RealMatrix& P() const;
  double Gamma() const;

  /// Fresh field closure with its own scratch buffers; safe to use from one
  /// thread per closure.
  ode::Field field() const;

  /// z(0) from q0 with x_m = q0 - r(t0) (so e = 0) and the configured initial
  /// adaptive parameters.
  RealVector initial_state(VecIn q0, double t0 = 0.0) const;

  /// Resets x_m to q - r(t) in place; adaptive parameters untouched.
  void reinit_reference_model(RealVector& z, double t) const;

  double control(double t, VecIn z) const;
  /// Prediction error e = x_m - (q - r); empty when there is no reference model.
  RealVector prediction_error(double t, VecIn z) const;

  struct Impl;

 private:
  friend ClosedLoop assemble_closed_loop(const plant::Plant&, const ControllerSpec&,
                                         const signal::VectorFourierSeries&);
  std::shared_ptr<const Impl> impl_;
};

/// Throws on dimension mismatch or unsupported plant/controller pairs.
ClosedLoop assemble_closed_loop(const plant::Plant& plant, const ControllerSpec& controller,
                                const signal::VectorFourierSeries& r);

struct ClosedLoopRun {
  StateLayout layout;
  ode::Trajectory trajectory;
  std::vector<double> t;
  std::vector<RealVector> z;
  std::vector<double> u;
  std::vector<double> e_norm;  // empty without a reference model
  // Filled by attach_diagnostics().
  std::vector<double> V;
  std::vector<double> theta_err;

  RealVector q(std::size_t i) const { return z[i].head(layout.n); }
  /// `t,q...,xm...,theta_hat...,u[,e_norm,V]`, 17 significant digits.
  void write_csv(std::ostream& os) const;
};

/// Integrates the closed loop over [t0, t1], sampling every sample_dt.
ClosedLoopRun simulate(const ClosedLoop& loop, const RealVector& z0, double t0, double t1, double sample_dt,
                       const ode::IntegratorConfig& cfg = {});

struct LyapunovReport {
  std::vector<double> V;
  std::vector<double> e_norm;
  std::vector<double> theta_err;
  double R = 0.0;
  double lambda_min_P = 0.0;
  double e_bound = 0.0;      // 2R / sqrt(lambda_min(P) Gamma)
  double theta_bound = 0.0;  // 2R
  double max_V_increase = 0.0;
  bool V_nonincreasing = false;
  bool e_within_bound = false;
  bool theta_within_bound = false;
};

/// V = e^T P e + |theta_hat - theta|^2 / Gamma along a structured MRAC run;
/// R defaults to max(|theta_hat(0)|, |theta|). Also fills run.V/theta_err.
LyapunovReport lyapunov_diagnostics(ClosedLoopRun& run, const ClosedLoop& loop, const RealVector& theta,
                                    double drift_tol = 1e-8, std::optional<double> R = std::nullopt);

}  // namespace orbit_tracer::control

#endif  // ORBIT_TRACER_CONTROL_HPP_
