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

#ifndef ORBIT_TRACER_CONTINUATION_HPP_
#define ORBIT_TRACER_CONTINUATION_HPP_

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "orbit_tracer/control.hpp"
#include "orbit_tracer/ode.hpp"
#include "orbit_tracer/plant.hpp"
#include "orbit_tracer/signal.hpp"

namespace orbit_tracer::continuation {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

enum class WarmStart { Cold, Chain };
enum class AdaptationReset { CarryThetaHat, ResetKHatZero };

/// How one "experiment" is run: settle for n_transient_periods, then sample
/// the control input over one more period and keep its first K harmonics.
struct ExperimentProtocol {
  int n_transient_periods = 10;
  int n_samples = 1024;
  int K = 5;
  WarmStart warm_start = WarmStart::Chain;
  double conv_tol = 1e-6;
  AdaptationReset adaptation_reset = AdaptationReset::CarryThetaHat;
  ode::IntegratorConfig integrator;

  void validate() const;
};

/// Step-size and corrector settings for the pseudo-arclength chart.
struct ChartSettings {
  double h0 = 0.05;
  double h_min = 0.005;
  double h_max = 0.5;
  double grow = 1.5;
  int grow_below_iters = 3;  // grow when Newton needs at most this many
  double shrink = 0.5;
  int newton_cap = 10;
  double fd_step = 1e-4;
  int max_points = 400;
  int threads = 1;  // Jacobian columns run concurrently up to this count

  void validate() const;
};

// Unknown vector xi = (a0, a1..aK, b1..bK, omega) of the reference generator.
RealVector pack_unknowns(const signal::FourierSeries& generator);
signal::FourierSeries generator_of(const RealVector& xi);
inline double omega_of(const RealVector& xi) { return xi(xi.size() - 1); }

struct ResidualResult {
  RealVector F;         // (a0, a1..aK, b1..bK) of the steady control input
  RealVector terminal;  // augmented closed-loop state at the end of the run
};

using ResidualFn = std::function<ResidualResult(const RealVector& xi, const std::optional<RealVector>& warm)>;

/// A plant family and a controller driven through the experiment protocol.
/// Only the controller-visible plant model and the simulated response are
/// used, never the plant's ground truth.
class Experiment {
 public:
  Experiment(plant::PlantFamily family, control::ControllerSpec controller, ExperimentProtocol protocol);

  const ExperimentProtocol& protocol() const { return protocol_; }
  const plant::PlantFamily& family() const { return family_; }
  const control::ControllerSpec& controller() const { return controller_; }
  int unknowns() const { return 2 * protocol_.K + 2; }
  int residuals() const { return 2 * protocol_.K + 1; }

  signal::VectorFourierSeries reference(const RealVector& xi) const;
  ResidualResult residual(const RealVector& xi, const std::optional<RealVector>& warm) const;
  ResidualFn residual_fn() const;

 private:
  plant::PlantFamily family_;
  control::ControllerSpec controller_;
  ExperimentProtocol protocol_;
};

ResidualResult steady_control_residual(const plant::PlantFamily& family, const control::ControllerSpec& controller,
                                       const RealVector& xi, const ExperimentProtocol& protocol,
                                       const std::optional<RealVector>& warm);

struct JacobianResult {
  RealMatrix J;         // residuals x unknowns
  RealVector F_base;    // residual at xi from the anchor state
  RealVector terminal;  // terminal state of the base run
};

/// Forward differences; the base run and every perturbed run start from
/// `anchor`. Columns are independent and may run on `threads` threads;
/// results do not depend on the thread count.
JacobianResult fd_jacobian(const ResidualFn& residual, const RealVector& xi, double fd_step,
                           const std::optional<RealVector>& anchor, int threads = 1);

struct NewtonOutcome {
  bool converged = false;
  RealVector xi;
  RealVector F;
  double residual_norm = 0.0;
  int iterations = 0;
  RealVector terminal;
  std::string reason;
};

/// Newton on [F(xi) = 0; tangent^T (xi - xi_p) = 0].
NewtonOutcome newton_correct(const RealVector& xi_p, const RealVector& tangent, const ResidualFn& residual,
                             const ChartSettings& settings, double conv_tol, const std::optional<RealVector>& warm);

/// Unit null vector of J (residuals x unknowns) oriented along `previous`.
RealVector tangent_from_jacobian(const RealMatrix& J, const RealVector& previous);

struct BranchPoint {
  RealVector xi;
  RealVector tangent;
  double residual_norm = 0.0;
  double amplitude = 0.0;  // max |r_1| over 1024 samples of one period
  std::vector<Complex> floquet;
  RealVector terminal_state;
  int newton_iters = 0;
  double step = 0.0;

  double omega() const { return omega_of(xi); }
};

enum class Direction { Up, Down, Both };

struct Branch {
  std::vector<BranchPoint> points;
  std::string status;  // "range", "budget" or "stalled" (per direction, joined by '/')
  /// Indices i where the omega-component of the tangent changes sign between
  /// points i and i+1.
  std::vector<std::size_t> folds() const;
  void write_csv(std::ostream& os, int K) const;
};

/// Fixed-omega Newton from an initial generator guess.
BranchPoint converge_initial_point(const Experiment& experiment, const RealVector& xi_guess,
                                   const ChartSettings& settings, const std::optional<RealVector>& warm);

/// Pseudo-arclength continuation from a converged point until omega leaves
/// `omega_range`, the point budget is spent, or the step underflows.
Branch continue_branch(const Experiment& experiment, const BranchPoint& start, std::pair<double, double> omega_range,
                       const ChartSettings& settings, Direction direction);

/// Generator guess from an open-loop simulation at omega (settle_periods,
/// then DFT of one more period of q).
RealVector initial_guess_from_simulation(const plant::Plant& plant, int K, int settle_periods,
                                         const ode::IntegratorConfig& cfg);

struct SweepPoint {
  double omega = 0.0;
  double amplitude = 0.0;  // max |q_1| over one period
  bool converged = false;  // period-to-period change below tolerance
  RealVector terminal;
};

/// Open-loop frequency sweep; each grid point starts from the previous
/// terminal state. The grid must be strictly monotone.
std::vector<SweepPoint> open_loop_sweep(const plant::PlantFamily& family, const std::vector<double>& omega_grid,
                                        int settle_periods, const RealVector& q0, const ode::IntegratorConfig& cfg,
                                        double converged_tol = 1e-6);

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& up, const std::vector<SweepPoint>& down);

/// Floquet multipliers of the open-loop orbit near the branch point's
/// reference: Newton-polished periodic orbit from r(0), then eigenvalues of
/// the monodromy matrix. Uses ground truth. Sorted by decreasing modulus.
std::vector<Complex> floquet_diagnostics(const plant::Plant& plant, const RealVector& xi,
                                         const ode::IntegratorConfig& cfg = {});

/// max |r_1| over `samples` points of one period.
double reference_amplitude(const signal::VectorFourierSeries& r, int samples = 1024);

}  // namespace orbit_tracer::continuation

#endif  // ORBIT_TRACER_CONTINUATION_HPP_
