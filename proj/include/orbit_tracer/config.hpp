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

#ifndef ORBIT_TRACER_CONFIG_HPP_
#define ORBIT_TRACER_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbit_tracer/continuation.hpp"
#include "orbit_tracer/control.hpp"
#include "orbit_tracer/ode.hpp"
#include "orbit_tracer/plant.hpp"
#include "orbit_tracer/signal.hpp"

namespace orbit_tracer::config {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct PlantConfig {
  std::string name = "duffing";  // duffing | linear | scalar_sine | beam
  double omega = 1.0;
  RealVector theta;  // linear only
  plant::BeamParameters beam;
};

struct ControllerConfig {
  std::string type = "mrac";  // none | proportional | mrac | mrac_projected | scalar_adaptive
  double Gamma = 1.0;
  std::optional<RealMatrix> S;
  double R = 10.0;
  double eps = 0.1;
  std::optional<RealVector> k;
  std::optional<RealVector> theta_hat0;
  double k_hat0 = 0.0;
};

struct ReferenceConfig {
  enum class Kind { Zero, Generator, Series, OpenLoopOrbit };
  Kind kind = Kind::Zero;
  signal::FourierSeries generator;
  std::vector<signal::FourierSeries> series;
  int settle_periods = 200;  // open-loop orbit
  int K = 5;                 // open-loop orbit and zero reference
  std::string from_file;     // kept for serialization; content already loaded
};

struct DisturbanceConfig {
  std::string type = "sine";  // sine | harmonic
  double amplitude = 0.1;
  double frequency = 1.0;  // sine only
  int direction = 1;
  bool periodic = false;
};

struct SimulationConfig {
  double t_end = 200.0;
  double sample_dt = 0.01;
  std::optional<RealVector> q0;
  double pe_stride = 0.0;  // 0: one period
};

struct ContinuationConfig {
  continuation::ChartSettings chart;
  std::pair<double, double> omega_range{0.2, 3.0};
  std::optional<double> omega_start;
  std::string direction = "both";  // up | down | both
  bool floquet = true;
  int initial_settle_periods = 200;
  bool overlay_sweep = false;
};

struct SweepConfig {
  double omega_min = 0.2;
  double omega_max = 3.0;
  int points = 57;
  int settle_periods = 100;
  std::vector<std::string> directions{"up", "down"};
};

struct PeConfig {
  int samples = 1025;
};

struct RunConfig {
  int schema = 1;
  PlantConfig plant;
  ControllerConfig controller;
  ReferenceConfig reference;
  continuation::ExperimentProtocol protocol;
  ContinuationConfig continuation;
  SweepConfig sweep;
  SimulationConfig simulation;
  std::optional<DisturbanceConfig> disturbance;
  ode::IntegratorConfig integrator;
  PeConfig pe;
  std::string output_dir = "out";

  bool scalar() const { return plant.name == "scalar_sine"; }
};

/// Strict parse: unknown keys and out-of-range values raise ErrorKind::Config
/// with a message naming the key. `base_dir` resolves reference.from_file.
RunConfig parse(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
RunConfig parse_file(const std::filesystem::path& path);

/// Complete JSON with every default spelled out.
nlohmann::json serialize(const RunConfig& cfg);
inline nlohmann::json normalize(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
  return serialize(parse(j, base_dir));
}

// Builders from a validated config.
plant::Plant build_plant(const RunConfig& cfg, double omega);
plant::PlantFamily build_family(const RunConfig& cfg);
control::ControllerSpec build_controller(const RunConfig& cfg);
signal::VectorFourierSeries build_reference(const RunConfig& cfg, const plant::Plant& p);

}  // namespace orbit_tracer::config

#endif  // ORBIT_TRACER_CONFIG_HPP_
