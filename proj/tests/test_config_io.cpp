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

#include <filesystem>
#include <fstream>
#include <string>

#include "orbit_tracer/commands.hpp"
#include "orbit_tracer/config.hpp"
#include "orbit_tracer/error.hpp"
#include "orbit_tracer/io.hpp"

using namespace orbit_tracer;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_error(const json& j) {
  try {
    (void)config::parse(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("orbit_tracer_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const auto c = config::parse(json::parse(R"({"schema": 1, "plant": {"name": "duffing"}})"));
  CHECK(c.integrator.rtol == 1e-8);
  CHECK(c.integrator.atol == 1e-10);
  CHECK(c.protocol.K == 5);
  CHECK(c.protocol.n_samples == 1024);
  CHECK(c.protocol.n_transient_periods == 10);
  CHECK(c.protocol.conv_tol == 1e-6);
  CHECK(c.controller.type == "mrac");
  CHECK(c.controller.Gamma == 1.0);
}

TEST_CASE("scalar defaults") {
  const auto c = config::parse(json::parse(R"({"schema": 1, "plant": {"name": "scalar_sine"}})"));
  CHECK(c.controller.type == "scalar_adaptive");
  CHECK(c.protocol.conv_tol == 1e-3);
  CHECK(c.protocol.adaptation_reset == continuation::AdaptationReset::ResetKHatZero);
}

TEST_CASE("config errors name the offending key") {
  CHECK(config_error(json::parse(R"({"schema": 1, "plant": {"name": "duffing"}, "controller": {"Gamma": -1}})"))
            .find("controller.Gamma must be > 0") != std::string::npos);
  CHECK(config_error(json::parse(R"({"schema": 1, "plant": {"name": "duffing"}, "controler": {}})"))
            .find("controler is not a recognized key") != std::string::npos);
  CHECK(config_error(json::parse(R"({"schema": 1, "plant": {"name": "duffing"}, "controller": {"gamma": 1}})"))
            .find("controller.gamma") != std::string::npos);
  CHECK(config_error(json::parse(R"({"plant": {"name": "duffing"}})")).find("schema") != std::string::npos);
  CHECK(config_error(json::parse(R"({"schema": 2, "plant": {"name": "duffing"}})")).find("schema") !=
        std::string::npos);
  CHECK(config_error(json::parse(R"({"schema": 1, "plant": {"name": "pendulum"}})")).find("plant.name") !=
        std::string::npos);
  CHECK(config_error(json::parse(
                         R"({"schema": 1, "plant": {"name": "duffing"}, "controller": {"type": "proportional"}})"))
            .find("controller.k") != std::string::npos);
  CHECK(config_error(json::parse(R"({"schema": 1, "plant": {"name": "duffing", "params": {"omega": 1.0}},
      "reference": {"generator": {"omega": 2.0, "a": [1.0], "b": [0.0]}}})"))
            .find("reference.generator") != std::string::npos);
  CHECK(config_error(json::parse(R"({"schema": 1, "plant": {"name": "duffing"},
      "continuation": {"omega_range": [2.0, 1.0]}})"))
            .find("continuation.omega_range") != std::string::npos);
}

TEST_CASE("serialize and normalize round trip") {
  const json x = json::parse(R"({"schema": 1, "plant": {"name": "linear", "params": {"omega": 0.9}},
      "controller": {"type": "proportional", "k": [1.0, 2.0]},
      "reference": {"generator": {"omega": 0.9, "a0": 0.0, "a": [0.5, 0.1], "b": [0.2, 0.0]}},
      "continuation": {"omega_range": [0.5, 1.5], "h0": 0.1}})");
  const json n = config::normalize(x);
  CHECK(config::serialize(config::parse(x)) == n);
  CHECK(config::normalize(n) == n);
  CHECK(n.at("protocol").at("K") == 5);
}

TEST_CASE("bundled example configs parse") {
  const fs::path dir = fs::path(OT_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json" || e.path().stem() == "qstar_duffing") continue;
    CHECK_NOTHROW(config::parse_file(e.path()));
    ++count;
  }
  CHECK(count >= 7);
  const auto c = config::parse_file(dir / "fig2.json");
  const auto r = config::build_reference(c, config::build_plant(c, 1.0));
  CHECK(r.dim() == 2);
  CHECK(r[0].b()[0] == 2.9876);
}

TEST_CASE("atomic writes replace whole files") {
  const fs::path d = scratch("atomic");
  const fs::path f = d / "x.txt";
  io::write_atomic(f, "first");
  io::write_atomic(f, "second");
  CHECK(io::read_file(f) == "second");
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++n;
  CHECK(n == 1);
  CHECK_THROWS_AS(io::write_atomic(d / "missing" / "y.txt", "z"), Error);
  CHECK_THROWS_AS(io::read_file(d / "none.txt"), Error);
}

TEST_CASE("svg rendering") {
  io::PlotSpec spec{"t", "x", "y"};
  CHECK_THROWS_AS(io::render_svg({}, spec), Error);
  CHECK_THROWS_AS(io::render_svg({io::Series{"a", {1.0, 2.0}, {1.0}, {}, false}}, spec), Error);
  const std::string one = io::render_svg({io::Series{"p", {1.0}, {2.0}, {}, false}}, spec);
  CHECK(one.rfind("<?xml", 0) == 0);
  std::size_t polylines = 0;
  for (std::size_t pos = one.find("<polyline"); pos != std::string::npos; pos = one.find("<polyline", pos + 1)) {
    ++polylines;
  }
  CHECK(polylines == 1);
  io::Series br{"branch", {0.5, 1.0, 1.5, 1.2}, {1.0, 3.0, 6.0, 2.0}, {}, false};
  br.markers = {2};
  const std::string a = io::render_svg({br}, spec);
  CHECK(a == io::render_svg({br}, spec));
  CHECK(a.find("class=\"marker\"") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
}

TEST_CASE("simulate command writes outputs and metrics") {
  auto c = config::parse_file(fs::path(OT_SOURCE_DIR) / "configs" / "fig8.json");
  c.simulation.t_end = 20.0;
  c.output_dir = scratch("sim").string();
  const auto s = commands::run("simulate", c);
  CHECK(s.exit_code == 0);
  CHECK(s.metrics.contains("final_k_hat"));
  CHECK(s.metrics.at("k_hat_nondecreasing") == true);
  for (const char* f : {"trajectory.csv", "u.svg", "k_hat.svg", "u_plus_g.svg"}) {
    CHECK(fs::exists(fs::path(c.output_dir) / f));
  }
  CHECK_THROWS_AS(commands::run("fly", c), Error);
}

TEST_CASE("u + g decays like 1/k_hat when the reference is not an orbit") {
  auto c = config::parse_file(fs::path(OT_SOURCE_DIR) / "configs" / "fig8.json");
  c.simulation.sample_dt = 0.05;
  std::vector<double> scaled, upg;
  for (const double t_end : {300.0, 1000.0}) {
    c.simulation.t_end = t_end;
    c.output_dir = scratch("upg").string();
    const auto s = commands::run("simulate", c);
    upg.push_back(s.metrics.at("final_u_plus_g_max").get<double>());
    scaled.push_back(upg.back() * s.metrics.at("final_k_hat").get<double>());
  }
  CHECK(upg[1] < upg[0]);
  CHECK(scaled[1] == doctest::Approx(scaled[0]).epsilon(0.05));
}

TEST_CASE("pe-check reports the Gram level") {
  auto c = config::parse_file(fs::path(OT_SOURCE_DIR) / "configs" / "fig2.json");
  c.output_dir = scratch("pe").string();
  const auto s = commands::run("pe-check", c);
  CHECK(s.metrics.at("alpha").get<double>() == doctest::Approx(3.2).epsilon(0.1 / 3.2));
}
