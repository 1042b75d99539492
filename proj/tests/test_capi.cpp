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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "orbit_tracer.h"

namespace fs = std::filesystem;

namespace {

std::string config_dir() {
  const char* d = std::getenv("OT_CONFIG_DIR");
  return d ? d : "configs";
}

}  // namespace

TEST_CASE("version and lyapunov") {
  CHECK(std::string(ot_version()) == "1.0.0");
  const double A[4] = {0.0, 1.0, -1.5, -0.5};
  const double S[4] = {1.0, 0.0, 0.0, 1.0};
  double P[4];
  REQUIRE(ot_solve_lyapunov(2, A, S, P) == OT_OK);
  CHECK(P[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(P[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(P[3] == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  const double B[4] = {0.0, 1.0, 1.0, 0.0};
  CHECK(ot_solve_lyapunov(2, B, S, P) == OT_ERR_NUMERICAL);
  CHECK(ot_solve_lyapunov(0, A, S, P) == OT_ERR_INVALID_ARGUMENT);
  CHECK(ot_solve_lyapunov(2, nullptr, S, P) == OT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config errors surface as codes with messages") {
  ot_config* cfg = nullptr;
  CHECK(ot_config_parse(R"({"schema": 1, "plant": {"name": "duffing"}, "controller": {"Gamma": -1}})", ".", &cfg) ==
        OT_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(ot_last_error()).find("controller.Gamma must be > 0") != std::string::npos);
  CHECK(ot_config_parse("{not json", ".", &cfg) == OT_ERR_CONFIG);
  CHECK(ot_config_load("/nonexistent/config.json", &cfg) != OT_OK);
  CHECK(ot_config_parse(nullptr, ".", &cfg) == OT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("run through the C API") {
  ot_config* cfg = nullptr;
  REQUIRE(ot_config_load((config_dir() + "/fig3.json").c_str(), &cfg) == OT_OK);
  const fs::path out = fs::temp_directory_path() / "orbit_tracer_capi";
  fs::remove_all(out);
  REQUIRE(ot_config_set_output_dir(cfg, out.c_str()) == OT_OK);

  std::size_t needed = 0;
  CHECK(ot_config_json(cfg, nullptr, 0, &needed) == OT_OK);
  CHECK(needed > 10);
  std::vector<char> buf(needed);
  CHECK(ot_config_json(cfg, buf.data(), buf.size(), &needed) == OT_OK);
  CHECK(std::string(buf.data()).find("\"schema\"") != std::string::npos);

  ot_summary* s = nullptr;
  CHECK(ot_run(cfg, "pe-check", 1, nullptr, nullptr, &s) == OT_OK);
  REQUIRE(s != nullptr);
  CHECK(ot_summary_exit_code(s) == 0);
  double alpha = -1.0;
  CHECK(ot_summary_metric(s, "alpha", &alpha) == OT_OK);
  CHECK(std::abs(alpha - 1.0) < 0.05);
  CHECK(ot_summary_metric(s, "no_such_metric", &alpha) == OT_ERR_INVALID_ARGUMENT);
  CHECK(fs::exists(out / "summary.json"));
  ot_summary_free(s);

  s = nullptr;
  CHECK(ot_run(cfg, "bogus", 1, nullptr, nullptr, &s) == OT_ERR_CONFIG);
  CHECK(ot_summary_exit_code(s) == 1);
  ot_summary_free(s);
  ot_config_free(cfg);
}
