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

#ifndef ORBIT_TRACER_COMMANDS_HPP_
#define ORBIT_TRACER_COMMANDS_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbit_tracer/config.hpp"

namespace orbit_tracer::commands {

struct RunOptions {
  int threads = 1;
  std::function<void(const std::string&)> log;  // progress lines; may be empty
};

struct RunSummary {
  std::string command;
  std::string status = "ok";
  int exit_code = 0;
  std::string message;
  double wall_time = 0.0;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
};

/// Runs `command` (simulate, continue, sweep, pe-check). Output files are
/// produced in memory and written to cfg.output_dir only once the command
/// has succeeded. Errors propagate as orbit_tracer::Error; write_summary
/// records the outcome either way.
RunSummary run(const std::string& command, const config::RunConfig& cfg, const RunOptions& opt = {});

RunSummary cmd_simulate(const config::RunConfig& cfg, const RunOptions& opt = {});
RunSummary cmd_continue(const config::RunConfig& cfg, const RunOptions& opt = {});
RunSummary cmd_sweep(const config::RunConfig& cfg, const RunOptions& opt = {});
RunSummary cmd_pe_check(const config::RunConfig& cfg, const RunOptions& opt = {});

/// Writes summary.json into cfg.output_dir.
void write_summary(const config::RunConfig& cfg, const RunSummary& s);

}  // namespace orbit_tracer::commands

#endif  // ORBIT_TRACER_COMMANDS_HPP_
