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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbit_tracer.h"

namespace {

// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 non-convergence.
int exit_code_of(ot_status s) {
  switch (s) {
    case OT_OK: return 0;
    case OT_ERR_CONFIG:
    case OT_ERR_INVALID_ARGUMENT:
    case OT_ERR_IO: return 1;
    case OT_ERR_NONCONVERGENCE: return 3;
    default: return 2;
  }
}

int threads_from_env(bool& ok) {
  ok = true;
  const char* v = std::getenv("ORBIT_TRACER_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 256) {
    ok = false;
    return 1;
  }
  return static_cast<int>(n);
}

void log_line(const char* line, void*) { std::cerr << "orbit-tracer: " << line << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control-based continuation of periodic orbits with adaptive feedback"};
  app.set_version_flag("--version", std::string(ot_version()));
  std::string command, config_path, out_dir;
  bool quiet = false;
  app.add_option("command", command, "simulate | continue | sweep | pe-check")
      ->required()
      ->check(CLI::IsMember({"simulate", "continue", "sweep", "pe-check"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--quiet", quiet, "suppress progress and the summary line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  bool threads_ok = true;
  const int threads = threads_from_env(threads_ok);
  if (!threads_ok) {
    std::cerr << "orbit-tracer: ORBIT_TRACER_THREADS must be an integer in [1, 256]\n";
    return 1;
  }

  ot_config* cfg = nullptr;
  ot_status st = ot_config_load(config_path.c_str(), &cfg);
  if (st != OT_OK) {
    std::cerr << "orbit-tracer: " << ot_last_error() << "\n";
    return exit_code_of(st);
  }
  if (!out_dir.empty()) ot_config_set_output_dir(cfg, out_dir.c_str());

  ot_summary* summary = nullptr;
  st = ot_run(cfg, command.c_str(), threads, quiet ? nullptr : log_line, nullptr, &summary);
  if (st != OT_OK) std::cerr << "orbit-tracer: " << command << " failed: " << ot_last_error() << "\n";
  if (!quiet && summary) {
    size_t needed = 0;
    ot_summary_json(summary, nullptr, 0, &needed);
    std::vector<char> buf(needed);
    ot_summary_json(summary, buf.data(), buf.size(), &needed);
    std::cout << buf.data() << "\n";
  }
  ot_summary_free(summary);
  ot_config_free(cfg);
  return exit_code_of(st);
}
