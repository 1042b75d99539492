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

#include "orbit_tracer.h"

#include <cstring>
#include <exception>
#include <string>

#include <json.hpp>

#include "orbit_tracer/commands.hpp"
#include "orbit_tracer/config.hpp"
#include "orbit_tracer/error.hpp"
#include "orbit_tracer/numkit.hpp"

struct ot_config {
  orbit_tracer::config::RunConfig cfg;
};

struct ot_summary {
  orbit_tracer::commands::RunSummary summary;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

ot_status status_of(orbit_tracer::ErrorKind k) {
  using orbit_tracer::ErrorKind;
  switch (k) {
    case ErrorKind::Config: return OT_ERR_CONFIG;
    case ErrorKind::Numerical: return OT_ERR_NUMERICAL;
    case ErrorKind::NonConvergence: return OT_ERR_NONCONVERGENCE;
    case ErrorKind::InvalidArgument: return OT_ERR_INVALID_ARGUMENT;
    case ErrorKind::Io: return OT_ERR_IO;
    case ErrorKind::ModelFreeViolation: return OT_ERR_MODEL_FREE;
  }
  return OT_ERR_INTERNAL;
}

template <class F>
ot_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const orbit_tracer::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return OT_ERR_INTERNAL;
  }
}

ot_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap == 0) return OT_OK;
  if (cap < s.size() + 1) {
    g_last_error = "buffer too small";
    return OT_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return OT_OK;
}

ot_status null_arg(const char* what) {
  g_last_error = std::string(what) + " is NULL";
  return OT_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* ot_version(void) { return "1.0.0"; }

const char* ot_last_error(void) { return g_last_error.c_str(); }

ot_status ot_config_load(const char* path, ot_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new ot_config{orbit_tracer::config::parse_file(path)};
    return OT_OK;
  });
}

ot_status ot_config_parse(const char* json_text, const char* base_dir, ot_config** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      orbit_tracer::fail(orbit_tracer::ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
    }
    *out = new ot_config{orbit_tracer::config::parse(j, base_dir ? base_dir : ".")};
    return OT_OK;
  });
}

void ot_config_free(ot_config* cfg) { delete cfg; }

ot_status ot_config_set_output_dir(ot_config* cfg, const char* dir) {
  if (!cfg) return null_arg("cfg");
  if (!dir || !*dir) return null_arg("dir");
  cfg->cfg.output_dir = dir;
  return OT_OK;
}

ot_status ot_config_json(const ot_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { return copy_out(orbit_tracer::config::serialize(cfg->cfg).dump(2), buf, cap, needed); });
}

ot_status ot_run(const ot_config* cfg, const char* command, int threads, ot_log_fn log, void* user,
                 ot_summary** out) {
  if (!cfg) return null_arg("cfg");
  if (!command) return null_arg("command");
  if (!out) return null_arg("out");
  *out = nullptr;
  orbit_tracer::commands::RunOptions opt;
  opt.threads = threads < 1 ? 1 : threads;
  if (log) opt.log = [log, user](const std::string& line) { log(line.c_str(), user); };
  auto* s = new ot_summary;
  s->summary.command = command;
  ot_status st = guarded([&] {
    s->summary = orbit_tracer::commands::run(command, cfg->cfg, opt);
    if (s->summary.exit_code != 0) g_last_error = s->summary.message;
    return static_cast<ot_status>(s->summary.exit_code);
  });
  if (st != OT_OK && s->summary.exit_code == 0) {
    s->summary.status = "error";
    s->summary.exit_code = st;
    s->summary.message = g_last_error;
    s->summary.metrics = nlohmann::json::object();
    s->summary.outputs.clear();
  }
  const std::string err = g_last_error;
  try {
    orbit_tracer::commands::write_summary(cfg->cfg, s->summary);
  } catch (const std::exception& e) {
    if (st == OT_OK) {
      st = OT_ERR_IO;
      s->summary.status = "error";
      s->summary.exit_code = st;
      s->summary.message = e.what();
    }
  }
  g_last_error = st == OT_OK ? std::string() : (err.empty() ? s->summary.message : err);
  s->json = s->summary.to_json().dump(2);
  *out = s;
  return st;
}

ot_status ot_summary_json(const ot_summary* s, char* buf, size_t cap, size_t* needed) {
  if (!s) return null_arg("summary");
  return copy_out(s->json, buf, cap, needed);
}

ot_status ot_summary_metric(const ot_summary* s, const char* key, double* value) {
  if (!s) return null_arg("summary");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  const auto& m = s->summary.metrics;
  auto it = m.find(key);
  if (it == m.end() || !(it->is_number() || it->is_boolean())) {
    g_last_error = std::string("no numeric metric '") + key + "'";
    return OT_ERR_INVALID_ARGUMENT;
  }
  *value = it->is_boolean() ? (it->get<bool>() ? 1.0 : 0.0) : it->get<double>();
  return OT_OK;
}

int ot_summary_exit_code(const ot_summary* s) { return s ? s->summary.exit_code : OT_ERR_INVALID_ARGUMENT; }

void ot_summary_free(ot_summary* s) { delete s; }

ot_status ot_solve_lyapunov(int n, const double* A, const double* S, double* P) {
  if (n < 1 || n > 8) {
    g_last_error = "n must lie in [1, 8]";
    return OT_ERR_INVALID_ARGUMENT;
  }
  if (!A || !S || !P) return null_arg("matrix pointer");
  return guarded([&] {
    using M = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::MatrixXd a = Eigen::Map<const M>(A, n, n);
    const Eigen::MatrixXd s = Eigen::Map<const M>(S, n, n);
    const Eigen::MatrixXd p = orbit_tracer::numkit::solve_lyapunov(a, s);
    Eigen::Map<M>(P, n, n) = p;
    return OT_OK;
  });
}

}  // extern "C"
