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

#ifndef ORBIT_TRACER_H_
#define ORBIT_TRACER_H_

#include <stddef.h>

#if defined(_WIN32)
#if defined(ORBIT_TRACER_BUILDING_DLL)
#define OT_API __declspec(dllexport)
#else
#define OT_API __declspec(dllimport)
#endif
#else
#define OT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ot_status {
  OT_OK = 0,
  OT_ERR_CONFIG = 1,
  OT_ERR_NUMERICAL = 2,
  OT_ERR_NONCONVERGENCE = 3,
  OT_ERR_INVALID_ARGUMENT = 4,
  OT_ERR_IO = 5,
  OT_ERR_MODEL_FREE = 6,
  OT_ERR_INTERNAL = 7
} ot_status;

typedef struct ot_config ot_config;
typedef struct ot_summary ot_summary;

typedef void (*ot_log_fn)(const char* line, void* user);

/* Library version, e.g. "1.0.0". */
OT_API const char* ot_version(void);

/* Message of the last failed call on this thread; "" if none. */
OT_API const char* ot_last_error(void);

OT_API ot_status ot_config_load(const char* path, ot_config** out);
/* base_dir resolves relative reference files; may be NULL. */
OT_API ot_status ot_config_parse(const char* json_text, const char* base_dir, ot_config** out);
OT_API void ot_config_free(ot_config* cfg);
OT_API ot_status ot_config_set_output_dir(ot_config* cfg, const char* dir);

/* Copies the normalized config JSON into buf (NUL-terminated). *needed
   receives the required size including the terminator. buf may be NULL
   when cap is 0. */
OT_API ot_status ot_config_json(const ot_config* cfg, char* buf, size_t cap, size_t* needed);

/* Runs simulate, continue, sweep or pe-check. threads caps Jacobian
   concurrency (values < 1 mean 1). On return *out holds a summary even for
   failed runs, and summary.json has been written to the output directory
   when possible. The return value is the run's status. */
OT_API ot_status ot_run(const ot_config* cfg, const char* command, int threads, ot_log_fn log, void* user,
                        ot_summary** out);

OT_API ot_status ot_summary_json(const ot_summary* s, char* buf, size_t cap, size_t* needed);
/* Numeric or boolean metric by key; OT_ERR_INVALID_ARGUMENT if absent. */
OT_API ot_status ot_summary_metric(const ot_summary* s, const char* key, double* value);
OT_API int ot_summary_exit_code(const ot_summary* s);
OT_API void ot_summary_free(ot_summary* s);

/* P A + A^T P = -S for row-major n x n A and S. */
OT_API ot_status ot_solve_lyapunov(int n, const double* A, const double* S, double* P);

#ifdef __cplusplus
}
#endif

#endif /* ORBIT_TRACER_H_ */
