// SPDX-License-Identifier: Apache-2.0
//
// raaloc - localization with retro-directive antenna arrays
// Copyright (C) 2026 The raaloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RAALOC_H
#define RAALOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RAALOC_API __declspec(dllexport)
#elif defined(__GNUC__)
#define RAALOC_API __attribute__((visibility("default")))
#else
#define RAALOC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum raaloc_status {
  RAALOC_OK = 0,
  RAALOC_ERR_INVALID_ARGUMENT = 1,
  RAALOC_ERR_PARSE = 2,       /* syntax or schema error in a scenario */
  RAALOC_ERR_VALIDATION = 3,  /* scenario parsed but violates an invariant */
  RAALOC_ERR_IO = 4,
  RAALOC_ERR_NUMERIC = 5,
  RAALOC_ERR_INTERNAL = 6
} raaloc_status;

typedef struct raaloc_scenario raaloc_scenario;
typedef struct raaloc_run raaloc_run;

typedef struct raaloc_summary {
  size_t samples;  /* fused position fixes */
  size_t outages;  /* steps with fewer than two bearings */
  double p50_m;    /* NaN when there are no samples */
  double p90_m;
  double p99_m;
} raaloc_summary;

RAALOC_API const char* raaloc_version(void);

/* Message of the last failed call on this thread; empty after success. */
RAALOC_API const char* raaloc_last_error(void);

/* Strings returned through char** are owned by the caller. */
RAALOC_API void raaloc_string_free(char* s);

RAALOC_API raaloc_status raaloc_scenario_load(const char* path, raaloc_scenario** out);
RAALOC_API raaloc_status raaloc_scenario_parse(const char* json_text, raaloc_scenario** out);
RAALOC_API void raaloc_scenario_free(raaloc_scenario* scenario);

RAALOC_API raaloc_status raaloc_scenario_set_seed(raaloc_scenario* scenario, uint64_t seed);
RAALOC_API raaloc_status raaloc_scenario_set_trials(raaloc_scenario* scenario, int trials);
/* mode: "free_space" or "multipath" */
RAALOC_API raaloc_status raaloc_scenario_set_channel(raaloc_scenario* scenario, const char* mode);
RAALOC_API raaloc_status raaloc_scenario_to_json(const raaloc_scenario* scenario, char** out);
RAALOC_API raaloc_status raaloc_scenario_config_hash(const raaloc_scenario* scenario, char** out);

/* Per-check report text; *passed is 1 when every check passed. A file that
   fails to parse still yields RAALOC_OK with a failed schema line. */
RAALOC_API raaloc_status raaloc_validate_file(const char* path, int* passed, char** report);
RAALOC_API raaloc_status raaloc_scenario_validate(const raaloc_scenario* scenario, int* passed,
                                                  char** report);

/* threads = 0 picks the hardware count capped by RAALOC_THREADS. */
RAALOC_API raaloc_status raaloc_simulate(const raaloc_scenario* scenario, unsigned threads,
                                         raaloc_run** out);
RAALOC_API void raaloc_run_free(raaloc_run* run);
RAALOC_API raaloc_status raaloc_run_write_bundle(const raaloc_run* run, const char* directory);
/* percent in (0, 100] over all fused-position errors, meters */
RAALOC_API raaloc_status raaloc_run_percentile(const raaloc_run* run, double percent, double* out);
RAALOC_API raaloc_status raaloc_run_summary(const raaloc_run* run, raaloc_summary* out);

/* CSV "k,snr1_db,...,snr_dec_db" of the convergence recursion with uniform
   initial power, maxima in dB (non-increasing). */
RAALOC_API raaloc_status raaloc_analyze_snr_trace(const double* max_snr_db, size_t count,
                                                  int elements, int iterations, char** csv);
/* Positive fixed point of x = S (x + 1) / (x + N), linear. */
RAALOC_API raaloc_status raaloc_analyze_equilibrium(double max_snr_db, int elements, double* out);
/* Largest speed (m/s) at which reusing the previous beam still pays off. */
RAALOC_API raaloc_status raaloc_analyze_speed_bound(double distance_m, double step_interval_s,
                                                    int elements, double* out);
/* SNR_max and SNR_boot (linear) for the scenario RF parameters. */
RAALOC_API raaloc_status raaloc_analyze_link_budget(const raaloc_scenario* scenario,
                                                    int trx_elements, int raa_elements,
                                                    double distance_m, double* max_snr,
                                                    double* bootstrap_snr);

#ifdef __cplusplus
}
#endif

#endif
