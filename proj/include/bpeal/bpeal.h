// Copyright 2026 The bpeal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the bpeal phase-estimation library.
 *
 * All objects are opaque handles created by a *_create / *_load / *_read
 * call and released with the matching *_destroy. Every fallible call
 * returns a bpeal_status; on failure a thread-local message is available
 * from bpeal_last_error() until the next call on the same thread. */

#ifndef BPEAL_BPEAL_H_
#define BPEAL_BPEAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BPEAL_BUILDING_LIBRARY)
#    define BPEAL_API __declspec(dllexport)
#  else
#    define BPEAL_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) || defined(__clang__)
#  define BPEAL_API __attribute__((visibility("default")))
#else
#  define BPEAL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bpeal_status {
  BPEAL_OK = 0,
  BPEAL_E_INVALID_ARGUMENT = 1,
  BPEAL_E_CONFIG = 2,
  BPEAL_E_IO = 3,
  BPEAL_E_NUMERIC = 4,
  BPEAL_E_CONTRACT = 5,
  BPEAL_E_INTERNAL = 6
} bpeal_status;

typedef struct bpeal_config bpeal_config;
typedef struct bpeal_profile bpeal_profile;
typedef struct bpeal_run bpeal_run;
typedef struct bpeal_sweep bpeal_sweep;
typedef struct bpeal_posterior bpeal_posterior;

typedef struct bpeal_trial_summary {
  double phi_est;
  double uncertainty;
  double error;
  int64_t n_meas;
  int k_prime; /* -1 when the algorithm does not learn */
  int fallback;
} bpeal_trial_summary;

typedef struct bpeal_bound_report {
  size_t grid_size;
  double phi_est;
  double uncertainty;
  double ghosh_bound; /* NaN when undefined */
  double gaussian_bound;
  int resolution_flag;
  int defined;
} bpeal_bound_report;

BPEAL_API const char* bpeal_version(void);
BPEAL_API const char* bpeal_last_error(void);

/* Configuration. Keys match the config-file keys. */
BPEAL_API bpeal_status bpeal_config_create(bpeal_config** out);
BPEAL_API bpeal_status bpeal_config_load(const char* path, bpeal_config** out);
BPEAL_API bpeal_status bpeal_config_set(bpeal_config* config, const char* key, const char* value);
BPEAL_API bpeal_status bpeal_config_validate(const bpeal_config* config);
BPEAL_API bpeal_status bpeal_config_get_seed(const bpeal_config* config, uint64_t* out);
/* Writes the config as a key = value document. If buffer is too small the
 * call fails with BPEAL_E_INVALID_ARGUMENT; *needed always receives the
 * size including the terminator. */
BPEAL_API bpeal_status bpeal_config_serialize(const bpeal_config* config, char* buffer, size_t capacity,
                                              size_t* needed);
BPEAL_API void bpeal_config_destroy(bpeal_config* config);

/* Learning profiles. */
BPEAL_API bpeal_status bpeal_learn(const bpeal_config* config, bpeal_profile** out);
BPEAL_API bpeal_status bpeal_profile_read(const char* path, bpeal_profile** out);
BPEAL_API bpeal_status bpeal_profile_write(const bpeal_profile* profile, const char* path);
BPEAL_API bpeal_status bpeal_profile_k_prime(const bpeal_profile* profile, int* out);
BPEAL_API bpeal_status bpeal_profile_fallback(const bpeal_profile* profile, int* out);
/* Copies up to capacity selected indices (1-based); *count gets k'. */
BPEAL_API bpeal_status bpeal_profile_selected(const bpeal_profile* profile, int* indices, size_t capacity,
                                              size_t* count);
BPEAL_API void bpeal_profile_destroy(bpeal_profile* profile);

/* Monte Carlo runs. workers <= 0 uses BPEAL_WORKERS or the hardware
 * concurrency. profile may be NULL; when given, every active-learning
 * trial shares it instead of learning its own. */
BPEAL_API bpeal_status bpeal_run_create(const bpeal_config* config, int trials, int workers,
                                        const bpeal_profile* profile, bpeal_run** out);
BPEAL_API bpeal_status bpeal_run_trial_count(const bpeal_run* run, int* out);
BPEAL_API bpeal_status bpeal_run_trial(const bpeal_run* run, int trial, bpeal_trial_summary* out);
BPEAL_API bpeal_status bpeal_run_write_trace(const bpeal_run* run, const char* path);
BPEAL_API bpeal_status bpeal_run_write_summary(const bpeal_run* run, const char* path);
/* Final posterior of trial 0 as phi,weight CSV. */
BPEAL_API bpeal_status bpeal_run_write_posterior(const bpeal_run* run, const char* path);
BPEAL_API void bpeal_run_destroy(bpeal_run* run);

/* Parameter sweeps. axis is one of phi, particles, depolarization,
 * phase-noise, updates. */
BPEAL_API bpeal_status bpeal_sweep_create(const bpeal_config* config, const char* axis, const double* values,
                                          size_t count, int trials, int workers, bpeal_sweep** out);
BPEAL_API bpeal_status bpeal_sweep_point_count(const bpeal_sweep* sweep, size_t* out);
BPEAL_API bpeal_status bpeal_sweep_k_prime(const bpeal_sweep* sweep, size_t point, double* mean, double* median);
BPEAL_API bpeal_status bpeal_sweep_write(const bpeal_sweep* sweep, const char* path);
BPEAL_API void bpeal_sweep_destroy(bpeal_sweep* sweep);
/* Phases at the cell centres 2 pi (j + 1/2) / count; fills count values. */
BPEAL_API bpeal_status bpeal_phi_axis_values(int count, double* values);

/* Stored posteriors and the bound report. */
BPEAL_API bpeal_status bpeal_posterior_read(const char* path, bpeal_posterior** out);
BPEAL_API bpeal_status bpeal_posterior_bound(const bpeal_posterior* posterior, bpeal_bound_report* out);
BPEAL_API void bpeal_posterior_destroy(bpeal_posterior* posterior);

/* Run manifest: config snapshot, seed, version, timestamps and SHA-256 of
 * each listed output. Write it after the outputs are complete. */
BPEAL_API bpeal_status bpeal_manifest_write(const char* path, const bpeal_config* config, const char* command,
                                            const char* flags, const char* started_utc,
                                            const char* const* outputs, size_t output_count);
/* Fills buffer (at least 21 bytes) with the current UTC time. */
BPEAL_API bpeal_status bpeal_utc_now(char* buffer, size_t capacity);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* BPEAL_BPEAL_H_ */
