/*
 * Copyright 2026 The filsa Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FILSA_FILSA_H_
#define FILSA_FILSA_H_

/*
 * C interface to libfilsa. Objects are opaque handles released with the
 * matching *_free function. Every fallible call returns a filsa_status; on
 * failure filsa_last_error() describes the problem for the calling thread.
 * Strings returned through char** are heap allocated and released with
 * filsa_string_free. Vectors are plain double arrays of the field dimension;
 * vertex lists are row-major (count x dimension).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FILSA_API __declspec(dllexport)
#else
#define FILSA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum filsa_status {
    FILSA_OK = 0,
    FILSA_E_INVALID_ARGUMENT = 1,
    FILSA_E_UNASSIGNED_PATTERN = 2,
    FILSA_E_EMPTY_SET = 3,
    FILSA_E_OUT_OF_DOMAIN = 4,
    FILSA_E_INDEX_OUT_OF_RANGE = 5,
    FILSA_E_DIVERGED_ITERATE = 6,
    FILSA_E_WINDOW_EXCEEDS_TRACE = 7,
    FILSA_E_DEGENERATE_GEOMETRY = 8,
    FILSA_E_STEP_TOO_LARGE = 9,
    FILSA_E_EMPTY_TRACE = 10,
    FILSA_E_CONFIG_INVALID = 11,
    FILSA_E_IO_FAILURE = 12,
    FILSA_E_BUFFER_TOO_SMALL = 13,
    FILSA_E_INTERNAL = 99
} filsa_status;

typedef struct filsa_field filsa_field;
typedef struct filsa_trace filsa_trace;
typedef struct filsa_trajectory filsa_trajectory;
typedef struct filsa_config filsa_config;

typedef enum filsa_schedule_kind {
    FILSA_SCHEDULE_POWER = 0,
    FILSA_SCHEDULE_CONSTANT = 1,
    FILSA_SCHEDULE_CUSTOM = 2
} filsa_schedule_kind;

typedef struct filsa_schedule {
    int kind;              /* filsa_schedule_kind */
    double a0;             /* power: a0 / (n+1)^gamma; constant: the step */
    double gamma;
    const double* values;  /* custom only */
    size_t n_values;
} filsa_schedule;

typedef enum filsa_noise_kind {
    FILSA_NOISE_GAUSSIAN = 0,
    FILSA_NOISE_UNIFORM_BALL = 1,
    FILSA_NOISE_RADEMACHER = 2,
    FILSA_NOISE_ZERO = 3
} filsa_noise_kind;

typedef struct filsa_noise {
    int kind;  /* filsa_noise_kind */
    double scale;
} filsa_noise;

FILSA_API const char* filsa_last_error(void);
FILSA_API const char* filsa_status_name(int status);
FILSA_API void filsa_string_free(char* text);

/* Fields */
FILSA_API int filsa_field_builtin(const char* name, size_t dimension, filsa_field** out);
/* Same JSON encoding as the "field" entry of a config file. */
FILSA_API int filsa_field_from_json(const char* json_text, size_t default_dimension, filsa_field** out);
FILSA_API void filsa_field_free(filsa_field* field);
FILSA_API size_t filsa_field_dimension(const filsa_field* field);
FILSA_API int filsa_field_evaluate(const filsa_field* field, const double* x, double* out);
/* Vertices written to out (capacity rows); *count receives the vertex count
 * even when FILSA_E_BUFFER_TOO_SMALL is returned. */
FILSA_API int filsa_field_filippov(const filsa_field* field, const double* x, double radius_tol, double* out,
                                   size_t capacity, size_t* count);
FILSA_API int filsa_field_krasovskii(const filsa_field* field, const double* x, double radius_tol, double* out,
                                     size_t capacity, size_t* count);

/* Hull of `count` row-major vertices of length `dimension`. */
FILSA_API int filsa_hull_project(const double* vertices, size_t count, size_t dimension, const double* v,
                                 double* point_out, double* distance_out);

/* Stochastic approximation */
FILSA_API int filsa_run_sa(const filsa_field* field, const double* x0, const filsa_schedule* schedule,
                           const filsa_noise* noise, size_t n_steps, uint64_t seed, double blowup_bound,
                           filsa_trace** out);
FILSA_API int filsa_trace_parse_csv(const char* csv_text, filsa_trace** out);
FILSA_API void filsa_trace_free(filsa_trace* trace);
FILSA_API size_t filsa_trace_size(const filsa_trace* trace);
FILSA_API size_t filsa_trace_dimension(const filsa_trace* trace);
FILSA_API int filsa_trace_state(const filsa_trace* trace, size_t n, double* out);
FILSA_API int filsa_trace_time(const filsa_trace* trace, size_t n, double* out);
FILSA_API int filsa_trace_interpolate(const filsa_trace* trace, double t, double* out);
FILSA_API int filsa_trace_window_index(const filsa_trace* trace, size_t n, double T, size_t* out);
FILSA_API int filsa_trace_csv(const filsa_trace* trace, char** out);

/* Filippov solutions */
FILSA_API int filsa_integrate_filippov(const filsa_field* field, const double* x0, double t_end, double dt,
                                       filsa_trajectory** out);
FILSA_API void filsa_trajectory_free(filsa_trajectory* trajectory);
FILSA_API size_t filsa_trajectory_size(const filsa_trajectory* trajectory);
FILSA_API int filsa_trajectory_at(const filsa_trajectory* trajectory, double t, double* out);
FILSA_API int filsa_trajectory_csv(const filsa_trajectory* trajectory, char** out);

/* Diagnostics */
FILSA_API int filsa_tracking_profile(const filsa_trace* trace, const filsa_field* field, double T,
                                     size_t n_windows, double dt, double* errors_out);
FILSA_API int filsa_support_fractions(const filsa_trace* trace, const filsa_field* field, const double* eps,
                                      size_t n_eps, double radius_tol, double* filippov_out,
                                      double* krasovskii_out);

/* Experiment pipelines (the CLI surface) */
FILSA_API int filsa_config_load(const char* path, filsa_config** out);
FILSA_API int filsa_config_parse(const char* json_text, filsa_config** out);
FILSA_API void filsa_config_free(filsa_config* config);
FILSA_API int filsa_config_set_seeds(filsa_config* config, const uint64_t* seeds, size_t count);
FILSA_API int filsa_config_set_output_dir(filsa_config* config, const char* dir);
FILSA_API int filsa_config_output_dir(const filsa_config* config, char** out);
FILSA_API int filsa_config_field(const filsa_config* config, filsa_field** out);

/* Writes per-seed CSVs and summary.json; *any_diverged is set to 1 when at
 * least one seed raised a diverged iterate. summary_out may be NULL. */
FILSA_API int filsa_run_experiment(const filsa_config* config, int* any_diverged, char** summary_out);
FILSA_API int filsa_run_noise_study(const filsa_config* config, int* any_diverged, char** summary_out);
FILSA_API int filsa_run_integrate(const filsa_config* config, char** trajectory_csv_out);
FILSA_API int filsa_maps_json(const filsa_config* config, char** out);
FILSA_API int filsa_recompute_measures(const filsa_config* config, const char* const* trace_paths, size_t count);

#ifdef __cplusplus
}
#endif

#endif /* FILSA_FILSA_H_ */
