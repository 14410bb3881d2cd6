// Copyright 2026 The filsa Authors.
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


#include "filsa/filsa.h"

#include "filsa/config.hpp"
#include "filsa/csv.hpp"
#include "filsa/error.hpp"
#include "filsa/experiment.hpp"
#include "filsa/field.hpp"
#include "filsa/hull.hpp"
#include "filsa/inclusion.hpp"
#include "filsa/measures.hpp"
#include "filsa/sa.hpp"
#include "filsa/tracking.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct filsa_field {
    filsa::PiecewiseField value;
};
struct filsa_trace {
    filsa::IterateTrace value;
};
struct filsa_trajectory {
    filsa::Trajectory value;
};
struct filsa_config {
    filsa::ExperimentConfig value;
};

namespace {

thread_local std::string g_last_error;

int status_of(filsa::ErrorCode code) {
    using filsa::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return FILSA_E_INVALID_ARGUMENT;
        case ErrorCode::UnassignedPattern: return FILSA_E_UNASSIGNED_PATTERN;
        case ErrorCode::EmptySet: return FILSA_E_EMPTY_SET;
        case ErrorCode::OutOfDomain: return FILSA_E_OUT_OF_DOMAIN;
        case ErrorCode::IndexOutOfRange: return FILSA_E_INDEX_OUT_OF_RANGE;
        case ErrorCode::DivergedIterate: return FILSA_E_DIVERGED_ITERATE;
        case ErrorCode::WindowExceedsTrace: return FILSA_E_WINDOW_EXCEEDS_TRACE;
        case ErrorCode::DegenerateGeometry: return FILSA_E_DEGENERATE_GEOMETRY;
        case ErrorCode::StepTooLarge: return FILSA_E_STEP_TOO_LARGE;
        case ErrorCode::EmptyTrace: return FILSA_E_EMPTY_TRACE;
        case ErrorCode::ConfigInvalid: return FILSA_E_CONFIG_INVALID;
        case ErrorCode::IoFailure: return FILSA_E_IO_FAILURE;
    }
    return FILSA_E_INTERNAL;
}

int fail(int status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <typename Body>
int guarded(Body body) {
    try {
        g_last_error.clear();
        return body();
    } catch (const filsa::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(FILSA_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(FILSA_E_INTERNAL, e.what());
    } catch (...) {
        return fail(FILSA_E_INTERNAL, "unknown exception");
    }
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

filsa::Vec read_vec(const double* data, std::size_t d) {
    return Eigen::Map<const filsa::Vec>(data, static_cast<Eigen::Index>(d));
}

void write_vec(const filsa::Vec& v, double* out) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

int write_hull(const filsa::ConvexVelocitySet& set, double* out, std::size_t capacity, std::size_t* count) {
    *count = set.vertices.size();
    if (set.vertices.size() > capacity)
        return fail(FILSA_E_BUFFER_TOO_SMALL, "vertex buffer holds " + std::to_string(capacity) + " of " +
                                                  std::to_string(set.vertices.size()) + " vertices");
    std::size_t offset = 0;
    for (const auto& v : set.vertices) {
        write_vec(v, out + offset);
        offset += static_cast<std::size_t>(v.size());
    }
    return FILSA_OK;
}

#define FILSA_REQUIRE(cond)                                                          \
    do {                                                                             \
        if (!(cond)) return fail(FILSA_E_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
    } while (0)

}  // namespace

extern "C" {

const char* filsa_last_error(void) { return g_last_error.c_str(); }

const char* filsa_status_name(int status) {
    switch (status) {
        case FILSA_OK: return "ok";
        case FILSA_E_INVALID_ARGUMENT: return "InvalidArgument";
        case FILSA_E_UNASSIGNED_PATTERN: return "UnassignedPattern";
        case FILSA_E_EMPTY_SET: return "EmptySet";
        case FILSA_E_OUT_OF_DOMAIN: return "OutOfDomain";
        case FILSA_E_INDEX_OUT_OF_RANGE: return "IndexOutOfRange";
        case FILSA_E_DIVERGED_ITERATE: return "DivergedIterate";
        case FILSA_E_WINDOW_EXCEEDS_TRACE: return "WindowExceedsTrace";
        case FILSA_E_DEGENERATE_GEOMETRY: return "DegenerateGeometry";
        case FILSA_E_STEP_TOO_LARGE: return "StepTooLarge";
        case FILSA_E_EMPTY_TRACE: return "EmptyTrace";
        case FILSA_E_CONFIG_INVALID: return "ConfigInvalid";
        case FILSA_E_IO_FAILURE: return "IoFailure";
        case FILSA_E_BUFFER_TOO_SMALL: return "BufferTooSmall";
        default: return "Internal";
    }
}

void filsa_string_free(char* text) { std::free(text); }

int filsa_field_builtin(const char* name, size_t dimension, filsa_field** out) {
    FILSA_REQUIRE(name && out);
    return guarded([&]() -> int {
        *out = new filsa_field{filsa::builtin_field(name, static_cast<Eigen::Index>(dimension))};
        return FILSA_OK;
    });
}

int filsa_field_from_json(const char* json_text, size_t default_dimension, filsa_field** out) {
    FILSA_REQUIRE(json_text && out);
    return guarded([&]() -> int {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw filsa::Error(filsa::ErrorCode::ConfigInvalid, std::string("field: malformed JSON: ") + e.what());
        }
        *out = new filsa_field{filsa::parse_field(doc, static_cast<Eigen::Index>(default_dimension))};
        return FILSA_OK;
    });
}

void filsa_field_free(filsa_field* field) { delete field; }

size_t filsa_field_dimension(const filsa_field* field) {
    return field ? static_cast<size_t>(field->value.dimension()) : 0;
}

int filsa_field_evaluate(const filsa_field* field, const double* x, double* out) {
    FILSA_REQUIRE(field && x && out);
    return guarded([&]() -> int {
        const auto d = static_cast<std::size_t>(field->value.dimension());
        write_vec(filsa::evaluate_field(field->value, read_vec(x, d)), out);
        return FILSA_OK;
    });
}

int filsa_field_filippov(const filsa_field* field, const double* x, double radius_tol, double* out, size_t capacity,
                         size_t* count) {
    FILSA_REQUIRE(field && x && count && (out || capacity == 0));
    return guarded([&]() -> int {
        const auto d = static_cast<std::size_t>(field->value.dimension());
        return write_hull(filsa::filippov_map(field->value, read_vec(x, d), radius_tol), out, capacity, count);
    });
}

int filsa_field_krasovskii(const filsa_field* field, const double* x, double radius_tol, double* out,
                           size_t capacity, size_t* count) {
    FILSA_REQUIRE(field && x && count && (out || capacity == 0));
    return guarded([&]() -> int {
        const auto d = static_cast<std::size_t>(field->value.dimension());
        return write_hull(filsa::krasovskii_map(field->value, read_vec(x, d), radius_tol), out, capacity, count);
    });
}

int filsa_hull_project(const double* vertices, size_t count, size_t dimension, const double* v, double* point_out,
                       double* distance_out) {
    FILSA_REQUIRE((vertices || count == 0) && v && dimension > 0);
    return guarded([&]() -> int {
        filsa::ConvexVelocitySet set;
        for (std::size_t i = 0; i < count; ++i) set.vertices.push_back(read_vec(vertices + i * dimension, dimension));
        const auto projection = filsa::project_onto_hull(set, read_vec(v, dimension));
        if (point_out) write_vec(projection.point, point_out);
        if (distance_out) *distance_out = projection.distance;
        return FILSA_OK;
    });
}

int filsa_run_sa(const filsa_field* field, const double* x0, const filsa_schedule* schedule, const filsa_noise* noise,
                 size_t n_steps, uint64_t seed, double blowup_bound, filsa_trace** out) {
    FILSA_REQUIRE(field && x0 && schedule && noise && out);
    return guarded([&]() -> int {
        filsa::StepsizeSchedule s;
        switch (schedule->kind) {
            case FILSA_SCHEDULE_POWER: s = filsa::StepsizeSchedule::power(schedule->a0, schedule->gamma); break;
            case FILSA_SCHEDULE_CONSTANT: s = filsa::StepsizeSchedule::constant(schedule->a0); break;
            case FILSA_SCHEDULE_CUSTOM:
                if (!schedule->values && schedule->n_values > 0)
                    return fail(FILSA_E_INVALID_ARGUMENT, "custom schedule without values");
                s = filsa::StepsizeSchedule::custom(
                    std::vector<double>(schedule->values, schedule->values + schedule->n_values));
                break;
            default: return fail(FILSA_E_INVALID_ARGUMENT, "unknown schedule kind");
        }
        filsa::NoiseModel m;
        switch (noise->kind) {
            case FILSA_NOISE_GAUSSIAN: m.kind = filsa::NoiseKind::Gaussian; break;
            case FILSA_NOISE_UNIFORM_BALL: m.kind = filsa::NoiseKind::UniformBall; break;
            case FILSA_NOISE_RADEMACHER: m.kind = filsa::NoiseKind::Rademacher; break;
            case FILSA_NOISE_ZERO: m.kind = filsa::NoiseKind::Zero; break;
            default: return fail(FILSA_E_INVALID_ARGUMENT, "unknown noise kind");
        }
        m.scale = noise->scale;
        filsa::RunOptions options;
        options.blowup_bound = blowup_bound;
        const auto d = static_cast<std::size_t>(field->value.dimension());
        *out = new filsa_trace{filsa::run_sa(field->value, read_vec(x0, d), s, m, n_steps, seed, options)};
        return FILSA_OK;
    });
}

int filsa_trace_parse_csv(const char* csv_text, filsa_trace** out) {
    FILSA_REQUIRE(csv_text && out);
    return guarded([&]() -> int {
        *out = new filsa_trace{filsa::parse_trace_csv(csv_text)};
        return FILSA_OK;
    });
}

void filsa_trace_free(filsa_trace* trace) { delete trace; }

size_t filsa_trace_size(const filsa_trace* trace) { return trace ? trace->value.size() : 0; }

size_t filsa_trace_dimension(const filsa_trace* trace) {
    return trace ? static_cast<size_t>(trace->value.dimension()) : 0;
}

int filsa_trace_state(const filsa_trace* trace, size_t n, double* out) {
    FILSA_REQUIRE(trace && out);
    if (n >= trace->value.states.size()) return fail(FILSA_E_INDEX_OUT_OF_RANGE, "state index beyond trace");
    write_vec(trace->value.states[n], out);
    return FILSA_OK;
}

int filsa_trace_time(const filsa_trace* trace, size_t n, double* out) {
    FILSA_REQUIRE(trace && out);
    return guarded([&]() -> int {
        *out = filsa::algorithmic_time(trace->value, n);
        return FILSA_OK;
    });
}

int filsa_trace_interpolate(const filsa_trace* trace, double t, double* out) {
    FILSA_REQUIRE(trace && out);
    return guarded([&]() -> int {
        write_vec(filsa::interpolate(trace->value, t), out);
        return FILSA_OK;
    });
}

int filsa_trace_window_index(const filsa_trace* trace, size_t n, double T, size_t* out) {
    FILSA_REQUIRE(trace && out);
    return guarded([&]() -> int {
        *out = filsa::window_index(trace->value, n, T);
        return FILSA_OK;
    });
}

int filsa_trace_csv(const filsa_trace* trace, char** out) {
    FILSA_REQUIRE(trace && out);
    return guarded([&]() -> int {
        *out = dup_string(filsa::trace_csv(trace->value));
        return FILSA_OK;
    });
}

int filsa_integrate_filippov(const filsa_field* field, const double* x0, double t_end, double dt,
                             filsa_trajectory** out) {
    FILSA_REQUIRE(field && x0 && out);
    return guarded([&]() -> int {
        const auto d = static_cast<std::size_t>(field->value.dimension());
        *out = new filsa_trajectory{filsa::integrate_filippov(field->value, read_vec(x0, d), t_end, dt)};
        return FILSA_OK;
    });
}

void filsa_trajectory_free(filsa_trajectory* trajectory) { delete trajectory; }

size_t filsa_trajectory_size(const filsa_trajectory* trajectory) { return trajectory ? trajectory->value.size() : 0; }

int filsa_trajectory_at(const filsa_trajectory* trajectory, double t, double* out) {
    FILSA_REQUIRE(trajectory && out);
    return guarded([&]() -> int {
        write_vec(trajectory->value.at(t), out);
        return FILSA_OK;
    });
}

int filsa_trajectory_csv(const filsa_trajectory* trajectory, char** out) {
    FILSA_REQUIRE(trajectory && out);
    return guarded([&]() -> int {
        *out = dup_string(filsa::trajectory_csv(trajectory->value));
        return FILSA_OK;
    });
}

int filsa_tracking_profile(const filsa_trace* trace, const filsa_field* field, double T, size_t n_windows, double dt,
                           double* errors_out) {
    FILSA_REQUIRE(trace && field && errors_out);
    return guarded([&]() -> int {
        const auto report = filsa::tracking_profile(trace->value, field->value, T, n_windows, dt, false);
        for (std::size_t j = 0; j < report.errors.size(); ++j) errors_out[j] = report.errors[j];
        return FILSA_OK;
    });
}

int filsa_support_fractions(const filsa_trace* trace, const filsa_field* field, const double* eps, size_t n_eps,
                            double radius_tol, double* filippov_out, double* krasovskii_out) {
    FILSA_REQUIRE(trace && field && eps && filippov_out && krasovskii_out);
    return guarded([&]() -> int {
        const auto measure = filsa::averaged_measure(trace->value, trace->value.size());
        const auto rows = filsa::graph_support_fractions(measure, field->value, std::vector<double>(eps, eps + n_eps),
                                                         radius_tol);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            filippov_out[i] = rows[i].filippov;
            krasovskii_out[i] = rows[i].krasovskii;
        }
        return FILSA_OK;
    });
}

int filsa_config_load(const char* path, filsa_config** out) {
    FILSA_REQUIRE(path && out);
    return guarded([&]() -> int {
        *out = new filsa_config{filsa::load_config(path)};
        return FILSA_OK;
    });
}

int filsa_config_parse(const char* json_text, filsa_config** out) {
    FILSA_REQUIRE(json_text && out);
    return guarded([&]() -> int {
        *out = new filsa_config{filsa::parse_config(json_text)};
        return FILSA_OK;
    });
}

void filsa_config_free(filsa_config* config) { delete config; }

int filsa_config_set_seeds(filsa_config* config, const uint64_t* seeds, size_t count) {
    FILSA_REQUIRE(config && seeds);
    if (count == 0) return fail(FILSA_E_CONFIG_INVALID, "seeds: expected at least one seed");
    config->value.seeds.assign(seeds, seeds + count);
    return FILSA_OK;
}

int filsa_config_set_output_dir(filsa_config* config, const char* dir) {
    FILSA_REQUIRE(config && dir);
    config->value.output_dir = dir;
    return FILSA_OK;
}

int filsa_config_output_dir(const filsa_config* config, char** out) {
    FILSA_REQUIRE(config && out);
    return guarded([&]() -> int {
        *out = dup_string(config->value.output_dir.string());
        return FILSA_OK;
    });
}

int filsa_config_field(const filsa_config* config, filsa_field** out) {
    FILSA_REQUIRE(config && out);
    return guarded([&]() -> int {
        *out = new filsa_field{config->value.field};
        return FILSA_OK;
    });
}

int filsa_run_experiment(const filsa_config* config, int* any_diverged, char** summary_out) {
    FILSA_REQUIRE(config && any_diverged);
    return guarded([&]() -> int {
        const auto report = filsa::run_experiment(config->value, config->value.output_dir);
        *any_diverged = report.any_diverged ? 1 : 0;
        if (summary_out) *summary_out = dup_string(report.summary.dump(2));
        return FILSA_OK;
    });
}

int filsa_run_noise_study(const filsa_config* config, int* any_diverged, char** summary_out) {
    FILSA_REQUIRE(config && any_diverged);
    return guarded([&]() -> int {
        const auto report = filsa::compare_noise_study(config->value, config->value.output_dir);
        *any_diverged = report.summary.value("any_diverged", false) ? 1 : 0;
        if (summary_out) *summary_out = dup_string(report.summary.dump(2));
        return FILSA_OK;
    });
}

int filsa_run_integrate(const filsa_config* config, char** trajectory_csv_out) {
    FILSA_REQUIRE(config);
    return guarded([&]() -> int {
        const auto trajectory = filsa::run_integrate(config->value, config->value.output_dir);
        if (trajectory_csv_out) *trajectory_csv_out = dup_string(filsa::trajectory_csv(trajectory));
        return FILSA_OK;
    });
}

int filsa_maps_json(const filsa_config* config, char** out) {
    FILSA_REQUIRE(config && out);
    return guarded([&]() -> int {
        *out = dup_string(filsa::maps_report(config->value).dump(2));
        return FILSA_OK;
    });
}

int filsa_recompute_measures(const filsa_config* config, const char* const* trace_paths, size_t count) {
    FILSA_REQUIRE(config && (trace_paths || count == 0));
    return guarded([&]() -> int {
        std::vector<std::filesystem::path> paths;
        for (std::size_t i = 0; i < count; ++i) {
            if (!trace_paths[i]) return fail(FILSA_E_INVALID_ARGUMENT, "null trace path");
            paths.emplace_back(trace_paths[i]);
        }
        filsa::recompute_measures(config->value, paths, config->value.output_dir);
        return FILSA_OK;
    });
}

}  // extern "C"
