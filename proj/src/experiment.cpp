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


#include "filsa/experiment.hpp"

#include "filsa/csv.hpp"
#include "filsa/error.hpp"
#include "filsa/inclusion.hpp"
#include "filsa/tracking.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace filsa {

namespace {

using nlohmann::json;

json vec_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json hull_json(const ConvexVelocitySet& set) {
    json out = json::array();
    for (const auto& v : set.vertices) out.push_back(vec_json(v));
    return out;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

// Runs body(i) for i in [0, count) on a small pool. The first exception is
// rethrown after all workers have joined.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

InclusionOptions inclusion_options(const ExperimentConfig& config) {
    InclusionOptions options;
    options.radius_tol = config.radius_tol;
    return options;
}

// Diagnostics for one finished trace. Files are written under out_dir with the
// given stem; problems that only affect one report become warnings.
SeedOutcome analyze_trace(const ExperimentConfig& config, const IterateTrace& trace, bool noise_flag,
                          const std::filesystem::path& out_dir, const std::string& stem,
                          std::vector<std::string>& warnings) {
    SeedOutcome outcome;
    outcome.seed = trace.seed;
    outcome.steps = trace.size();
    outcome.final_time = trace.times.back();
    outcome.final_state = trace.states.back();

    TrackingReport tracking;
    tracking.window_T = config.tracking.T;
    tracking.noise_flag = noise_flag;
    try {
        tracking = tracking_profile(trace, config.field, config.tracking.T, config.tracking.n_windows,
                                    config.tracking.dt, noise_flag, inclusion_options(config));
        outcome.tracking_errors = tracking.errors;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoFailure) throw;
        warnings.push_back(stem + ": tracking skipped (" + e.what() + ")");
    }
    write_file_atomic(out_dir / ("tracking_" + stem + ".csv"), tracking_csv(tracking));

    const EmpiricalMeasure full = averaged_measure(trace, trace.size());
    const auto family = TestFunctionFamily::gaussian_monomials(full.box_B);
    DecayTable table;
    try {
        table = residual_decay_study({trace}, family, resolve_checkpoints(config, trace));
        outcome.final_residual = table.rows.back().member_residual;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoFailure) throw;
        warnings.push_back(stem + ": residual study skipped (" + e.what() + ")");
    }
    write_file_atomic(out_dir / ("residuals_" + stem + ".csv"), residuals_csv(table));

    outcome.support = graph_support_fractions(full, config.field, config.measures.eps, config.radius_tol);
    write_file_atomic(out_dir / ("support_" + stem + ".csv"), support_csv(outcome.support));
    return outcome;
}

json outcome_json(const SeedOutcome& outcome) {
    json j;
    j["seed"] = outcome.seed;
    j["diverged"] = outcome.diverged;
    if (!outcome.error.empty()) j["error"] = outcome.error;
    j["steps"] = outcome.steps;
    j["final_time"] = outcome.final_time;
    if (outcome.final_state.size() > 0) j["final_state"] = vec_json(outcome.final_state);
    j["tracking_errors"] = outcome.tracking_errors;
    if (!outcome.tracking_errors.empty()) j["tracking_max"] = *std::max_element(outcome.tracking_errors.begin(),
                                                                                outcome.tracking_errors.end());
    json support = json::array();
    for (const auto& row : outcome.support)
        support.push_back({{"eps", row.eps}, {"filippov", row.filippov}, {"krasovskii", row.krasovskii}});
    j["support"] = support;
    j["final_residual"] = outcome.final_residual;
    return j;
}

json interpretation_notes(const PiecewiseField& field) {
    json notes;
    notes["window_index"] =
        "m(n) = min{k : t(k) >= t(n) + T}; the variant with t(k) - t(n) on the left is dimensionally inconsistent "
        "and not used";
    if (field.name() == "example1")
        notes["example1_sliding_velocity"] =
            "on y = 0 the tangent convex combination of [1,-1] and [1,1] is [1,0] (speed 1); the value 1/sqrt(2) "
            "does not follow from the field and is not used";
    return notes;
}

std::vector<std::string> config_warnings(const ExperimentConfig& config, const ScheduleDiagnostics& diag) {
    std::vector<std::string> warnings;
    if (!diag.valid()) warnings.push_back("schedule: " + diag.verdict());
    if (!config.noise.density_flag() && !config.field.guards().empty())
        warnings.push_back("noise: conditional law has no density; trajectories may track Krasovskii solutions");
    return warnings;
}

json config_echo(const ExperimentConfig& config) {
    json j;
    j["sha256"] = config.content_hash;
    j["config"] = config.source;
    return j;
}

std::vector<SeedOutcome> simulate_seeds(const ExperimentConfig& config, const NoiseModel& noise,
                                        const std::filesystem::path& out_dir, const std::string& label,
                                        bool write_trace, std::vector<std::string>& warnings) {
    const std::size_t count = config.seeds.size();
    std::vector<SeedOutcome> outcomes(count);
    std::vector<std::vector<std::string>> seed_warnings(count);
    RunOptions options;
    options.blowup_bound = config.blowup_bound;
    parallel_for(count, [&](std::size_t i) {
        const std::uint64_t seed = config.seeds[i];
        const std::string stem = label + "seed" + std::to_string(seed);
        IterateTrace trace;
        try {
            trace = run_sa(config.field, config.x0, config.schedule, noise, config.n_steps, seed, options);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DivergedIterate) throw;
            outcomes[i].seed = seed;
            outcomes[i].diverged = true;
            outcomes[i].error = e.what();
            return;
        }
        if (write_trace) write_file_atomic(out_dir / ("trace_" + stem + ".csv"), trace_csv(trace));
        outcomes[i] = analyze_trace(config, trace, noise.density_flag(), out_dir, stem, seed_warnings[i]);
    });
    for (auto& list : seed_warnings) warnings.insert(warnings.end(), list.begin(), list.end());
    return outcomes;
}

double median_or_nan(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    return median(std::move(values));
}

double median_of_slice(const std::vector<double>& errors, bool head) {
    if (errors.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t k = std::min<std::size_t>(3, errors.size());
    std::vector<double> slice = head ? std::vector<double>(errors.begin(), errors.begin() + static_cast<long>(k))
                                     : std::vector<double>(errors.end() - static_cast<long>(k), errors.end());
    return median(std::move(slice));
}

}  // namespace

std::vector<std::size_t> resolve_checkpoints(const ExperimentConfig& config, const IterateTrace& trace) {
    const std::size_t N = trace.size();
    std::vector<std::size_t> out;
    if (!config.measures.checkpoints.empty()) {
        for (std::size_t c : config.measures.checkpoints)
            if (c <= N) out.push_back(c);
    } else if (!config.measures.checkpoint_times.empty()) {
        out = checkpoints_at_times(trace, config.measures.checkpoint_times);
    } else {
        for (std::size_t c : {N / 4, N / 2, N})
            if (c > 0 && (out.empty() || c > out.back())) out.push_back(c);
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no checkpoint lies within the trace");
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    ExperimentReport report;
    report.schedule = validate_schedule(config.schedule, config.n_steps);
    report.warnings = config_warnings(config, report.schedule);
    report.seeds = simulate_seeds(config, config.noise, out_dir, "", true, report.warnings);

    json seeds = json::array();
    for (const auto& outcome : report.seeds) {
        report.any_diverged = report.any_diverged || outcome.diverged;
        seeds.push_back(outcome_json(outcome));
    }
    json& s = report.summary;
    s["echo"] = config_echo(config);
    s["field"] = config.field.name();
    s["schedule"] = {{"kind", to_string(config.schedule.kind)},
                     {"verdict", report.schedule.verdict()},
                     {"valid", report.schedule.valid()},
                     {"heuristic", report.schedule.heuristic},
                     {"sum", report.schedule.sum},
                     {"square_sum", report.schedule.square_sum}};
    s["noise"] = {{"kind", to_string(config.noise.kind)},
                  {"scale", config.noise.scale},
                  {"density", config.noise.density_flag()}};
    s["warning"] = !report.warnings.empty();
    s["warnings"] = report.warnings;
    s["interpretation"] = interpretation_notes(config.field);
    s["seeds"] = seeds;
    s["any_diverged"] = report.any_diverged;
    write_file_atomic(out_dir / "summary.json", s.dump(2) + "\n");
    return report;
}

StudyReport compare_noise_study(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const double scale = config.noise.scale > 0.0 ? config.noise.scale : 0.1;
    StudyReport report;
    report.arms = {{"gaussian", NoiseModel{NoiseKind::Gaussian, scale}, {}},
                   {"rademacher", NoiseModel{NoiseKind::Rademacher, scale}, {}},
                   {"zero", NoiseModel{NoiseKind::Zero, 0.0}, {}}};
    std::vector<std::string> warnings;
    const ScheduleDiagnostics diag = validate_schedule(config.schedule, config.n_steps);
    if (!diag.valid()) warnings.push_back("schedule: " + diag.verdict());
    bool any_diverged = false;
    for (auto& arm : report.arms) {
        arm.seeds = simulate_seeds(config, arm.noise, out_dir, arm.name + "_", false, warnings);
        for (const auto& o : arm.seeds) any_diverged = any_diverged || o.diverged;
    }

    const Eigen::Index d = config.field.dimension();
    std::string csv = "arm,seed,t_N";
    for (Eigen::Index i = 1; i <= d; ++i) csv += ",x_N_" + std::to_string(i);
    csv += ",tracking_first3,tracking_last3";
    for (double eps : config.measures.eps) csv += ",filippov@" + format_double(eps) + ",krasovskii@" + format_double(eps);
    csv += "\n";

    const std::size_t mid = config.measures.eps.size() / 2;
    json arms = json::array();
    std::vector<double> arm_filippov;
    bool k_below_f = false;
    for (const auto& arm : report.arms) {
        std::vector<double> filippov_mid;
        std::vector<double> first;
        std::vector<double> last;
        for (const auto& o : arm.seeds) {
            if (o.diverged) continue;
            csv += arm.name + "," + std::to_string(o.seed) + "," + format_double(o.final_time);
            for (Eigen::Index i = 0; i < d; ++i) csv += "," + format_double(o.final_state[i]);
            const double f3 = median_of_slice(o.tracking_errors, true);
            const double l3 = median_of_slice(o.tracking_errors, false);
            csv += "," + (std::isnan(f3) ? std::string() : format_double(f3));
            csv += "," + (std::isnan(l3) ? std::string() : format_double(l3));
            for (const auto& row : o.support) {
                csv += "," + format_double(row.filippov) + "," + format_double(row.krasovskii);
                if (row.krasovskii < row.filippov) k_below_f = true;
            }
            csv += "\n";
            if (!o.support.empty()) filippov_mid.push_back(o.support[mid].filippov);
            if (!std::isnan(f3)) first.push_back(f3);
            if (!std::isnan(l3)) last.push_back(l3);
        }
        const double f = median_or_nan(filippov_mid);
        arm_filippov.push_back(f);
        json seeds = json::array();
        for (const auto& o : arm.seeds) seeds.push_back(outcome_json(o));
        arms.push_back({{"arm", arm.name},
                        {"noise_density", arm.noise.density_flag()},
                        {"median_filippov_fraction", std::isnan(f) ? json() : json(f)},
                        {"median_tracking_first3", first.empty() ? json() : json(median(first))},
                        {"median_tracking_last3", last.empty() ? json() : json(median(last))},
                        {"seeds", seeds}});
    }
    write_file_atomic(out_dir / "study.csv", csv);

    if (config.field.guards().empty()) {
        report.verdict = "no dichotomy (smooth field)";
    } else {
        // The start point may sit on a surface where h is a boundary value; that
        // atom keeps weight a(0)/t(N), hence 0.95 rather than 1.
        const bool density_in_graph = arm_filippov[0] >= 0.95;
        const bool atomic_leaves_graph = std::min(arm_filippov[1], arm_filippov[2]) <= 0.5;
        report.verdict = density_in_graph && atomic_leaves_graph ? "dichotomy observed" : "no dichotomy observed";
    }

    json& s = report.summary;
    s["echo"] = config_echo(config);
    s["field"] = config.field.name();
    s["support_eps"] = config.measures.eps.empty() ? json() : json(config.measures.eps[mid]);
    s["arms"] = arms;
    s["verdict"] = report.verdict;
    s["krasovskii_below_filippov"] = k_below_f;
    s["warnings"] = warnings;
    s["interpretation"] = interpretation_notes(config.field);
    s["any_diverged"] = any_diverged;
    write_file_atomic(out_dir / "study_summary.json", s.dump(2) + "\n");
    return report;
}

Trajectory run_integrate(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const Vec x0 = config.integrate.x0 ? *config.integrate.x0 : config.x0;
    Trajectory trajectory =
        integrate_filippov(config.field, x0, config.integrate.t_end, config.integrate.dt, inclusion_options(config));
    write_file_atomic(out_dir / "trajectory.csv", trajectory_csv(trajectory));
    return trajectory;
}

json maps_report(const ExperimentConfig& config) {
    std::vector<Vec> points = config.query_points;
    if (points.empty()) points.push_back(config.x0);
    json out = json::array();
    for (const auto& x : points) {
        out.push_back({{"x", vec_json(x)},
                       {"pattern", config.field.pattern_at(x)},
                       {"filippov", hull_json(filippov_map(config.field, x, config.radius_tol))},
                       {"krasovskii", hull_json(krasovskii_map(config.field, x, config.radius_tol))}});
    }
    return out;
}

void recompute_measures(const ExperimentConfig& config, const std::vector<std::filesystem::path>& traces,
                        const std::filesystem::path& out_dir) {
    if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "no trace files given");
    ensure_dir(out_dir);
    json summary = json::array();
    for (const auto& path : traces) {
        IterateTrace trace = parse_trace_csv(read_file(path));
        if (trace.dimension() != config.field.dimension())
            throw Error(ErrorCode::ConfigInvalid, "field: dimension does not match trace " + path.string());
        std::vector<std::string> warnings;
        const SeedOutcome outcome =
            analyze_trace(config, trace, config.noise.density_flag(), out_dir, path.stem().string(), warnings);
        json entry = outcome_json(outcome);
        entry.erase("seed");
        entry["trace"] = path.filename().string();
        entry["warnings"] = warnings;
        summary.push_back(entry);
    }
    write_file_atomic(out_dir / "measures_summary.json", summary.dump(2) + "\n");
}

}  // namespace filsa
