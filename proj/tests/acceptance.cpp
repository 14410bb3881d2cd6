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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Every criterion also has a wall-clock
// budget that counts toward its verdict.

#include "filsa/config.hpp"
#include "filsa/csv.hpp"
#include "filsa/experiment.hpp"
#include "filsa/hull.hpp"
#include "filsa/inclusion.hpp"
#include "filsa/measures.hpp"
#include "filsa/tracking.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace filsa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

bool same_hull(const ConvexVelocitySet& a, const ConvexVelocitySet& b, double tol) {
    for (const auto& v : a.vertices)
        if (hull_distance(b, v) > tol) return false;
    for (const auto& v : b.vertices)
        if (hull_distance(a, v) > tol) return false;
    return true;
}

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.4g", v);
    return buffer;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("filsa_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Smallest N with t(N) >= target under a0 / (n+1)^gamma.
std::size_t steps_for_clock(double a0, double gamma, double target) {
    const auto schedule = StepsizeSchedule::power(a0, gamma);
    double t = 0.0;
    std::size_t n = 0;
    while (t < target) t += stepsize(schedule, n++);
    return n;
}

Outcome maps_example() {
    const auto f = builtin_field("example1");
    const auto F = ConvexVelocitySet{{vec({1, -1}), vec({1, 1})}};
    const auto K = ConvexVelocitySet{{vec({1, -1}), vec({1, 1}), vec({-1, 0})}};
    bool ok = true;
    for (double x : {-2.0, 0.0, 0.3, 3.7}) {
        ok = ok && same_hull(filippov_map(f, vec({x, 0})), F, 1e-12);
        ok = ok && same_hull(krasovskii_map(f, vec({x, 0})), K, 1e-12);
        for (double y : {0.5, -0.5}) {
            const auto expected = ConvexVelocitySet{{y > 0 ? vec({1, -1}) : vec({1, 1})}};
            const auto Fy = filippov_map(f, vec({x, y}));
            const auto Ky = krasovskii_map(f, vec({x, y}));
            ok = ok && Fy.vertices.size() == 1 && Ky.vertices.size() == 1;
            ok = ok && same_hull(Fy, expected, 1e-12) && same_hull(Ky, expected, 1e-12);
        }
    }
    return {ok, "F and K at (x, 0) and (x, +-0.5) for x in {-2, 0, 0.3, 3.7}"};
}

Outcome sliding_integration() {
    const auto ex1 = builtin_field("example1");
    const auto traj = integrate_filippov(ex1, vec({0, 1}), 3.0, 1e-3);
    const double end_error = (traj.points.back() - vec({3, 0})).norm();
    double slide_velocity_error = 0.0;
    std::size_t sliding_segments = 0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        // A label names the mode of the segment that starts at its point.
        if (traj.modes[i].rfind("slide", 0) != 0) continue;
        const double dt = traj.times[i + 1] - traj.times[i];
        if (dt <= 0.0) continue;
        const Vec v = (traj.points[i + 1] - traj.points[i]) / dt;
        slide_velocity_error = std::max(slide_velocity_error, (v - vec({1, 0})).norm());
        ++sliding_segments;
    }
    const auto relay = builtin_field("relay");
    const auto r = integrate_filippov(relay, vec({0.5}), 3.0, 1e-3);
    double after = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r.times[i] >= 1.1) after = std::max(after, std::abs(r.points[i][0]));
    after = std::max(after, std::abs(r.at(1.1)[0]));
    const bool ok = end_error <= 1e-3 && sliding_segments > 0 && slide_velocity_error <= 1e-9 && after <= 1e-3;
    return {ok, "|x(3)-(3,0)|=" + fmt(end_error) + ", sliding segments=" + std::to_string(sliding_segments) +
                    ", max |v-(1,0)|=" + fmt(slide_velocity_error) + ", relay max|x| on [1.1,3]=" + fmt(after)};
}

Outcome dichotomy() {
    const auto f = builtin_field("spurious_equilibrium");
    const auto schedule = StepsizeSchedule::power(0.1, 0.75);
    const auto zero = run_sa(f, vec({0}), schedule, NoiseModel{}, 10000, 1);
    bool zero_exact = true;
    for (const auto& x : zero.states) zero_exact = zero_exact && x[0] == 0.0;
    int escaped = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto t = run_sa(f, vec({0}), schedule, NoiseModel{NoiseKind::Gaussian, 0.1}, 10000, seed);
        if (t.states.back()[0] >= 0.5 * t.times.back()) ++escaped;
    }
    return {zero_exact && escaped >= 99, "zero arm pinned at 0: " + std::string(zero_exact ? "yes" : "no") +
                                             ", gaussian escapes " + std::to_string(escaped) + "/100"};
}

double median_of(std::vector<double> v) { return median(std::move(v)); }

Outcome tracking_decay() {
    const auto f = builtin_field("example1");
    int improved = 0;
    const int seeds = 20;
    std::string spread;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto t = run_sa(f, vec({0, 1}), StepsizeSchedule::power(1, 0.75), NoiseModel{NoiseKind::Gaussian, 0.1},
                              100000, static_cast<std::uint64_t>(seed));
        const auto report = tracking_profile(t, f, 1.0, 10, 1e-3, true);
        const auto& e = report.errors;
        const double first = median_of({e[0], e[1], e[2]});
        const double last = median_of({e[7], e[8], e[9]});
        if (last < first) ++improved;
        if (seed == 1) spread = "seed 1: first3 " + fmt(first) + ", last3 " + fmt(last);
    }
    return {improved >= (seeds * 8 + 9) / 10,
            std::to_string(improved) + "/" + std::to_string(seeds) + " seeds improve; " + spread};
}

Outcome euler_consistency() {
    const auto f = builtin_field("linear", 1);
    auto error_for = [&](double a) {
        const auto n = static_cast<std::size_t>(std::ceil(1.5 / a));
        const auto t = run_sa(f, vec({1}), StepsizeSchedule::constant(a), NoiseModel{}, n, 0);
        return tracking_error(t, f, 0, 1.0, 1e-4);
    };
    const double coarse = error_for(1e-2);
    const double fine = error_for(5e-3);
    const double ratio = coarse / fine;
    return {ratio >= 1.8 && ratio <= 2.5, "e(0.01)=" + fmt(coarse) + ", e(0.005)=" + fmt(fine) + ", ratio " + fmt(ratio)};
}

// Relay runs shared by criteria 6 to 8.
struct RelayRuns {
    std::vector<IterateTrace> traces;
    std::size_t steps = 0;
};

const RelayRuns& relay_runs() {
    static const RelayRuns runs = [] {
        RelayRuns r;
        r.steps = steps_for_clock(1.0, 0.75, 100.0);
        const auto f = builtin_field("relay");
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
            r.traces.push_back(run_sa(f, vec({1}), StepsizeSchedule::power(1, 0.75), NoiseModel{NoiseKind::Gaussian, 0.1},
                                      r.steps, seed));
        return r;
    }();
    return runs;
}

Outcome residual_decay() {
    const auto& runs = relay_runs();
    std::vector<double> first;
    std::vector<double> last;
    std::vector<std::size_t> checkpoints;
    for (const auto& t : runs.traces) {
        checkpoints = checkpoints_at_times(t, {25.0, 50.0, 100.0});
        const auto family = TestFunctionFamily::gaussian_monomials(averaged_measure(t, t.size()).box_B);
        const auto table = residual_decay_study({t}, family, checkpoints);
        first.push_back(table.rows.front().max_residual);
        last.push_back(table.rows.back().max_residual);
    }
    const double mf = median(first);
    const double ml = median(last);
    return {ml <= 0.5 * mf, "N=" + std::to_string(runs.steps) + ", checkpoints n=" + std::to_string(checkpoints[0]) +
                                "/" + std::to_string(checkpoints[1]) + "/" + std::to_string(checkpoints[2]) +
                                ", median max-residual " + fmt(mf) + " -> " + fmt(ml) + " (ratio " + fmt(ml / mf) + ")"};
}

Outcome graph_support() {
    const auto& runs = relay_runs();
    const auto f = builtin_field("relay");
    double worst_f = 1.0;
    bool k_dominates = true;
    for (const auto& t : runs.traces) {
        const auto rows = graph_support_fractions(averaged_measure(t, t.size()), f, {0.01, 0.05, 0.1});
        worst_f = std::min(worst_f, rows[1].filippov);
        for (const auto& row : rows) k_dominates = k_dominates && row.krasovskii >= row.filippov;
    }
    return {worst_f >= 0.95 && k_dominates,
            "min Filippov fraction at eps 0.05: " + fmt(worst_f) + ", K >= F: " + (k_dominates ? "yes" : "no")};
}

Outcome relaxed_control() {
    const auto& runs = relay_runs();
    std::vector<double> splits;
    std::vector<double> barycenters;
    for (const auto& t : runs.traces) {
        const auto s = local_velocity_statistics(averaged_measure(t, t.size()), vec({0}), 0.05, {vec({-1}), vec({1})},
                                                 0.1);
        splits.push_back(s.mass > 0.0 ? s.target_mass[0] / s.mass : 0.0);
        barycenters.push_back(std::abs(s.barycenter[0]));
    }
    const double split = median(splits);
    const double bary = median(barycenters);
    return {split >= 0.4 && split <= 0.6 && bary <= 0.1,
            "median share of z near -1: " + fmt(split) + ", median |barycenter|: " + fmt(bary)};
}

Outcome martingale() {
    const auto f = builtin_field("relay");
    int within = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto t = run_sa(f, vec({1}), StepsizeSchedule::power(1, 0.75), NoiseModel{NoiseKind::Gaussian, 0.1},
                              100000, seed);
        const auto family = TestFunctionFamily::gaussian_monomials(averaged_measure(t, t.size()).box_B);
        if (martingale_diagnostic(t, family).oscillation_within(4.0)) ++within;
    }
    const auto t = run_sa(f, vec({1}), StepsizeSchedule::constant(1.0), NoiseModel{NoiseKind::Gaussian, 0.1}, 100000, 1);
    const auto family = TestFunctionFamily::gaussian_monomials(averaged_measure(t, t.size()).box_B);
    const double r2 = linear_fit_r2(martingale_diagnostic(t, family).total_quadratic_variation());
    return {within >= 95 && r2 >= 0.99,
            "oscillation within bound in " + std::to_string(within) + "/100 seeds, constant-step QV R^2 " + fmt(r2)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) out[entry.path().filename().string()] = read_file(entry.path());
    return out;
}

Outcome determinism() {
    const std::vector<std::string> configs{
        R"({"field": "example1", "x0": [0, 1], "schedule": {"kind": "power", "a0": 1, "gamma": 0.75},
            "noise": {"kind": "gaussian", "scale": 0.1}, "n_steps": 20000, "seeds": [1, 2, 3, 4],
            "tracking": {"T": 1, "n_windows": 10}})",
        R"({"field": "relay", "x0": [1], "schedule": {"kind": "power", "a0": 1, "gamma": 0.75},
            "noise": {"kind": "gaussian", "scale": 0.1}, "n_steps": 50000, "seeds": [1, 2, 3],
            "tracking": {"T": 1, "n_windows": 10}, "measures": {"checkpoint_times": [5, 10, 20]}})",
        R"({"field": "linear", "x0": [1], "schedule": {"kind": "constant", "a": 0.01}, "n_steps": 200,
            "seeds": [1], "tracking": {"T": 1, "n_windows": 1}})"};
    std::size_t files = 0;
    bool identical = true;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto config = parse_config(configs[i]);
        const auto a = scratch("det_a" + std::to_string(i));
        const auto b = scratch("det_b" + std::to_string(i));
        (void)run_experiment(config, a);
        (void)run_experiment(config, b);
        const auto study_a = scratch("det_sa" + std::to_string(i));
        const auto study_b = scratch("det_sb" + std::to_string(i));
        (void)compare_noise_study(config, study_a);
        (void)compare_noise_study(config, study_b);
        for (const auto& [x, y] : {std::pair{a, b}, std::pair{study_a, study_b}}) {
            const auto fa = snapshot(x);
            const auto fb = snapshot(y);
            identical = identical && fa == fb;
            files += fa.size();
        }
    }
    return {identical && files > 0, std::to_string(files) + " output files compared byte for byte"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "set-valued maps of example1", 1.0, maps_example},
        {2, "sliding-mode integration", 5.0, sliding_integration},
        {3, "noise dichotomy at the spurious equilibrium", 30.0, dichotomy},
        {4, "tracking error decay", 300.0, tracking_decay},
        {5, "Euler consistency", 10.0, euler_consistency},
        {6, "stationarity residual decay", 120.0, residual_decay},
        {7, "graph support", 30.0, graph_support},
        {8, "relaxed-control split near the switching point", 30.0, relaxed_control},
        {9, "martingale diagnostics", 120.0, martingale},
        {10, "determinism", 120.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.budget_seconds;
        const bool pass = outcome.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s criterion %d: %s (%.2f s of %.0f s%s) %s\n", pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                    c.budget_seconds, in_time ? "" : ", over budget", outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
