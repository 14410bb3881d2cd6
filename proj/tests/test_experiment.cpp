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


#include "filsa/config.hpp"
#include "filsa/csv.hpp"
#include "filsa/error.hpp"
#include "filsa/experiment.hpp"
#include "helpers.hpp"

#include <fstream>
#include <map>

using namespace filsa;
using filsa::test::vec;
namespace fs = std::filesystem;

namespace {

const char* kExample = R"({
  "field": "example1",
  "x0": [0, 1],
  "schedule": {"kind": "power", "a0": 1, "gamma": 0.75},
  "noise": {"kind": "gaussian", "scale": 0.1},
  "n_steps": 4000,
  "seeds": [1, 2, 3],
  "tracking": {"T": 1, "n_windows": 5, "dt": 0.001},
  "measures": {"checkpoint_times": [5, 10], "eps": [0.01, 0.05, 0.1]}
})";

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) files[entry.path().filename().string()] = read_file(entry.path());
    return files;
}

}  // namespace

TEST_CASE("run_experiment writes per-seed reports and a summary") {
    const auto dir = filsa::test::scratch_dir("exp_files");
    const auto config = parse_config(kExample);
    const auto report = run_experiment(config, dir);
    REQUIRE(report.seeds.size() == 3);
    CHECK_FALSE(report.any_diverged);
    for (int s = 1; s <= 3; ++s) {
        for (const char* kind : {"trace", "tracking", "residuals", "support"})
            CHECK(fs::exists(dir / (std::string(kind) + "_seed" + std::to_string(s) + ".csv")));
    }
    CHECK(fs::exists(dir / "summary.json"));
    for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");

    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["echo"]["sha256"] == config.content_hash);
    CHECK(summary["echo"]["sha256"] == sha256_hex(kExample));
    CHECK(summary["warning"] == false);
    CHECK(summary["schedule"]["valid"] == true);
    CHECK(summary["noise"]["density"] == true);
    CHECK(summary["interpretation"].contains("window_index"));
    CHECK(summary["interpretation"].contains("example1_sliding_velocity"));

    // The trace file round-trips to the in-memory run.
    const auto trace = parse_trace_csv(read_file(dir / "trace_seed2.csv"));
    const auto direct = run_sa(config.field, config.x0, config.schedule, config.noise, config.n_steps, 2);
    REQUIRE(trace.size() == direct.size());
    for (std::size_t n = 0; n <= trace.size(); ++n) CHECK(trace.states[n] == direct.states[n]);
    CHECK(replay_identity_holds(trace));

    const std::string tracking = read_file(dir / "tracking_seed1.csv");
    CHECK(tracking.rfind("window_index,n_start,t_start,T,error,noise_flag\n", 0) == 0);
    CHECK(std::count(tracking.begin(), tracking.end(), '\n') == 6);
    const std::string support = read_file(dir / "support_seed1.csv");
    CHECK(std::count(support.begin(), support.end(), '\n') == 4);
}

TEST_CASE("outputs are byte-identical across runs") {
    const auto config = parse_config(kExample);
    const auto a = filsa::test::scratch_dir("exp_det_a");
    const auto b = filsa::test::scratch_dir("exp_det_b");
    (void)run_experiment(config, a);
    (void)run_experiment(config, b);
    const auto fa = snapshot(a);
    const auto fb = snapshot(b);
    CHECK(fa.size() == fb.size());
    for (const auto& [name, bytes] : fa) {
        INFO(name);
        REQUIRE(fb.count(name) == 1);
        CHECK(bytes == fb.at(name));
    }
}

TEST_CASE("a non-square-summable schedule warns but still runs") {
    const auto dir = filsa::test::scratch_dir("exp_gamma");
    const auto config = parse_config(R"({"field": "relay", "x0": [1], "n_steps": 2000, "seeds": [1],
        "schedule": {"kind": "power", "a0": 1, "gamma": 0.4}, "noise": {"kind": "gaussian", "scale": 0.1},
        "tracking": {"T": 1, "n_windows": 3}})");
    const auto report = run_experiment(config, dir);
    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["warning"] == true);
    CHECK(summary["schedule"]["valid"] == false);
    CHECK(summary["schedule"]["verdict"].get<std::string>().find("square-sum diverges") != std::string::npos);
    CHECK_FALSE(summary["interpretation"].contains("example1_sliding_velocity"));
    CHECK(report.seeds.front().steps == 2000);
}

TEST_CASE("a diverging seed is reported without its CSVs") {
    const auto dir = filsa::test::scratch_dir("exp_diverge");
    const auto config = parse_config(R"({"field": "linear", "x0": [1], "n_steps": 100, "seeds": [1],
        "schedule": {"kind": "constant", "a": 3}, "blowup_bound": 1000})");
    const auto report = run_experiment(config, dir);
    CHECK(report.any_diverged);
    CHECK(report.seeds.front().diverged);
    CHECK_FALSE(fs::exists(dir / "trace_seed1.csv"));
    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary["any_diverged"] == true);
}

TEST_CASE("noise study on the spurious equilibrium") {
    const auto dir = filsa::test::scratch_dir("study_spurious");
    const auto config = parse_config(R"({"field": "spurious_equilibrium", "x0": [0], "n_steps": 10000,
        "seeds": [1, 2, 3], "schedule": {"kind": "power", "a0": 0.1, "gamma": 0.75},
        "noise": {"kind": "gaussian", "scale": 0.1}, "tracking": {"T": 0.5, "n_windows": 3},
        "measures": {"eps": [0.01, 0.05, 0.1]}})");
    const auto report = compare_noise_study(config, dir);
    REQUIRE(report.arms.size() == 3);
    CHECK(report.arms[0].name == "gaussian");
    CHECK(report.arms[2].name == "zero");
    for (const auto& o : report.arms[0].seeds) CHECK(o.final_state[0] > 0.0);
    for (const auto& o : report.arms[2].seeds) {
        CHECK(o.final_state[0] == 0.0);
        // Every atom sits at (0, 0), which K contains and F does not.
        for (const auto& row : o.support) {
            CHECK(row.filippov == 0.0);
            CHECK(row.krasovskii == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(report.verdict == "dichotomy observed");
    CHECK(fs::exists(dir / "study.csv"));
    CHECK(fs::exists(dir / "study_summary.json"));
    CHECK(fs::exists(dir / "tracking_zero_seed1.csv"));
    CHECK_FALSE(fs::exists(dir / "trace_zero_seed1.csv"));
    const std::string csv = read_file(dir / "study.csv");
    CHECK(csv.rfind("arm,seed,t_N,x_N_1,tracking_first3,tracking_last3,filippov@0.01,krasovskii@0.01", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("noise study on example1 from the discontinuity") {
    const auto dir = filsa::test::scratch_dir("study_example1");
    // The start sits on the surface, where h is the boundary value (-1, 0),
    // outside F. That first atom weighs a(0)/t(N), so the run must be long
    // enough in clock time for it to drop below 1%: gamma 0.6 over 20000 steps
    // gives t(N) near 130.
    auto config = parse_config(kExample);
    config.x0 = vec({0, 0});
    config.schedule = StepsizeSchedule::power(1.0, 0.6);
    config.n_steps = 20000;
    config.measures.checkpoints = {5000, 20000};
    const auto report = compare_noise_study(config, dir);
    for (const auto& o : report.arms[0].seeds) {
        REQUIRE(o.support.size() == 3);
        CHECK(o.support[1].filippov >= 0.99);
        for (const auto& row : o.support) CHECK(row.krasovskii >= row.filippov);
    }
}

TEST_CASE("noise study on a smooth field") {
    const auto dir = filsa::test::scratch_dir("study_linear");
    const auto config = parse_config(R"({"field": "linear", "x0": [1], "n_steps": 1000, "seeds": [1],
        "schedule": {"kind": "power", "a0": 1, "gamma": 0.75}, "tracking": {"T": 1, "n_windows": 2}})");
    CHECK(compare_noise_study(config, dir).verdict == "no dichotomy (smooth field)");
}

TEST_CASE("integrate, maps and measure recomputation") {
    const auto dir = filsa::test::scratch_dir("exp_misc");
    auto config = parse_config(R"({"field": "example1", "x0": [0, 1], "n_steps": 2000, "seeds": [7],
        "noise": {"kind": "gaussian", "scale": 0.1}, "tracking": {"T": 1, "n_windows": 3},
        "integrate": {"t_end": 3, "dt": 0.001}, "query_points": [[0, 0], [0, 0.5]]})");
    const auto traj = run_integrate(config, dir);
    CHECK((traj.points.back() - vec({3, 0})).norm() <= 1e-6);
    CHECK(fs::exists(dir / "trajectory.csv"));

    const auto maps = maps_report(config);
    REQUIRE(maps.size() == 2);
    CHECK(maps[0]["pattern"] == "0");
    CHECK(maps[0]["filippov"].size() == 2);
    CHECK(maps[1]["pattern"] == "+");
    CHECK(maps[1]["krasovskii"].size() == 1);

    (void)run_experiment(config, dir / "sim");
    recompute_measures(config, {dir / "sim" / "trace_seed7.csv"}, dir / "re");
    CHECK(read_file(dir / "re" / "support_trace_seed7.csv") == read_file(dir / "sim" / "support_seed7.csv"));
    CHECK(read_file(dir / "re" / "residuals_trace_seed7.csv") == read_file(dir / "sim" / "residuals_seed7.csv"));
    CHECK(fs::exists(dir / "re" / "measures_summary.json"));
    CHECK_THROWS_AS(recompute_measures(config, {dir / "none.csv"}, dir / "re"), Error);
}

TEST_CASE("default checkpoints") {
    auto config = parse_config(R"({"field": "relay", "x0": [1], "n_steps": 100})");
    const auto trace = run_sa(config.field, config.x0, config.schedule, config.noise, 100, 1);
    CHECK(resolve_checkpoints(config, trace) == std::vector<std::size_t>{25, 50, 100});
    config.measures.checkpoints = {10, 20};
    CHECK(resolve_checkpoints(config, trace) == std::vector<std::size_t>{10, 20});
}
