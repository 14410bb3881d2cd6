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


#pragma once

#include "filsa/config.hpp"
#include "filsa/inclusion.hpp"
#include "filsa/measures.hpp"
#include "filsa/sa.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace filsa {

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool diverged = false;
    std::string error;             // set when the run or a diagnostic failed
    std::size_t steps = 0;
    double final_time = 0.0;
    Vec final_state;
    std::vector<double> tracking_errors;
    std::vector<SupportFractions> support;
    std::vector<double> final_residual;  // per test function, at the last checkpoint
};

struct ExperimentReport {
    std::vector<SeedOutcome> seeds;
    ScheduleDiagnostics schedule;
    std::vector<std::string> warnings;
    bool any_diverged = false;
    nlohmann::json summary;
};

/// Simulates every seed and writes, per seed, trace_seed<S>.csv,
/// tracking_seed<S>.csv, residuals_seed<S>.csv and support_seed<S>.csv, then
/// summary.json. Seeds run concurrently; output bytes do not depend on the
/// thread schedule.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct StudyArm {
    std::string name;  // "gaussian", "rademacher", "zero"
    NoiseModel noise;
    std::vector<SeedOutcome> seeds;
};

struct StudyReport {
    std::vector<StudyArm> arms;
    std::string verdict;
    nlohmann::json summary;
};

/// Runs the config under gaussian, rademacher and zero noise with identical
/// seeds and writes study.csv, per-arm tracking CSVs and study_summary.json.
[[nodiscard]] StudyReport compare_noise_study(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Deterministic Filippov solution from integrate.x0 (or x0); writes trajectory.csv.
[[nodiscard]] Trajectory run_integrate(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// F and K vertex lists at each configured query point.
[[nodiscard]] nlohmann::json maps_report(const ExperimentConfig& config);

/// Recomputes tracking, residual and support CSVs from trace CSV files. Output
/// files take the trace file stem as prefix.
void recompute_measures(const ExperimentConfig& config, const std::vector<std::filesystem::path>& traces,
                        const std::filesystem::path& out_dir);

/// Checkpoints from the config, or N/4, N/2, N when none are given.
[[nodiscard]] std::vector<std::size_t> resolve_checkpoints(const ExperimentConfig& config, const IterateTrace& trace);

}  // namespace filsa
