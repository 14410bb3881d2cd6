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

#include "filsa/field.hpp"
#include "filsa/sa.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filsa {

struct TrackingSettings {
    double T = 1.0;
    std::size_t n_windows = 10;
    double dt = 1e-3;
};

struct MeasureSettings {
    std::vector<std::size_t> checkpoints;  // resolved against the trace clock when empty
    std::vector<double> checkpoint_times;
    std::vector<double> eps{0.01, 0.05, 0.1};
};

struct IntegrateSettings {
    double t_end = 1.0;
    double dt = 1e-3;
    std::optional<Vec> x0;
};

struct ExperimentConfig {
    PiecewiseField field = builtin_field("relay");
    Vec x0;
    StepsizeSchedule schedule;
    NoiseModel noise;
    std::size_t n_steps = 1000;
    std::vector<std::uint64_t> seeds{1};
    TrackingSettings tracking;
    MeasureSettings measures;
    IntegrateSettings integrate;
    std::vector<Vec> query_points;
    double radius_tol = 1e-9;
    std::filesystem::path output_dir = "out";
    double blowup_bound = 1e6;

    nlohmann::json source;     // parsed document, echoed into summaries
    std::string content_hash;  // SHA-256 of the config bytes, hex
};

/// Parses the JSON config. Every failure is ConfigInvalid with the JSON path
/// of the offending entry, e.g. "schedule.gamma: expected a number".
[[nodiscard]] ExperimentConfig parse_config(std::string_view json_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Field definition: a built-in name, {"builtin": name}, or an inline table
/// {"dimension", "guards", "pieces", "boundary_values", "box"}.
[[nodiscard]] PiecewiseField parse_field(const nlohmann::json& node, Eigen::Index default_dimension);

[[nodiscard]] std::string sha256_hex(std::string_view bytes);

}  // namespace filsa
