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

// CSV report formats. Numbers are printed with 17 significant digits in the
// shortest round-trip-safe "general" form, so a trace read back from CSV
// reproduces the in-memory doubles exactly.

#include "filsa/inclusion.hpp"
#include "filsa/measures.hpp"
#include "filsa/sa.hpp"
#include "filsa/tracking.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace filsa {

[[nodiscard]] std::string format_double(double value);

/// n, t, x_1..x_d, z_1..z_d, M_1..M_d, a. The final row (n = N) carries only
/// n, t and the state; its drift, noise and stepsize cells are empty.
[[nodiscard]] std::string trace_csv(const IterateTrace& trace);
[[nodiscard]] IterateTrace parse_trace_csv(std::string_view text);

/// t, x_1..x_d, mode
[[nodiscard]] std::string trajectory_csv(const Trajectory& trajectory);

/// window_index, n_start, t_start, T, error, noise_flag
[[nodiscard]] std::string tracking_csv(const TrackingReport& report);

/// checkpoint_n, t_n, member_index, residual, envelope
[[nodiscard]] std::string residuals_csv(const DecayTable& table);

/// eps, filippov_fraction, krasovskii_fraction
[[nodiscard]] std::string support_csv(const std::vector<SupportFractions>& rows);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace filsa
