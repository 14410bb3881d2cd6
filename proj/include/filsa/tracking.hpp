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
#include "filsa/inclusion.hpp"
#include "filsa/sa.hpp"

#include <vector>

namespace filsa {

struct TrackingReport {
    std::vector<std::size_t> window_starts;
    std::vector<double> start_times;
    double window_T = 0.0;
    std::vector<double> errors;
    bool noise_flag = false;
};

/// The interpolated iterates on [t(n), t(m(n))] as a trajectory.
[[nodiscard]] Trajectory trace_segment(const IterateTrace& trace, std::size_t first, std::size_t last);

/// max over [t(n), t(m(n))] of |x-bar(t) - y(t)|, y the reference-biased
/// inclusion solution started at x(n). Both paths are piecewise linear, so the
/// maximum is taken over the union of their nodes.
[[nodiscard]] double tracking_error(const IterateTrace& trace, const PiecewiseField& field, std::size_t n,
                                    double T, double dt, const InclusionOptions& options = {});

/// Windows starting at the first iterate past j t(N) / n_windows,
/// j = 0..n_windows-1. Throws WindowExceedsTrace unless the windows fit
/// without overlapping.
[[nodiscard]] TrackingReport tracking_profile(const IterateTrace& trace, const PiecewiseField& field, double T,
                                              std::size_t n_windows, double dt, bool noise_flag,
                                              const InclusionOptions& options = {});

}  // namespace filsa
