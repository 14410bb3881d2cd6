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

#include "filsa/tracking.hpp"

#include "filsa/error.hpp"

#include <algorithm>
#include <iterator>

namespace filsa {

Trajectory trace_segment(const IterateTrace& trace, std::size_t first, std::size_t last) {
    if (last >= trace.states.size() || first > last)
        throw Error(ErrorCode::IndexOutOfRange, "trace segment out of range");
    Trajectory out;
    for (std::size_t k = first; k <= last; ++k) {
        // Zero stepsizes would repeat a clock value; keep the later iterate.
        if (!out.times.empty() && trace.times[k] == out.times.back()) {
            out.points.back() = trace.states[k];
            continue;
        }
        out.push(trace.times[k], trace.states[k], "iterate");
    }
    return out;
}

double tracking_error(const IterateTrace& trace, const PiecewiseField& field, std::size_t n, double T, double dt,
                      const InclusionOptions& options) {
    const std::size_t m = window_index(trace, n, T);
    const Trajectory reference = trace_segment(trace, n, m);
    const double t0 = trace.times[n];
    const double t1 = trace.times[m];
    if (!(t1 > t0)) return 0.0;
    const Trajectory solution = integrate_tracking_selection(field, reference, t0, t1, dt, options);

    std::vector<double> grid;
    grid.reserve(reference.size() + solution.size());
    std::merge(reference.times.begin(), reference.times.end(), solution.times.begin(), solution.times.end(),
               std::back_inserter(grid));
    double worst = 0.0;
    for (double t : grid) {
        t = std::clamp(t, t0, t1);
        worst = std::max(worst, (reference.at(t) - solution.at(t)).norm());
    }
    return worst;
}

TrackingReport tracking_profile(const IterateTrace& trace, const PiecewiseField& field, double T,
                                std::size_t n_windows, double dt, bool noise_flag,
                                const InclusionOptions& options) {
    if (n_windows == 0) throw Error(ErrorCode::InvalidArgument, "n_windows must be at least 1");
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "window length must be positive");
    if (trace.times.empty()) throw Error(ErrorCode::EmptyTrace, "trace is empty");
    const double horizon = trace.times.back();
    const double spacing = horizon / static_cast<double>(n_windows);
    if (spacing < T)
        throw Error(ErrorCode::WindowExceedsTrace, "trace clock t(N) = " + std::to_string(horizon) + " holds fewer than " +
                                                       std::to_string(n_windows) + " disjoint windows of length " +
                                                       std::to_string(T));

    TrackingReport report;
    report.window_T = T;
    report.noise_flag = noise_flag;
    for (std::size_t j = 0; j < n_windows; ++j) {
        const double start = spacing * static_cast<double>(j);
        auto it = std::lower_bound(trace.times.begin(), trace.times.end(), start);
        const auto n = static_cast<std::size_t>(std::distance(trace.times.begin(), it));
        report.window_starts.push_back(n);
        report.start_times.push_back(trace.times[std::min(n, trace.times.size() - 1)]);
        report.errors.push_back(tracking_error(trace, field, n, T, dt, options));
    }
    return report;
}

}  // namespace filsa
