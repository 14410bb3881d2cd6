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

// Robbins-Monro iteration x(n+1) = x(n) + a(n) (h(x(n)) + M(n+1)) with a
// recorded trace, its cumulative-stepsize clock t(n) and the piecewise-linear
// interpolation of the iterates on that clock.

#include "filsa/field.hpp"
#include "filsa/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace filsa {

enum class StepsizeKind { Power, Constant, Custom };

struct StepsizeSchedule {
    StepsizeKind kind = StepsizeKind::Power;
    double a0 = 1.0;
    double gamma = 1.0;
    std::vector<double> values;  // custom kind only

    /// a(n) = a0 / (n + 1)^gamma
    static StepsizeSchedule power(double a0, double gamma);
    static StepsizeSchedule constant(double a);
    static StepsizeSchedule custom(std::vector<double> values);

    void validate() const;
};

[[nodiscard]] const char* to_string(StepsizeKind kind) noexcept;

[[nodiscard]] double stepsize(const StepsizeSchedule& schedule, std::size_t n);

struct ScheduleDiagnostics {
    std::size_t horizon = 0;
    double sum = 0.0;          // sum_{n < horizon} a(n)
    double square_sum = 0.0;   // sum_{n < horizon} a(n)^2
    bool sum_diverges = false;
    bool square_sum_finite = false;
    bool heuristic = false;    // verdicts estimated numerically (custom kind)

    [[nodiscard]] bool valid() const noexcept { return sum_diverges && square_sum_finite; }
    /// e.g. "sum diverges; square-sum diverges"
    [[nodiscard]] std::string verdict() const;
};

/// Partial sums plus p-series verdicts. Power schedules get exact verdicts
/// (sum diverges iff gamma <= 1, squares summable iff gamma > 1/2); custom
/// sequences get verdicts from a local power-law fit and are flagged heuristic.
[[nodiscard]] ScheduleDiagnostics validate_schedule(const StepsizeSchedule& schedule,
                                                    std::size_t horizon);

enum class NoiseKind { Gaussian, UniformBall, Rademacher, Zero };

[[nodiscard]] const char* to_string(NoiseKind kind) noexcept;

/// Martingale-difference noise. Every kind has conditional mean zero and
/// E|M|^2 <= K (1 + |x|^2) with K = scale^2 d.
struct NoiseModel {
    NoiseKind kind = NoiseKind::Zero;
    double scale = 0.0;

    /// True iff the conditional law has a Lebesgue density.
    [[nodiscard]] bool density_flag() const noexcept {
        return (kind == NoiseKind::Gaussian || kind == NoiseKind::UniformBall) && scale > 0.0;
    }
    [[nodiscard]] double growth_constant(Eigen::Index d) const noexcept {
        return scale * scale * static_cast<double>(d);
    }
    void validate() const;
};

/// Gaussian: N(0, scale^2 I). Uniform-ball: uniform on the ball of radius
/// scale. Rademacher: independent +-scale per coordinate.
[[nodiscard]] Vec sample_noise(const NoiseModel& model, const Vec& x, Rng& rng);

struct IterateTrace {
    std::vector<Vec> states;     // x(0..N)
    std::vector<Vec> drifts;     // z(0..N-1)
    std::vector<Vec> noises;     // M(1..N), stored at index n for M(n+1)
    std::vector<double> steps;   // a(0..N-1)
    std::vector<double> times;   // t(0..N)
    std::uint64_t seed = 0;
    std::string field_name;

    [[nodiscard]] std::size_t size() const noexcept { return steps.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept {
        return states.empty() ? 0 : states.front().size();
    }
    /// Structural invariants (lengths, t(0) = 0, monotone clock).
    void check_consistent() const;
};

struct RunOptions {
    double blowup_bound = 1e6;
};

/// Runs N = n_steps iterations with z(n) = evaluate_field(x(n)). Throws
/// DivergedIterate once |x(n)| >= blowup_bound.
[[nodiscard]] IterateTrace run_sa(const PiecewiseField& field, const Vec& x0,
                                  const StepsizeSchedule& schedule, const NoiseModel& noise,
                                  std::size_t n_steps, std::uint64_t seed,
                                  const RunOptions& options = {});

/// Recomputes every step; true iff x(n) + a(n)(z(n) + M(n+1)) == x(n+1)
/// bit for bit.
[[nodiscard]] bool replay_identity_holds(const IterateTrace& trace);

[[nodiscard]] double algorithmic_time(const IterateTrace& trace, std::size_t n);

/// x-bar(t): x(n) at t = t(n), affine in between.
[[nodiscard]] Vec interpolate(const IterateTrace& trace, double t);

/// m(n) = min{k : t(k) >= t(n) + T}. Clock comparisons allow a relative slack
/// of 1e-12 so windows ending on a grid point are not pushed one step out by
/// summation roundoff.
[[nodiscard]] std::size_t window_index(const IterateTrace& trace, std::size_t n, double T);

}  // namespace filsa
