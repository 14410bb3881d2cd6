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

#include "filsa/sa.hpp"

#include "filsa/error.hpp"

#include <algorithm>
#include <cmath>

namespace filsa {

namespace {

constexpr double kClockSlack = 1e-12;

}  // namespace

StepsizeSchedule StepsizeSchedule::power(double a0, double gamma) {
    StepsizeSchedule s;
    s.kind = StepsizeKind::Power;
    s.a0 = a0;
    s.gamma = gamma;
    return s;
}

StepsizeSchedule StepsizeSchedule::constant(double a) {
    StepsizeSchedule s;
    s.kind = StepsizeKind::Constant;
    s.a0 = a;
    s.gamma = 0.0;
    return s;
}

StepsizeSchedule StepsizeSchedule::custom(std::vector<double> values) {
    StepsizeSchedule s;
    s.kind = StepsizeKind::Custom;
    s.values = std::move(values);
    return s;
}

void StepsizeSchedule::validate() const {
    if (kind == StepsizeKind::Custom) {
        if (values.empty()) throw Error(ErrorCode::InvalidArgument, "custom schedule has no values");
        for (double v : values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::InvalidArgument, "custom stepsizes must be finite and non-negative");
        return;
    }
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw Error(ErrorCode::InvalidArgument, "a0 must be positive");
    if (!std::isfinite(gamma)) throw Error(ErrorCode::InvalidArgument, "gamma must be finite");
}

const char* to_string(StepsizeKind kind) noexcept {
    switch (kind) {
        case StepsizeKind::Power: return "power";
        case StepsizeKind::Constant: return "constant";
        case StepsizeKind::Custom: return "custom";
    }
    return "unknown";
}

double stepsize(const StepsizeSchedule& schedule, std::size_t n) {
    switch (schedule.kind) {
        case StepsizeKind::Power:
            return schedule.a0 / std::pow(static_cast<double>(n) + 1.0, schedule.gamma);
        case StepsizeKind::Constant:
            return schedule.a0;
        case StepsizeKind::Custom:
            if (n >= schedule.values.size())
                throw Error(ErrorCode::IndexOutOfRange, "custom schedule has only " +
                                                            std::to_string(schedule.values.size()) + " values");
            return schedule.values[n];
    }
    return 0.0;
}

std::string ScheduleDiagnostics::verdict() const {
    std::string out = sum_diverges ? "sum diverges" : "sum converges";
    out += square_sum_finite ? "; square-sum finite" : "; square-sum diverges";
    if (heuristic) out += " (heuristic)";
    return out;
}

ScheduleDiagnostics validate_schedule(const StepsizeSchedule& schedule, std::size_t horizon) {
    if (horizon == 0) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1");
    schedule.validate();
    ScheduleDiagnostics diag;
    diag.horizon = schedule.kind == StepsizeKind::Custom ? std::min(horizon, schedule.values.size()) : horizon;
    for (std::size_t n = 0; n < diag.horizon; ++n) {
        const double a = stepsize(schedule, n);
        diag.sum += a;
        diag.square_sum += a * a;
    }
    switch (schedule.kind) {
        case StepsizeKind::Power:
            diag.sum_diverges = schedule.gamma <= 1.0;
            diag.square_sum_finite = 2.0 * schedule.gamma > 1.0;
            break;
        case StepsizeKind::Constant:
            diag.sum_diverges = true;
            diag.square_sum_finite = false;
            break;
        case StepsizeKind::Custom: {
            // Fit a(n) ~ c (n+1)^-g between the middle and the end of the horizon.
            diag.heuristic = true;
            const std::size_t hi = diag.horizon - 1;
            const std::size_t lo = hi / 2;
            const double a_lo = schedule.values[lo];
            const double a_hi = schedule.values[hi];
            if (a_hi == 0.0) {
                diag.sum_diverges = false;
                diag.square_sum_finite = true;
            } else if (lo == hi || a_lo == 0.0) {
                diag.sum_diverges = true;
                diag.square_sum_finite = false;
            } else {
                const double g = std::log(a_lo / a_hi) /
                                 std::log((static_cast<double>(hi) + 1.0) / (static_cast<double>(lo) + 1.0));
                diag.sum_diverges = g <= 1.0;
                diag.square_sum_finite = 2.0 * g > 1.0;
            }
            break;
        }
    }
    return diag;
}

const char* to_string(NoiseKind kind) noexcept {
    switch (kind) {
        case NoiseKind::Gaussian: return "gaussian";
        case NoiseKind::UniformBall: return "uniform-ball";
        case NoiseKind::Rademacher: return "rademacher";
        case NoiseKind::Zero: return "zero";
    }
    return "unknown";
}

void NoiseModel::validate() const {
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw Error(ErrorCode::InvalidArgument, "noise scale must be finite and non-negative");
}

Vec sample_noise(const NoiseModel& model, const Vec& x, Rng& rng) {
    const Eigen::Index d = x.size();
    switch (model.kind) {
        case NoiseKind::Zero:
            return Vec::Zero(d);
        case NoiseKind::Gaussian:
            return model.scale * rng.normal_vector(d);
        case NoiseKind::UniformBall: {
            Vec dir;
            double len = 0.0;
            do {
                dir = rng.normal_vector(d);
                len = dir.norm();
            } while (len == 0.0);
            const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
            return (model.scale * r / len) * dir;
        }
        case NoiseKind::Rademacher: {
            Vec out(d);
            for (Eigen::Index i = 0; i < d; ++i) out[i] = rng.coin() ? model.scale : -model.scale;
            return out;
        }
    }
    return Vec::Zero(d);
}

void IterateTrace::check_consistent() const {
    const std::size_t n = steps.size();
    if (states.size() != n + 1 || drifts.size() != n || noises.size() != n || times.size() != n + 1)
        throw Error(ErrorCode::InvalidArgument, "trace component lengths are inconsistent");
    if (times.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "trace clock must start at 0");
    for (std::size_t k = 0; k < n; ++k)
        if (times[k + 1] < times[k]) throw Error(ErrorCode::InvalidArgument, "trace clock decreases");
}

IterateTrace run_sa(const PiecewiseField& field, const Vec& x0, const StepsizeSchedule& schedule,
                    const NoiseModel& noise, std::size_t n_steps, std::uint64_t seed,
                    const RunOptions& options) {
    field.check_dimension(x0);
    if (!x0.allFinite()) throw Error(ErrorCode::InvalidArgument, "x0 must be finite");
    if (n_steps == 0) throw Error(ErrorCode::InvalidArgument, "n_steps must be at least 1");
    schedule.validate();
    noise.validate();

    IterateTrace trace;
    trace.seed = seed;
    trace.field_name = field.name();
    trace.states.reserve(n_steps + 1);
    trace.drifts.reserve(n_steps);
    trace.noises.reserve(n_steps);
    trace.steps.reserve(n_steps);
    trace.times.reserve(n_steps + 1);
    trace.states.push_back(x0);
    trace.times.push_back(0.0);

    Rng rng(seed);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const Vec& x = trace.states.back();
        const double a = stepsize(schedule, n);
        Vec z = evaluate_field(field, x);
        Vec m = sample_noise(noise, x, rng);
        Vec next = x + a * (z + m);
        if (!next.allFinite() || next.norm() >= options.blowup_bound)
            throw Error(ErrorCode::DivergedIterate,
                        "|x(" + std::to_string(n + 1) + ")| exceeded the blow-up bound " +
                            std::to_string(options.blowup_bound));
        trace.drifts.push_back(std::move(z));
        trace.noises.push_back(std::move(m));
        trace.steps.push_back(a);
        trace.times.push_back(trace.times.back() + a);
        trace.states.push_back(std::move(next));
    }
    return trace;
}

bool replay_identity_holds(const IterateTrace& trace) {
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const Vec replayed = trace.states[n] + trace.steps[n] * (trace.drifts[n] + trace.noises[n]);
        if (replayed != trace.states[n + 1]) return false;
    }
    return true;
}

double algorithmic_time(const IterateTrace& trace, std::size_t n) {
    if (n >= trace.times.size())
        throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(n) + " beyond trace length");
    return trace.times[n];
}

Vec interpolate(const IterateTrace& trace, double t) {
    if (trace.times.empty()) throw Error(ErrorCode::EmptyTrace, "trace is empty");
    if (!(t >= 0.0) || t > trace.times.back())
        throw Error(ErrorCode::OutOfDomain, "time outside [0, t(N)]");
    auto it = std::upper_bound(trace.times.begin(), trace.times.end(), t);
    const auto k = static_cast<std::size_t>(std::distance(trace.times.begin(), it)) - 1;
    if (trace.times[k] == t || k + 1 >= trace.times.size()) return trace.states[k];
    const double span = trace.times[k + 1] - trace.times[k];
    const double frac = (t - trace.times[k]) / span;
    return trace.states[k] + frac * (trace.states[k + 1] - trace.states[k]);
}

std::size_t window_index(const IterateTrace& trace, std::size_t n, double T) {
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "window length must be positive");
    if (n >= trace.times.size()) throw Error(ErrorCode::IndexOutOfRange, "window start beyond trace");
    const double target = trace.times[n] + T;
    const double slack = kClockSlack * std::max(1.0, std::abs(target));
    auto it = std::lower_bound(trace.times.begin() + static_cast<std::ptrdiff_t>(n), trace.times.end(),
                               target - slack);
    if (it == trace.times.end())
        throw Error(ErrorCode::WindowExceedsTrace, "t(n) + T = " + std::to_string(target) +
                                                       " exceeds t(N) = " + std::to_string(trace.times.back()));
    return static_cast<std::size_t>(std::distance(trace.times.begin(), it));
}

}  // namespace filsa
