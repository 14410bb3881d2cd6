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

#include "filsa/inclusion.hpp"

#include "filsa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace filsa {

namespace {

constexpr int kMaxStalledEvents = 8;

struct Mode {
    enum class Kind { Region, Sliding, Corner };
    Kind kind = Kind::Region;
    SignPattern pattern;  // sliding: pattern[guard] == '0'
    std::size_t guard = 0;
};

std::string label(const Mode& mode) {
    switch (mode.kind) {
        case Mode::Kind::Region: return mode.pattern.empty() ? "smooth" : mode.pattern;
        case Mode::Kind::Sliding: return "slide:" + std::to_string(mode.guard);
        case Mode::Kind::Corner: return "corner";
    }
    return "";
}

SignPattern with_sign(SignPattern p, std::size_t k, char c) {
    p[k] = c;
    return p;
}

double sign_of(char c) { return c == '+' ? 1.0 : -1.0; }

class Stepper {
public:
    Stepper(const PiecewiseField& field, const InclusionOptions& options) : field_(field), opt_(options) {}

    Mode classify(const Vec& x) const {
        const auto& guards = field_.guards();
        std::vector<std::size_t> on_surface;
        for (std::size_t k = 0; k < guards.size(); ++k)
            if (std::abs(guards[k].value(x)) <= opt_.surface_tol) on_surface.push_back(k);
        if (on_surface.empty()) return Mode{Mode::Kind::Region, field_.pattern_at(x), 0};
        if (on_surface.size() > 1) return Mode{Mode::Kind::Corner, field_.pattern_at(x), 0};

        const std::size_t k = on_surface.front();
        SignPattern base = field_.pattern_at(x);
        base[k] = '0';
        const SlidingDecision d = decide(base, k, x);
        if (d.behavior == SurfaceBehavior::Sliding) return Mode{Mode::Kind::Sliding, base, k};
        return Mode{Mode::Kind::Region, with_sign(base, k, d.side), 0};
    }

    SlidingDecision decide(const SignPattern& base, std::size_t k, const Vec& x) const {
        const Vec f_plus = field_.piece(with_sign(base, k, '+')).value(x);
        const Vec f_minus = field_.piece(with_sign(base, k, '-')).value(x);
        return sliding_velocity(f_plus, f_minus, field_.guards()[k].gradient(x));
    }

    // Convex combination with alpha clamped to [0, 1]; used for stage values.
    Vec clamped_sliding_velocity(const SignPattern& base, std::size_t k, const Vec& x) const {
        const Vec f_plus = field_.piece(with_sign(base, k, '+')).value(x);
        const Vec f_minus = field_.piece(with_sign(base, k, '-')).value(x);
        const Vec n = field_.guards()[k].gradient(x);
        const double p = n.dot(f_plus);
        const double m = n.dot(f_minus);
        const double alpha = (m - p) != 0.0 ? std::clamp(m / (m - p), 0.0, 1.0) : 0.5;
        return alpha * f_plus + (1.0 - alpha) * f_minus;
    }

    Vec project_to_surface(std::size_t k, const Vec& x) const {
        const Guard& g = field_.guards()[k];
        if (g.kind == GuardKind::Affine) return x - (g.value(x) / g.normal.squaredNorm()) * g.normal;
        const Vec diff = x - g.center;
        const double r = diff.norm();
        if (r == 0.0) throw Error(ErrorCode::DegenerateGeometry, "cannot project the centre of a norm guard");
        return g.center + (g.radius / r) * diff;
    }

    // Guards (other than `skip`) whose sign at x contradicts `pattern` by more
    // than the surface tolerance.
    std::vector<std::size_t> violated(const SignPattern& pattern, const Vec& x, std::size_t skip) const {
        std::vector<std::size_t> out;
        const auto& guards = field_.guards();
        for (std::size_t k = 0; k < guards.size(); ++k) {
            if (k == skip || pattern[k] == '0') continue;
            if (sign_of(pattern[k]) * guards[k].value(x) < -opt_.surface_tol) out.push_back(k);
        }
        return out;
    }

    // Earliest theta in [0, h] with |g_k(step(theta))| <= surface_tol, given that
    // the signed guard value psi(theta) = s g_k(step(theta)) ends below -tol.
    template <class StepFn>
    double locate(const StepFn& step, std::size_t k, double s, double h) const {
        const Guard& g = field_.guards()[k];
        auto psi = [&](double th) { return s * g.value(step(th)); };
        const double tol = opt_.surface_tol;
        if (psi(0.0) <= tol) return 0.0;
        double lo = 0.0;
        double hi = h;
        while (hi - lo > opt_.event_tol) {
            const double mid = 0.5 * (lo + hi);
            const double v = psi(mid);
            if (std::abs(v) <= tol) return mid;
            if (v > tol) lo = mid; else hi = mid;
        }
        if (std::abs(psi(hi)) <= tol) return hi;
        if (std::abs(psi(lo)) <= tol) return lo;
        throw Error(ErrorCode::StepTooLarge, "event bracketing failed on guard " + std::to_string(k));
    }

    const PiecewiseField& field() const { return field_; }
    const InclusionOptions& options() const { return opt_; }

private:
    const PiecewiseField& field_;
    const InclusionOptions& opt_;
};

Mode exit_mode(const SignPattern& base, std::size_t k, const SlidingDecision& d) {
    const char side = d.behavior == SurfaceBehavior::Sliding ? '+' : d.side;
    return Mode{Mode::Kind::Region, with_sign(base, k, side), 0};
}

}  // namespace

Vec Trajectory::at(double t) const {
    if (times.empty()) throw Error(ErrorCode::EmptyTrace, "trajectory is empty");
    const double slack = 1e-12 * std::max(1.0, std::abs(times.back()));
    if (t < times.front() - slack || t > times.back() + slack)
        throw Error(ErrorCode::OutOfDomain, "time outside the trajectory span");
    t = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return points.front();
    const auto k = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
    if (times[k] == t || k + 1 >= times.size()) return points[k];
    const double frac = (t - times[k]) / (times[k + 1] - times[k]);
    return points[k] + frac * (points[k + 1] - points[k]);
}

void Trajectory::push(double t, Vec x, std::string mode) {
    times.push_back(t);
    points.push_back(std::move(x));
    modes.push_back(std::move(mode));
}

const char* to_string(SurfaceBehavior behavior) noexcept {
    switch (behavior) {
        case SurfaceBehavior::Sliding: return "sliding";
        case SurfaceBehavior::Crossing: return "crossing";
        case SurfaceBehavior::Tangent: return "tangent";
        case SurfaceBehavior::Repelling: return "repelling";
    }
    return "unknown";
}

SlidingDecision sliding_velocity(const Vec& f_plus, const Vec& f_minus, const Vec& grad_g) {
    if (f_plus.size() != grad_g.size() || f_minus.size() != grad_g.size())
        throw Error(ErrorCode::InvalidArgument, "sliding_velocity dimension mismatch");
    if (!(grad_g.norm() > 1e-12)) throw Error(ErrorCode::DegenerateGeometry, "surface normal vanishes");
    const double p = grad_g.dot(f_plus);
    const double m = grad_g.dot(f_minus);

    SlidingDecision d;
    if (p < 0.0 && m > 0.0) {
        d.behavior = SurfaceBehavior::Sliding;
        d.alpha = m / (m - p);
        d.velocity = d.alpha * f_plus + (1.0 - d.alpha) * f_minus;
        d.side = '0';
    } else if (p > 0.0 && m > 0.0) {
        d.behavior = SurfaceBehavior::Crossing;
        d.alpha = 1.0;
        d.velocity = f_plus;
        d.side = '+';
    } else if (p < 0.0 && m < 0.0) {
        d.behavior = SurfaceBehavior::Crossing;
        d.alpha = 0.0;
        d.velocity = f_minus;
        d.side = '-';
    } else if (p == 0.0 || m == 0.0) {
        d.behavior = SurfaceBehavior::Tangent;
        const bool plus = p == 0.0;
        d.alpha = plus ? 1.0 : 0.0;
        d.velocity = plus ? f_plus : f_minus;
        d.side = plus ? '+' : '-';
    } else {
        d.behavior = SurfaceBehavior::Repelling;
        d.alpha = 1.0;
        d.velocity = f_plus;
        d.side = '+';
    }
    return d;
}

Trajectory integrate_filippov(const PiecewiseField& field, const Vec& x0, double t_end, double dt,
                              const InclusionOptions& options) {
    field.check_dimension(x0);
    if (!x0.allFinite()) throw Error(ErrorCode::InvalidArgument, "x0 must be finite");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (!(t_end >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be non-negative");

    const Stepper stepper(field, options);
    Trajectory traj;
    Vec x = x0;
    double t = 0.0;
    Mode mode = stepper.classify(x);
    traj.push(t, x, label(mode));
    if (mode.kind == Mode::Kind::Sliding) x = stepper.project_to_surface(mode.guard, x);
    traj.points.back() = x;

    const double end_slack = 1e-14 * std::max(1.0, t_end);
    int stalled = 0;
    while (t_end - t > end_slack) {
        traj.modes.back() = label(mode);
        const double h = std::min(dt, t_end - t);
        double advanced = 0.0;
        Mode next = mode;

        switch (mode.kind) {
            case Mode::Kind::Region: {
                const Piece& piece = field.piece(mode.pattern);
                const Vec k1 = piece.value(x);
                auto step = [&](double th) -> Vec { return x + th * piece.value(x + (0.5 * th) * k1); };
                const Vec x_full = step(h);
                const auto bad = stepper.violated(mode.pattern, x_full, std::numeric_limits<std::size_t>::max());
                if (bad.empty()) {
                    x = x_full;
                    advanced = h;
                    break;
                }
                double theta = h;
                for (std::size_t k : bad)
                    theta = std::min(theta, stepper.locate(step, k, sign_of(mode.pattern[k]), h));
                x = step(theta);
                advanced = theta;
                next = stepper.classify(x);
                break;
            }
            case Mode::Kind::Sliding: {
                const std::size_t k = mode.guard;
                const SignPattern& base = mode.pattern;
                if (stepper.decide(base, k, x).behavior != SurfaceBehavior::Sliding) {
                    next = exit_mode(base, k, stepper.decide(base, k, x));
                    break;
                }
                const Vec v1 = stepper.clamped_sliding_velocity(base, k, x);
                auto step = [&](double th) -> Vec {
                    const Vec mid = x + (0.5 * th) * v1;
                    return stepper.project_to_surface(k, x + th * stepper.clamped_sliding_velocity(base, k, mid));
                };
                double end = h;
                bool hit_guard = false;
                const auto bad = stepper.violated(base, step(h), k);
                for (std::size_t j : bad) {
                    end = std::min(end, stepper.locate(step, j, sign_of(base[j]), h));
                    hit_guard = true;
                }
                auto sliding_at = [&](double th) {
                    return stepper.decide(base, k, step(th)).behavior == SurfaceBehavior::Sliding;
                };
                bool exited = false;
                double exit_probe = end;
                if (!sliding_at(end)) {
                    double lo = 0.0;
                    double hi = end;
                    while (hi - lo > options.event_tol) {
                        const double mid = 0.5 * (lo + hi);
                        if (sliding_at(mid)) lo = mid; else hi = mid;
                    }
                    exit_probe = hi;
                    end = lo;
                    exited = true;
                    hit_guard = false;
                }
                if (end > 0.0) x = step(end);
                advanced = end;
                if (exited) {
                    next = exit_mode(base, k, stepper.decide(base, k, step(exit_probe)));
                } else if (hit_guard) {
                    next = stepper.classify(x);
                }
                break;
            }
            case Mode::Kind::Corner: {
                const Vec v = least_norm_element(filippov_map(field, x, options.surface_tol));
                x = x + h * v;
                advanced = h;
                next = stepper.classify(x);
                break;
            }
        }

        if (advanced > 0.0) {
            t = (advanced == t_end - t) ? t_end : t + advanced;
            traj.push(t, x, label(next));
            stalled = 0;
        } else if (++stalled > kMaxStalledEvents) {
            throw Error(ErrorCode::StepTooLarge, "event handling stalled at t = " + std::to_string(t));
        }
        mode = next;
    }
    traj.modes.back() = label(mode);
    return traj;
}

Trajectory integrate_tracking_selection(const PiecewiseField& field, const Trajectory& reference, double t_begin,
                                        double t_end, double dt, const InclusionOptions& options) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (!(t_end > t_begin)) throw Error(ErrorCode::InvalidArgument, "empty time span");
    if (reference.size() == 0) throw Error(ErrorCode::EmptyTrace, "reference trajectory is empty");

    Vec y = reference.at(t_begin);
    field.check_dimension(y);
    const auto& guards = field.guards();

    Trajectory out;
    out.push(t_begin, y, "");
    double t = t_begin;
    const double end_slack = 1e-14 * std::max(1.0, std::abs(t_end));
    while (t_end - t > end_slack) {
        const double h = std::min(dt, t_end - t);
        const double t_next = (h == t_end - t) ? t_end : t + h;

        double speed = 0.0;
        for (const auto& [pattern, piece] : field.pieces()) speed = std::max(speed, piece.value(y).norm());
        double grad = 1.0;
        for (const auto& g : guards) grad = std::max(grad, g.gradient(y).norm());
        const double band = std::max(options.radius_tol, h * speed * grad);

        const auto regions = field.adjacent_regions(y, band);
        if (regions.size() == 1) {
            const Piece& piece = field.piece(regions.front());
            out.modes.back() = regions.front().empty() ? "smooth" : regions.front();
            y = y + h * piece.value(y + (0.5 * h) * piece.value(y));
        } else {
            ConvexVelocitySet hull;
            for (const auto& region : regions) hull.vertices.push_back(field.piece(region).value(y));
            const Vec slope = (reference.at(t_next) - reference.at(t)) / (t_next - t);
            out.modes.back() = "select";
            y = y + h * project_onto_hull(hull, slope).point;
        }
        t = t_next;
        out.push(t, y, out.modes.back());
    }
    return out;
}

double slope_membership_violation(const Trajectory& trajectory, const PiecewiseField& field, double radius_tol) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
        const double span = trajectory.times[i + 1] - trajectory.times[i];
        const Vec slope = (trajectory.points[i + 1] - trajectory.points[i]) / span;
        const Vec mid = 0.5 * (trajectory.points[i] + trajectory.points[i + 1]);
        worst = std::max(worst, hull_distance(filippov_map(field, mid, radius_tol), slope));
    }
    return worst;
}

}  // namespace filsa
