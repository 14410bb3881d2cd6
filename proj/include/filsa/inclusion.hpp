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

// Time stepping for x' in F_h(x) on catalog fields: explicit midpoint inside
// regions, bisection event location on guard surfaces, and the convex
// combination of the two adjacent pieces while sliding on an attracting
// surface.

#include "filsa/field.hpp"
#include "filsa/hull.hpp"

#include <string>
#include <vector>

namespace filsa {

/// Continuous path sampled at increasing times. modes[i] labels the segment
/// that starts at node i: the region's sign pattern ("smooth" when the field
/// has no guards), "slide:k" on guard k, "corner", or "select" for nodes of a
/// tracking comparator that used a hull projection.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> points;
    std::vector<std::string> modes;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept {
        return points.empty() ? 0 : points.front().size();
    }
    /// Piecewise-linear evaluation. Throws OutOfDomain outside [front, back].
    [[nodiscard]] Vec at(double t) const;
    void push(double t, Vec x, std::string mode);
};

enum class SurfaceBehavior { Sliding, Crossing, Tangent, Repelling };

[[nodiscard]] const char* to_string(SurfaceBehavior behavior) noexcept;

struct SlidingDecision {
    SurfaceBehavior behavior = SurfaceBehavior::Crossing;
    double alpha = 0.0;  // weight of f_plus in the velocity
    Vec velocity;
    char side = '+';     // region continued into ('+' or '-'); unused while sliding
};

/// Classifies a surface with normal grad_g from p = <grad_g, f_plus> and
/// m = <grad_g, f_minus>. Attracting (p < 0 < m): sliding velocity
/// alpha f_plus + (1 - alpha) f_minus with alpha = m / (m - p). Same strict
/// sign: crossing into the downstream side. p m = 0: tangent along the
/// vanishing side. Repelling (p > 0 > m): leaves on the '+' side.
[[nodiscard]] SlidingDecision sliding_velocity(const Vec& f_plus, const Vec& f_minus, const Vec& grad_g);

struct InclusionOptions {
    double surface_tol = 1e-10;
    double event_tol = 1e-12;
    double radius_tol = 1e-9;  // guard band for the set-valued maps
};

/// One canonical Filippov solution on [0, t_end].
[[nodiscard]] Trajectory integrate_filippov(const PiecewiseField& field, const Vec& x0, double t_end,
                                            double dt, const InclusionOptions& options = {});

/// Approximate solution of x' in F_h(x) on [t_begin, t_end] started at
/// reference(t_begin) that, wherever F_h is multivalued, picks the velocity
/// of F_h nearest to the reference's chord slope. Away from guards it
/// integrates the region piece with the midpoint rule.
[[nodiscard]] Trajectory integrate_tracking_selection(const PiecewiseField& field, const Trajectory& reference,
                                                      double t_begin, double t_end, double dt,
                                                      const InclusionOptions& options = {});

/// max over segments of dist(chord slope, F_h(segment midpoint)).
[[nodiscard]] double slope_membership_violation(const Trajectory& trajectory, const PiecewiseField& field,
                                                double radius_tol = 1e-9);

}  // namespace filsa
