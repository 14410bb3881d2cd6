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

#include "filsa/types.hpp"

#include <vector>

namespace filsa {

/// Finitely generated convex set: the convex hull of `vertices`. Redundant and
/// duplicate vertices are allowed, so two sets are compared by mutual
/// containment rather than by their vertex lists.
struct ConvexVelocitySet {
    std::vector<Vec> vertices;

    [[nodiscard]] bool empty() const noexcept { return vertices.empty(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept {
        return vertices.empty() ? 0 : vertices.front().size();
    }
};

struct HullProjection {
    Vec point;                    // nearest point of the hull
    double distance = 0.0;        // Euclidean distance to the query
    std::vector<double> weights;  // simplex weights over the input vertices
};

/// Nearest point of conv(vertices) to `v`, computed with Wolfe's minimum-norm
/// point algorithm on the shifted vertices. Exact up to roundoff (finite
/// active-set termination). Throws EmptySet.
[[nodiscard]] HullProjection project_onto_hull(const ConvexVelocitySet& set, const Vec& v);

[[nodiscard]] double hull_distance(const ConvexVelocitySet& set, const Vec& v);

[[nodiscard]] bool hull_contains(const ConvexVelocitySet& set, const Vec& v, double tol = 1e-9);

/// Least-norm element of the hull.
[[nodiscard]] Vec least_norm_element(const ConvexVelocitySet& set);

/// Every vertex of `inner` lies within `tol` of conv(outer.vertices).
[[nodiscard]] bool hull_subset(const ConvexVelocitySet& inner, const ConvexVelocitySet& outer,
                               double tol = 1e-9);

/// Mutual containment.
[[nodiscard]] bool hulls_equal(const ConvexVelocitySet& a, const ConvexVelocitySet& b,
                               double tol = 1e-9);

}  // namespace filsa
