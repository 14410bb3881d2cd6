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

#include "filsa/hull.hpp"

#include "filsa/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace filsa {

namespace {

// Affine minimum-norm combination of the columns of `points`: minimise
// ||points * mu|| subject to sum(mu) = 1.
Vec affine_min_norm(const Mat& points) {
    const Eigen::Index k = points.cols();
    Mat system = Mat::Zero(k + 1, k + 1);
    system.topLeftCorner(k, k) = points.transpose() * points;
    system.block(0, k, k, 1).setOnes();
    system.block(k, 0, 1, k).setOnes();
    Vec rhs = Vec::Zero(k + 1);
    rhs[k] = 1.0;
    Vec solution = system.completeOrthogonalDecomposition().solve(rhs);
    return solution.head(k);
}

}  // namespace

HullProjection project_onto_hull(const ConvexVelocitySet& set, const Vec& v) {
    if (set.empty()) throw Error(ErrorCode::EmptySet, "convex set has no vertices");
    const auto n = static_cast<Eigen::Index>(set.vertices.size());
    const Eigen::Index d = v.size();

    Mat shifted(d, n);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec& vert = set.vertices[static_cast<std::size_t>(i)];
        if (vert.size() != d) throw Error(ErrorCode::InvalidArgument, "vertex dimension mismatch");
        shifted.col(i) = vert - v;
        scale = std::max(scale, shifted.col(i).squaredNorm());
    }

    HullProjection result;
    result.weights.assign(static_cast<std::size_t>(n), 0.0);

    Eigen::Index start = 0;
    shifted.colwise().squaredNorm().minCoeff(&start);

    if (scale == 0.0) {
        result.point = v;
        result.weights[static_cast<std::size_t>(start)] = 1.0;
        return result;
    }

    const double stop_tol = 1e-14 * scale;
    const double weight_tol = 1e-14;

    std::vector<Eigen::Index> active{start};
    std::vector<double> weights{1.0};
    Vec x = shifted.col(start);

    const int max_major = 50 * static_cast<int>(n) + 50;
    for (int major = 0; major < max_major; ++major) {
        const double xx = x.squaredNorm();
        if (xx <= 1e-30 * scale) break;

        Eigen::Index entering = 0;
        const double best = (x.transpose() * shifted).minCoeff(&entering);
        if (best >= xx - stop_tol) break;
        if (std::find(active.begin(), active.end(), entering) != active.end()) break;
        active.push_back(entering);
        weights.push_back(0.0);

        for (;;) {
            Mat cols(d, static_cast<Eigen::Index>(active.size()));
            for (std::size_t i = 0; i < active.size(); ++i)
                cols.col(static_cast<Eigen::Index>(i)) = shifted.col(active[i]);
            const Vec mu = affine_min_norm(cols);

            if ((mu.array() > weight_tol).all()) {
                for (std::size_t i = 0; i < active.size(); ++i)
                    weights[i] = mu[static_cast<Eigen::Index>(i)];
                x = cols * mu;
                break;
            }

            double theta = 1.0;
            for (std::size_t i = 0; i < active.size(); ++i) {
                const double m = mu[static_cast<Eigen::Index>(i)];
                if (m <= weight_tol) {
                    const double denom = weights[i] - m;
                    if (denom > 0.0) theta = std::min(theta, weights[i] / denom);
                }
            }
            for (std::size_t i = 0; i < active.size(); ++i)
                weights[i] = (1.0 - theta) * weights[i] + theta * mu[static_cast<Eigen::Index>(i)];

            // Drop the vertices whose weight hit zero; always drop at least one.
            std::size_t smallest = 0;
            for (std::size_t i = 1; i < weights.size(); ++i)
                if (weights[i] < weights[smallest]) smallest = i;
            std::vector<Eigen::Index> kept;
            std::vector<double> kept_weights;
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (i == smallest || weights[i] <= weight_tol) continue;
                kept.push_back(active[i]);
                kept_weights.push_back(weights[i]);
            }
            if (kept.empty()) {
                kept.push_back(active[smallest]);
                kept_weights.push_back(1.0);
            }
            double total = 0.0;
            for (double w : kept_weights) total += w;
            for (double& w : kept_weights) w /= total;
            active = std::move(kept);
            weights = std::move(kept_weights);

            x.setZero();
            for (std::size_t i = 0; i < active.size(); ++i) x += weights[i] * shifted.col(active[i]);
            if (active.size() == 1) break;
        }
    }

    for (std::size_t i = 0; i < active.size(); ++i)
        result.weights[static_cast<std::size_t>(active[i])] += weights[i];
    result.point = x + v;
    result.distance = x.norm();
    return result;
}

double hull_distance(const ConvexVelocitySet& set, const Vec& v) {
    return project_onto_hull(set, v).distance;
}

bool hull_contains(const ConvexVelocitySet& set, const Vec& v, double tol) {
    if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "tolerance must be non-negative");
    return hull_distance(set, v) <= tol;
}

Vec least_norm_element(const ConvexVelocitySet& set) {
    if (set.empty()) throw Error(ErrorCode::EmptySet, "convex set has no vertices");
    return project_onto_hull(set, Vec::Zero(set.dimension())).point;
}

bool hull_subset(const ConvexVelocitySet& inner, const ConvexVelocitySet& outer, double tol) {
    if (inner.empty() || outer.empty()) throw Error(ErrorCode::EmptySet, "convex set has no vertices");
    return std::all_of(inner.vertices.begin(), inner.vertices.end(),
                       [&](const Vec& v) { return hull_contains(outer, v, tol); });
}

bool hulls_equal(const ConvexVelocitySet& a, const ConvexVelocitySet& b, double tol) {
    return hull_subset(a, b, tol) && hull_subset(b, a, tol);
}

}  // namespace filsa
