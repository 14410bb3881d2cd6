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
#include "filsa/hull.hpp"
#include "filsa/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>

namespace filsa::test {

inline Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

inline ConvexVelocitySet hull(std::initializer_list<Vec> vertices) {
    return ConvexVelocitySet{std::vector<Vec>(vertices)};
}

// Mutual containment, the only meaningful equality for vertex lists.
inline bool same_hull(const ConvexVelocitySet& a, const ConvexVelocitySet& b, double tol) {
    for (const auto& v : a.vertices)
        if (hull_distance(b, v) > tol) return false;
    for (const auto& v : b.vertices)
        if (hull_distance(a, v) > tol) return false;
    return true;
}

// Small deterministic generator for property tests, separate from the
// library's Rng so that test inputs do not depend on its implementation.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    Vec vector(Eigen::Index d, double lo, double hi) {
        Vec v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 engine_;
};

inline PiecewiseField constant_field(const Vec& c) {
    return PiecewiseField("constant", c.size(), {}, {{"", Piece::constant_value(c)}});
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("filsa_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace filsa::test
