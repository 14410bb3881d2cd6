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

// Piecewise-smooth vector fields and their set-valued regularisations.
//
// A field is described by a list of smooth guard functions g_k and one smooth
// piece per full sign pattern of the guards ('+' where g_k > 0, '-' where
// g_k < 0). Guard zero sets are Lebesgue-null, so the values a field takes on
// them (the optional `boundary_values`, keyed by patterns containing '0') are
// seen by the Krasovskii map but discarded by the Filippov map.

#include "filsa/hull.hpp"
#include "filsa/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filsa {

/// One character per guard: '+', '-' or '0'.
using SignPattern = std::string;

/// Maps the typographic minus (U+2212) to '-' and validates the alphabet.
[[nodiscard]] SignPattern normalize_pattern(std::string_view text, bool allow_zero);

enum class GuardKind { Affine, Norm };

/// Affine guard a.x + b, or norm guard ||x - c|| - r.
struct Guard {
    GuardKind kind = GuardKind::Affine;
    Vec normal;
    double offset = 0.0;
    Vec center;
    double radius = 0.0;

    static Guard affine(Vec normal, double offset);
    /// x_index - offset
    static Guard coordinate(Eigen::Index dim, Eigen::Index index, double offset = 0.0);
    static Guard norm(Vec center, double radius);

    [[nodiscard]] Eigen::Index dimension() const noexcept {
        return kind == GuardKind::Affine ? normal.size() : center.size();
    }
    [[nodiscard]] double value(const Vec& x) const;
    [[nodiscard]] Vec gradient(const Vec& x) const;
    /// Signed Euclidean distance from x to the zero set (value / |normal| for
    /// affine guards).
    [[nodiscard]] double signed_distance(const Vec& x) const;
};

enum class PieceKind { Constant, Affine, Quadratic };

/// Smooth piece: c + B x + (x' Q_i x)_i with the higher-order terms present
/// only for the affine and quadratic kinds.
struct Piece {
    PieceKind kind = PieceKind::Constant;
    Vec constant;
    Mat linear;
    std::vector<Mat> quadratic;

    static Piece constant_value(Vec value);
    static Piece affine(Mat linear, Vec constant);
    static Piece quadratic_form(Vec constant, Mat linear, std::vector<Mat> quadratic);

    [[nodiscard]] Eigen::Index dimension() const noexcept { return constant.size(); }
    [[nodiscard]] Vec value(const Vec& x) const;
};

struct StateBox {
    Vec lower;
    Vec upper;
    [[nodiscard]] bool contains(const Vec& x) const;
};

class PiecewiseField {
public:
    PiecewiseField(std::string name, Eigen::Index dimension, std::vector<Guard> guards,
                   std::map<SignPattern, Piece> pieces,
                   std::map<SignPattern, Vec> boundary_values = {},
                   std::optional<StateBox> box = std::nullopt,
                   std::optional<double> lipschitz_bound = std::nullopt);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
    [[nodiscard]] const std::vector<Guard>& guards() const noexcept { return guards_; }
    [[nodiscard]] const std::map<SignPattern, Piece>& pieces() const noexcept { return pieces_; }
    [[nodiscard]] const std::map<SignPattern, Vec>& boundary_values() const noexcept {
        return boundary_values_;
    }
    [[nodiscard]] const std::optional<StateBox>& box() const noexcept { return box_; }
    [[nodiscard]] std::optional<double> lipschitz_bound() const noexcept { return lipschitz_bound_; }

    /// Exact sign pattern of x (guards compared against exact zero).
    [[nodiscard]] SignPattern pattern_at(const Vec& x) const;

    /// Piece for a full pattern; throws UnassignedPattern when missing.
    [[nodiscard]] const Piece& piece(const SignPattern& pattern) const;
    [[nodiscard]] bool has_piece(const SignPattern& pattern) const {
        return pieces_.count(pattern) != 0;
    }

    /// Full-dimensional regions whose closure meets the tol-ball around x,
    /// in lexicographic pattern order.
    [[nodiscard]] std::vector<SignPattern> adjacent_regions(const Vec& x, double tol) const;

    /// Value of h at x with no state-box check.
    [[nodiscard]] Vec value_unchecked(const Vec& x) const;

    void check_dimension(const Vec& x) const;

private:
    std::string name_;
    Eigen::Index dimension_;
    std::vector<Guard> guards_;
    std::map<SignPattern, Piece> pieces_;
    std::map<SignPattern, Vec> boundary_values_;
    std::optional<StateBox> box_;
    std::optional<double> lipschitz_bound_;
};

/// Pointwise h(x). Boundary patterns use `boundary_values` when assigned and
/// otherwise the adjacent region with the lexicographically smallest pattern.
[[nodiscard]] Vec evaluate_field(const PiecewiseField& field, const Vec& x);

/// F_h(x): hull of the pieces of every adjacent full-dimensional region.
[[nodiscard]] ConvexVelocitySet filippov_map(const PiecewiseField& field, const Vec& x,
                                             double radius_tol = 1e-9);

/// K_h(x): the Filippov hull plus the boundary values assigned in the band.
[[nodiscard]] ConvexVelocitySet krasovskii_map(const PiecewiseField& field, const Vec& x,
                                               double radius_tol = 1e-9);

/// Monte-Carlo estimate of (h * phi_delta)(x), phi_delta the normalised
/// exp(-1/(1-|u/delta|^2)) bump on the delta-ball. Draws that land on a guard
/// zero set are redrawn.
[[nodiscard]] Vec mollify(const PiecewiseField& field, const Vec& x, double delta,
                          std::size_t samples, Rng& rng);

/// Built-in catalog: "example1", "relay", "spurious_equilibrium", "linear".
/// `dimension` only matters for "linear" (h(x) = -x on R^dimension).
[[nodiscard]] PiecewiseField builtin_field(std::string_view name, Eigen::Index dimension = 1);
[[nodiscard]] std::vector<std::string> builtin_field_names();

}  // namespace filsa
