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

// Occupation measures of an iterate trace on state x velocity space, their
// time averages, and the diagnostics run on them: stationarity residuals
// against a smooth test family, support on the graph of F_h / K_h, and the
// partial sums of the noise martingale.

#include "filsa/field.hpp"
#include "filsa/sa.hpp"

#include <string>
#include <vector>

namespace filsa {

struct Box {
    Vec lower;
    Vec upper;

    [[nodiscard]] bool contains(const Vec& x) const;
    /// Half the diagonal.
    [[nodiscard]] double radius() const { return 0.5 * (upper - lower).norm(); }
};

struct Atom {
    Vec x;
    Vec z;
    double weight = 0.0;
};

struct EmpiricalMeasure {
    std::vector<Atom> atoms;
    Box box_B;  // states
    Box box_D;  // velocities

    [[nodiscard]] double total_weight() const;
};

/// Sorts atoms, merges those whose state and velocity agree to 1e-15 (weights
/// summed), and sets both boxes to the componentwise hull padded by 10%.
[[nodiscard]] EmpiricalMeasure make_measure(std::vector<Atom> atoms);

/// Exact time average over [0, t(n)] of the Dirac path delta_(x(k), z(k)) on
/// [t(k), t(k+1)): atoms (x(k), z(k)) with weight a(k) / t(n), k < n.
[[nodiscard]] EmpiricalMeasure averaged_measure(const IterateTrace& trace, std::size_t up_to_n);

/// f(x) = x^beta exp(-|x|^2 / (2 sigma^2)).
struct TestFunction {
    std::vector<int> exponents;
    double sigma = 1.0;
    // Closed-form bounds on |f|, |grad f| and the operator norm of the Hessian.
    double value_bound = 0.0;
    double gradient_bound = 0.0;
    double hessian_bound = 0.0;

    TestFunction(std::vector<int> exponents, double sigma);

    [[nodiscard]] int degree() const;
    [[nodiscard]] double value(const Vec& x) const;
    [[nodiscard]] Vec gradient(const Vec& x) const;
    [[nodiscard]] std::string name() const;
};

struct TestFunctionFamily {
    std::vector<TestFunction> members;
    double sigma = 1.0;

    /// All multi-indices |beta| <= max_degree in graded order, with sigma the
    /// radius of box_B (1 when the box is a point).
    static TestFunctionFamily gaussian_monomials(const Box& box_B, int max_degree = 2);
};

/// sum over atoms of w <grad f_i(x), z>, one entry per member.
[[nodiscard]] std::vector<double> stationarity_residual(const EmpiricalMeasure& measure,
                                                        const TestFunctionFamily& family);

struct SupportFractions {
    double eps = 0.0;
    double filippov = 0.0;
    double krasovskii = 0.0;
};

/// Weight of atoms whose velocity lies within eps of F_h(x) (and of K_h(x)).
[[nodiscard]] SupportFractions graph_support_fraction(const EmpiricalMeasure& measure, const PiecewiseField& field,
                                                      double eps, double radius_tol = 1e-9);

/// Same for several eps values with a single pass over the atoms.
[[nodiscard]] std::vector<SupportFractions> graph_support_fractions(const EmpiricalMeasure& measure,
                                                                    const PiecewiseField& field,
                                                                    const std::vector<double>& eps_values,
                                                                    double radius_tol = 1e-9);

struct LocalVelocityStats {
    double mass = 0.0;            // weight of atoms with |x - center| <= radius
    Vec barycenter;               // weighted mean of z over those atoms
    std::vector<double> target_mass;  // weight with |z - target_j| <= target_radius
};

[[nodiscard]] LocalVelocityStats local_velocity_statistics(const EmpiricalMeasure& measure, const Vec& center,
                                                           double radius, const std::vector<Vec>& targets,
                                                           double target_radius);

struct MartingaleDiagnostic {
    std::size_t n0 = 0;
    /// xi[i][j][n] = sum_{m<n} a(m) d_j f_i(x(m)) M_j(m+1)
    std::vector<std::vector<std::vector<double>>> xi;
    /// oscillation[i][j] = max_{n >= n0} |xi(n) - xi(n0)|
    std::vector<std::vector<double>> oscillation;
    /// quadratic_variation[i][n] = sum_{m<n} a(m)^2 |grad f_i(x(m))|^2 |M(m+1)|^2
    std::vector<std::vector<double>> quadratic_variation;
    /// quadratic_variation[i][N] - quadratic_variation[i][n0]
    std::vector<double> tail_quadratic_variation;

    /// Sum over members of the quadratic-variation paths.
    [[nodiscard]] std::vector<double> total_quadratic_variation() const;
    /// Every oscillation is at most factor * sqrt(tail quadratic variation).
    [[nodiscard]] bool oscillation_within(double factor) const;
};

/// n0 defaults to N / 2 when passed as npos.
[[nodiscard]] MartingaleDiagnostic martingale_diagnostic(const IterateTrace& trace, const TestFunctionFamily& family,
                                                         std::size_t n0 = static_cast<std::size_t>(-1));

/// R^2 of the least-squares line through (n, path[n]).
[[nodiscard]] double linear_fit_r2(const std::vector<double>& path);

struct DecayRow {
    std::size_t checkpoint = 0;
    double time = 0.0;                   // median t(n) over traces
    std::vector<double> member_residual; // per member, median over traces
    double max_residual = 0.0;           // median over traces of max_i |residual_i|
    double envelope = 0.0;               // C / t(n)
};

struct DecayTable {
    std::vector<DecayRow> rows;
    double envelope_constant = 0.0;      // C, fit at the first checkpoint
};

[[nodiscard]] DecayTable residual_decay_study(const std::vector<IterateTrace>& traces,
                                              const TestFunctionFamily& family,
                                              const std::vector<std::size_t>& checkpoints);

/// First index n with t(n) >= t, for each requested clock value.
[[nodiscard]] std::vector<std::size_t> checkpoints_at_times(const IterateTrace& trace,
                                                            const std::vector<double>& times);

[[nodiscard]] double median(std::vector<double> values);

}  // namespace filsa
