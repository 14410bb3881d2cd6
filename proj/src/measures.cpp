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

#include "filsa/measures.hpp"

#include "filsa/error.hpp"
#include "filsa/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace filsa {

namespace {

constexpr double kMergeTol = 1e-15;

bool lexicographic_less(const Atom& a, const Atom& b) {
    for (Eigen::Index i = 0; i < a.x.size(); ++i)
        if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    for (Eigen::Index i = 0; i < a.z.size(); ++i)
        if (a.z[i] != b.z[i]) return a.z[i] < b.z[i];
    return false;
}

bool same_point(const Atom& a, const Atom& b) {
    return (a.x - b.x).cwiseAbs().maxCoeff() <= kMergeTol && (a.z - b.z).cwiseAbs().maxCoeff() <= kMergeTol;
}

Box padded_box(const std::vector<Atom>& atoms, bool states) {
    const Vec& first = states ? atoms.front().x : atoms.front().z;
    Vec lo = first;
    Vec hi = first;
    for (const auto& atom : atoms) {
        const Vec& v = states ? atom.x : atom.z;
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        const double range = hi[i] - lo[i];
        const double pad = range > 0.0 ? 0.1 * range : 0.1 * std::max(1.0, std::abs(hi[i]));
        lo[i] -= pad;
        hi[i] += pad;
    }
    return Box{lo, hi};
}

// sup_{r >= 0} r^p exp(-r^2 / (2 sigma^2))
double radial_peak(int p, double sigma) {
    if (p <= 0) return 1.0;
    const double pp = static_cast<double>(p);
    return std::pow(pp * sigma * sigma, 0.5 * pp) * std::exp(-0.5 * pp);
}

}  // namespace

bool Box::contains(const Vec& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

double EmpiricalMeasure::total_weight() const {
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.weight;
    return total;
}

EmpiricalMeasure make_measure(std::vector<Atom> atoms) {
    if (atoms.empty()) throw Error(ErrorCode::EmptyTrace, "measure needs at least one atom");
    std::stable_sort(atoms.begin(), atoms.end(), lexicographic_less);
    EmpiricalMeasure measure;
    for (auto& atom : atoms) {
        if (!(atom.weight > 0.0)) continue;
        if (!measure.atoms.empty() && same_point(measure.atoms.back(), atom)) {
            measure.atoms.back().weight += atom.weight;
        } else {
            measure.atoms.push_back(std::move(atom));
        }
    }
    if (measure.atoms.empty()) throw Error(ErrorCode::EmptyTrace, "measure has no positive weight");
    measure.box_B = padded_box(measure.atoms, true);
    measure.box_D = padded_box(measure.atoms, false);
    return measure;
}

EmpiricalMeasure averaged_measure(const IterateTrace& trace, std::size_t up_to_n) {
    if (trace.size() == 0) throw Error(ErrorCode::EmptyTrace, "trace has no steps");
    if (up_to_n == 0 || up_to_n > trace.size())
        throw Error(ErrorCode::IndexOutOfRange, "averaging index must lie in [1, N]");
    const double horizon = trace.times[up_to_n];
    if (!(horizon > 0.0)) throw Error(ErrorCode::EmptyTrace, "trace clock has not advanced");
    std::vector<Atom> atoms;
    atoms.reserve(up_to_n);
    for (std::size_t k = 0; k < up_to_n; ++k)
        atoms.push_back(Atom{trace.states[k], trace.drifts[k], trace.steps[k] / horizon});
    return make_measure(std::move(atoms));
}

TestFunction::TestFunction(std::vector<int> exps, double s) : exponents(std::move(exps)), sigma(s) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "test function width must be positive");
    const int k = degree();
    const double s2 = sigma * sigma;
    value_bound = radial_peak(k, sigma);
    gradient_bound = (k > 0 ? k * radial_peak(k - 1, sigma) : 0.0) + radial_peak(k + 1, sigma) / s2;
    hessian_bound = (k > 1 ? k * (k - 1) * radial_peak(k - 2, sigma) : 0.0) +
                    (2.0 * k + 1.0) * radial_peak(k, sigma) / s2 + radial_peak(k + 2, sigma) / (s2 * s2);
}

int TestFunction::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

double TestFunction::value(const Vec& x) const {
    double mono = 1.0;
    for (std::size_t j = 0; j < exponents.size(); ++j)
        mono *= std::pow(x[static_cast<Eigen::Index>(j)], exponents[j]);
    return mono * std::exp(-x.squaredNorm() / (2.0 * sigma * sigma));
}

Vec TestFunction::gradient(const Vec& x) const {
    const Eigen::Index d = x.size();
    const double weight = std::exp(-x.squaredNorm() / (2.0 * sigma * sigma));
    double mono = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) mono *= std::pow(x[j], exponents[static_cast<std::size_t>(j)]);
    Vec grad(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const int bj = exponents[static_cast<std::size_t>(j)];
        double partial_mono = 0.0;
        if (bj > 0) {
            partial_mono = bj * std::pow(x[j], bj - 1);
            for (Eigen::Index l = 0; l < d; ++l)
                if (l != j) partial_mono *= std::pow(x[l], exponents[static_cast<std::size_t>(l)]);
        }
        grad[j] = (partial_mono - mono * x[j] / (sigma * sigma)) * weight;
    }
    return grad;
}

std::string TestFunction::name() const {
    std::string out = "x^(";
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (j) out += ",";
        out += std::to_string(exponents[j]);
    }
    return out + ")";
}

TestFunctionFamily TestFunctionFamily::gaussian_monomials(const Box& box_B, int max_degree) {
    const auto d = static_cast<std::size_t>(box_B.lower.size());
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "box has no dimension");
    TestFunctionFamily family;
    const double r = box_B.radius();
    family.sigma = r > 0.0 ? r : 1.0;
    // Graded order: by total degree, then lexicographically descending on the
    // exponent vector (x1 before x2, x1^2 before x1 x2).
    for (int degree = 0; degree <= max_degree; ++degree) {
        std::vector<int> exps(d, 0);
        auto emit = [&](auto&& self, std::size_t pos, int left) -> void {
            if (pos + 1 == d) {
                exps[pos] = left;
                family.members.emplace_back(exps, family.sigma);
                return;
            }
            for (int e = left; e >= 0; --e) {
                exps[pos] = e;
                self(self, pos + 1, left - e);
            }
        };
        emit(emit, 0, degree);
    }
    return family;
}

std::vector<double> stationarity_residual(const EmpiricalMeasure& measure, const TestFunctionFamily& family) {
    if (measure.atoms.empty()) throw Error(ErrorCode::EmptyTrace, "measure has no atoms");
    std::vector<double> out(family.members.size(), 0.0);
    for (const auto& atom : measure.atoms)
        for (std::size_t i = 0; i < family.members.size(); ++i)
            out[i] += atom.weight * family.members[i].gradient(atom.x).dot(atom.z);
    return out;
}

std::vector<SupportFractions> graph_support_fractions(const EmpiricalMeasure& measure, const PiecewiseField& field,
                                                      const std::vector<double>& eps_values, double radius_tol) {
    std::vector<SupportFractions> out;
    for (double eps : eps_values) {
        if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
        out.push_back(SupportFractions{eps, 0.0, 0.0});
    }
    for (const auto& atom : measure.atoms) {
        const double to_filippov = hull_distance(filippov_map(field, atom.x, radius_tol), atom.z);
        const double to_krasovskii = hull_distance(krasovskii_map(field, atom.x, radius_tol), atom.z);
        for (auto& row : out) {
            if (to_filippov <= row.eps) row.filippov += atom.weight;
            if (to_krasovskii <= row.eps) row.krasovskii += atom.weight;
        }
    }
    return out;
}

SupportFractions graph_support_fraction(const EmpiricalMeasure& measure, const PiecewiseField& field, double eps,
                                        double radius_tol) {
    return graph_support_fractions(measure, field, {eps}, radius_tol).front();
}

LocalVelocityStats local_velocity_statistics(const EmpiricalMeasure& measure, const Vec& center, double radius,
                                             const std::vector<Vec>& targets, double target_radius) {
    LocalVelocityStats stats;
    stats.target_mass.assign(targets.size(), 0.0);
    const Eigen::Index dz = measure.atoms.empty() ? center.size() : measure.atoms.front().z.size();
    Vec moment = Vec::Zero(dz);
    for (const auto& atom : measure.atoms) {
        if ((atom.x - center).norm() > radius) continue;
        stats.mass += atom.weight;
        moment += atom.weight * atom.z;
        for (std::size_t j = 0; j < targets.size(); ++j)
            if ((atom.z - targets[j]).norm() <= target_radius) stats.target_mass[j] += atom.weight;
    }
    stats.barycenter = stats.mass > 0.0 ? Vec(moment / stats.mass) : Vec(moment);
    return stats;
}

std::vector<double> MartingaleDiagnostic::total_quadratic_variation() const {
    if (quadratic_variation.empty()) return {};
    std::vector<double> total(quadratic_variation.front().size(), 0.0);
    for (const auto& path : quadratic_variation)
        for (std::size_t n = 0; n < path.size(); ++n) total[n] += path[n];
    return total;
}

bool MartingaleDiagnostic::oscillation_within(double factor) const {
    for (std::size_t i = 0; i < oscillation.size(); ++i) {
        const double bound = factor * std::sqrt(tail_quadratic_variation[i]);
        for (double osc : oscillation[i])
            if (osc > bound) return false;
    }
    return true;
}

MartingaleDiagnostic martingale_diagnostic(const IterateTrace& trace, const TestFunctionFamily& family,
                                           std::size_t n0) {
    const std::size_t N = trace.size();
    if (trace.noises.size() != N) throw Error(ErrorCode::InvalidArgument, "trace has no recorded noises");
    if (n0 == static_cast<std::size_t>(-1)) n0 = N / 2;
    if (n0 > N) throw Error(ErrorCode::IndexOutOfRange, "n0 beyond trace length");
    const auto d = static_cast<std::size_t>(trace.dimension());
    const std::size_t members = family.members.size();

    MartingaleDiagnostic diag;
    diag.n0 = n0;
    diag.xi.assign(members, std::vector<std::vector<double>>(d, std::vector<double>(N + 1, 0.0)));
    diag.quadratic_variation.assign(members, std::vector<double>(N + 1, 0.0));
    for (std::size_t m = 0; m < N; ++m) {
        const double a = trace.steps[m];
        const Vec& noise = trace.noises[m];
        const double noise_sq = noise.squaredNorm();
        for (std::size_t i = 0; i < members; ++i) {
            const Vec grad = family.members[i].gradient(trace.states[m]);
            for (std::size_t j = 0; j < d; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                diag.xi[i][j][m + 1] = diag.xi[i][j][m] + a * grad[jj] * noise[jj];
            }
            diag.quadratic_variation[i][m + 1] =
                diag.quadratic_variation[i][m] + a * a * grad.squaredNorm() * noise_sq;
        }
    }
    diag.oscillation.assign(members, std::vector<double>(d, 0.0));
    diag.tail_quadratic_variation.assign(members, 0.0);
    for (std::size_t i = 0; i < members; ++i) {
        diag.tail_quadratic_variation[i] = diag.quadratic_variation[i][N] - diag.quadratic_variation[i][n0];
        for (std::size_t j = 0; j < d; ++j) {
            const auto& path = diag.xi[i][j];
            double osc = 0.0;
            for (std::size_t n = n0; n <= N; ++n) osc = std::max(osc, std::abs(path[n] - path[n0]));
            diag.oscillation[i][j] = osc;
        }
    }
    return diag;
}

double linear_fit_r2(const std::vector<double>& path) {
    const std::size_t n = path.size();
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "linear fit needs at least three points");
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += static_cast<double>(i);
        mean_y += path[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        const double dy = path[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (syy == 0.0) return 1.0;
    return (sxy * sxy) / (sxx * syy);
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of an empty sequence");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

DecayTable residual_decay_study(const std::vector<IterateTrace>& traces, const TestFunctionFamily& family,
                                const std::vector<std::size_t>& checkpoints) {
    if (traces.empty()) throw Error(ErrorCode::EmptyTrace, "decay study needs at least one trace");
    if (checkpoints.empty()) throw Error(ErrorCode::InvalidArgument, "decay study needs checkpoints");
    for (std::size_t c = 1; c < checkpoints.size(); ++c)
        if (checkpoints[c] <= checkpoints[c - 1])
            throw Error(ErrorCode::InvalidArgument, "checkpoints must be increasing");

    DecayTable table;
    for (std::size_t checkpoint : checkpoints) {
        DecayRow row;
        row.checkpoint = checkpoint;
        std::vector<double> times;
        std::vector<double> maxima;
        std::vector<std::vector<double>> per_member(family.members.size());
        for (const auto& trace : traces) {
            const auto residual = stationarity_residual(averaged_measure(trace, checkpoint), family);
            double worst = 0.0;
            for (std::size_t i = 0; i < residual.size(); ++i) {
                per_member[i].push_back(residual[i]);
                worst = std::max(worst, std::abs(residual[i]));
            }
            maxima.push_back(worst);
            times.push_back(trace.times[checkpoint]);
        }
        row.time = median(times);
        row.max_residual = median(maxima);
        for (auto& values : per_member) row.member_residual.push_back(median(values));
        table.rows.push_back(std::move(row));
    }
    table.envelope_constant = table.rows.front().max_residual * table.rows.front().time;
    for (auto& row : table.rows) row.envelope = table.envelope_constant / row.time;
    return table;
}

std::vector<std::size_t> checkpoints_at_times(const IterateTrace& trace, const std::vector<double>& times) {
    std::vector<std::size_t> out;
    for (double t : times) {
        auto it = std::lower_bound(trace.times.begin(), trace.times.end(), t);
        if (it == trace.times.end())
            throw Error(ErrorCode::IndexOutOfRange, "trace clock never reaches " + std::to_string(t));
        out.push_back(static_cast<std::size_t>(std::distance(trace.times.begin(), it)));
    }
    return out;
}

}  // namespace filsa
