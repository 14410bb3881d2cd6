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

#include "filsa/field.hpp"

#include "filsa/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace filsa {

namespace {

constexpr std::size_t kMaxFreeGuards = 12;

void push_unique(std::vector<Vec>& vertices, const Vec& v) {
    for (const auto& existing : vertices)
        if (existing == v) return;
    vertices.push_back(v);
}

// All full patterns obtained by replacing the listed positions with '+'/'-',
// in lexicographic order ('+' < '-').
std::vector<SignPattern> expand(const SignPattern& base, const std::vector<std::size_t>& free) {
    std::vector<SignPattern> out;
    const std::size_t count = std::size_t{1} << free.size();
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        SignPattern p = base;
        for (std::size_t i = 0; i < free.size(); ++i) {
            const bool minus = (mask >> (free.size() - 1 - i)) & 1U;
            p[free[i]] = minus ? '-' : '+';
        }
        out.push_back(std::move(p));
    }
    return out;
}

// Does {u : c_k . u + beta_k > 0 for all k} meet the open tol-ball? The
// constraints are tightened by a relative 1e-9 so that regions touching the
// ball only in a lower-dimensional set are rejected, then the distance from
// the origin to the tightened polyhedron is found by enumerating candidate
// active sets: the projection is the least-norm solution of its active
// equalities, and at most d of them are independent.
bool region_meets_ball(const std::vector<Vec>& normals, const std::vector<double>& beta, double tol) {
    const std::size_t k = normals.size();
    const Eigen::Index d = normals.front().size();
    const double shrink = 1e-9 * tol;
    std::vector<double> rhs(k);
    bool origin_feasible = true;
    for (std::size_t i = 0; i < k; ++i) {
        rhs[i] = shrink - beta[i];
        origin_feasible = origin_feasible && rhs[i] <= 0.0;
    }
    if (origin_feasible) return true;

    const double slack = 1e-12 * tol;
    const std::size_t max_active = std::min<std::size_t>(k, static_cast<std::size_t>(d));
    std::vector<std::size_t> active;
    auto feasible_within = [&](const Vec& u) {
        if (u.norm() > tol) return false;
        for (std::size_t i = 0; i < k; ++i)
            if (normals[i].dot(u) < rhs[i] - slack) return false;
        return true;
    };
    auto try_active = [&]() {
        const auto m = static_cast<Eigen::Index>(active.size());
        Mat A(m, d);
        Vec b(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            A.row(r) = normals[active[static_cast<std::size_t>(r)]].transpose();
            b[r] = rhs[active[static_cast<std::size_t>(r)]];
        }
        const Vec u = A.completeOrthogonalDecomposition().solve(b);
        if ((A * u - b).norm() > slack + 1e-15 * b.norm()) return false;
        return feasible_within(u);
    };
    // Subsets in increasing size via an explicit index stack.
    for (std::size_t size = 1; size <= max_active; ++size) {
        active.assign(size, 0);
        for (std::size_t i = 0; i < size; ++i) active[i] = i;
        for (;;) {
            if (try_active()) return true;
            std::size_t pos = size;
            while (pos > 0 && active[pos - 1] == k - size + pos - 1) --pos;
            if (pos == 0) break;
            ++active[pos - 1];
            for (std::size_t j = pos; j < size; ++j) active[j] = active[j - 1] + 1;
        }
    }
    return false;
}

}  // namespace

SignPattern normalize_pattern(std::string_view text, bool allow_zero) {
    static constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";
    SignPattern out;
    for (std::size_t i = 0; i < text.size();) {
        if (text.substr(i, kUnicodeMinus.size()) == kUnicodeMinus) {
            out.push_back('-');
            i += kUnicodeMinus.size();
            continue;
        }
        const char c = text[i];
        if (c == '+' || c == '-' || (allow_zero && c == '0')) {
            out.push_back(c);
        } else {
            throw Error(ErrorCode::InvalidArgument,
                        "invalid sign pattern '" + std::string(text) + "'");
        }
        ++i;
    }
    return out;
}

Guard Guard::affine(Vec normal, double offset) {
    if (normal.size() == 0 || !(normal.norm() > 0.0) || !std::isfinite(offset))
        throw Error(ErrorCode::InvalidArgument, "affine guard needs a nonzero normal");
    Guard g;
    g.kind = GuardKind::Affine;
    g.normal = std::move(normal);
    g.offset = offset;
    return g;
}

Guard Guard::coordinate(Eigen::Index dim, Eigen::Index index, double offset) {
    if (index < 0 || index >= dim) throw Error(ErrorCode::InvalidArgument, "coordinate guard index out of range");
    Vec a = Vec::Zero(dim);
    a[index] = 1.0;
    return affine(std::move(a), -offset);
}

Guard Guard::norm(Vec center, double radius) {
    // A zero radius leaves a single point, which separates nothing.
    if (center.size() == 0 || !(radius > 0.0) || !std::isfinite(radius))
        throw Error(ErrorCode::InvalidArgument, "norm guard needs a positive radius");
    Guard g;
    g.kind = GuardKind::Norm;
    g.center = std::move(center);
    g.radius = radius;
    return g;
}

double Guard::value(const Vec& x) const {
    if (kind == GuardKind::Affine) return normal.dot(x) + offset;
    return (x - center).norm() - radius;
}

Vec Guard::gradient(const Vec& x) const {
    if (kind == GuardKind::Affine) return normal;
    const Vec diff = x - center;
    const double r = diff.norm();
    if (r == 0.0) return Vec::Zero(x.size());
    return diff / r;
}

Piece Piece::constant_value(Vec value) {
    Piece p;
    p.kind = PieceKind::Constant;
    p.constant = std::move(value);
    return p;
}

Piece Piece::affine(Mat linear, Vec constant) {
    Piece p;
    p.kind = PieceKind::Affine;
    p.linear = std::move(linear);
    p.constant = std::move(constant);
    return p;
}

Piece Piece::quadratic_form(Vec constant, Mat linear, std::vector<Mat> quadratic) {
    Piece p;
    p.kind = PieceKind::Quadratic;
    p.constant = std::move(constant);
    p.linear = std::move(linear);
    p.quadratic = std::move(quadratic);
    return p;
}

Vec Piece::value(const Vec& x) const {
    Vec out = constant;
    if (kind == PieceKind::Constant) return out;
    out += linear * x;
    if (kind == PieceKind::Quadratic) {
        for (std::size_t i = 0; i < quadratic.size(); ++i)
            out[static_cast<Eigen::Index>(i)] += x.dot(quadratic[i] * x);
    }
    return out;
}

bool StateBox::contains(const Vec& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

PiecewiseField::PiecewiseField(std::string name, Eigen::Index dimension, std::vector<Guard> guards,
                               std::map<SignPattern, Piece> pieces,
                               std::map<SignPattern, Vec> boundary_values,
                               std::optional<StateBox> box, std::optional<double> lipschitz_bound)
    : name_(std::move(name)),
      dimension_(dimension),
      guards_(std::move(guards)),
      boundary_values_(std::move(boundary_values)),
      box_(std::move(box)),
      lipschitz_bound_(lipschitz_bound) {
    if (dimension_ <= 0) throw Error(ErrorCode::InvalidArgument, "field dimension must be positive");
    if (guards_.size() > 30) throw Error(ErrorCode::InvalidArgument, "too many guards");
    for (const auto& g : guards_) {
        if (g.dimension() != dimension_) throw Error(ErrorCode::InvalidArgument, "guard dimension mismatch");
        if (g.kind == GuardKind::Affine && g.normal.squaredNorm() == 0.0)
            throw Error(ErrorCode::InvalidArgument, "affine guard with zero normal");
        if (g.kind == GuardKind::Norm && !(g.radius > 0.0))
            throw Error(ErrorCode::InvalidArgument, "norm guard radius must be positive");
    }
    for (auto& [key, piece] : pieces) {
        SignPattern p = normalize_pattern(key, false);
        if (p.size() != guards_.size())
            throw Error(ErrorCode::InvalidArgument, "piece pattern '" + key + "' has wrong length");
        if (piece.dimension() != dimension_)
            throw Error(ErrorCode::InvalidArgument, "piece '" + key + "' has wrong dimension");
        if (piece.kind != PieceKind::Constant &&
            (piece.linear.rows() != dimension_ || piece.linear.cols() != dimension_))
            throw Error(ErrorCode::InvalidArgument, "piece '" + key + "' linear term has wrong shape");
        if (piece.kind == PieceKind::Quadratic) {
            if (piece.quadratic.size() != static_cast<std::size_t>(dimension_))
                throw Error(ErrorCode::InvalidArgument, "piece '" + key + "' needs one quadratic form per component");
            for (const auto& q : piece.quadratic)
                if (q.rows() != dimension_ || q.cols() != dimension_)
                    throw Error(ErrorCode::InvalidArgument, "piece '" + key + "' quadratic form has wrong shape");
        }
        if (!pieces_.emplace(std::move(p), std::move(piece)).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate piece pattern '" + key + "'");
    }
    std::map<SignPattern, Vec> normalized;
    for (auto& [key, value] : boundary_values_) {
        SignPattern p = normalize_pattern(key, true);
        if (p.size() != guards_.size())
            throw Error(ErrorCode::InvalidArgument, "boundary pattern '" + key + "' has wrong length");
        if (p.find('0') == SignPattern::npos)
            throw Error(ErrorCode::InvalidArgument, "boundary pattern '" + key + "' must contain a 0");
        if (value.size() != dimension_)
            throw Error(ErrorCode::InvalidArgument, "boundary value '" + key + "' has wrong dimension");
        normalized.emplace(std::move(p), std::move(value));
    }
    boundary_values_ = std::move(normalized);
    if (box_ && (box_->lower.size() != dimension_ || box_->upper.size() != dimension_))
        throw Error(ErrorCode::InvalidArgument, "state box dimension mismatch");
}

void PiecewiseField::check_dimension(const Vec& x) const {
    if (x.size() != dimension_)
        throw Error(ErrorCode::InvalidArgument, "point has dimension " + std::to_string(x.size()) +
                                                    ", field '" + name_ + "' expects " +
                                                    std::to_string(dimension_));
}

double Guard::signed_distance(const Vec& x) const {
    if (kind == GuardKind::Norm) return value(x);
    return value(x) / normal.norm();
}

SignPattern PiecewiseField::pattern_at(const Vec& x) const {
    SignPattern p(guards_.size(), '0');
    for (std::size_t k = 0; k < guards_.size(); ++k) {
        const double g = guards_[k].value(x);
        p[k] = g > 0.0 ? '+' : (g < 0.0 ? '-' : '0');
    }
    return p;
}

const Piece& PiecewiseField::piece(const SignPattern& pattern) const {
    auto it = pieces_.find(pattern);
    if (it == pieces_.end())
        throw Error(ErrorCode::UnassignedPattern,
                    "field '" + name_ + "' has no piece for pattern '" + pattern + "'");
    return it->second;
}

std::vector<SignPattern> PiecewiseField::adjacent_regions(const Vec& x, double tol) const {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius_tol must be positive");
    check_dimension(x);
    SignPattern base(guards_.size(), '0');
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < guards_.size(); ++k) {
        const double g = guards_[k].signed_distance(x);
        if (std::abs(g) <= tol) {
            free.push_back(k);
        } else {
            base[k] = g > 0.0 ? '+' : '-';
        }
    }
    if (free.size() > kMaxFreeGuards)
        throw Error(ErrorCode::DegenerateGeometry, "too many guards vanish at one point");

    std::vector<Vec> unit_normals;
    std::vector<double> scaled_values;
    for (std::size_t k : free) {
        const Vec n = guards_[k].gradient(x);
        const double len = n.norm();
        if (len == 0.0) throw Error(ErrorCode::DegenerateGeometry, "guard gradient vanishes on its zero set");
        unit_normals.push_back(n / len);
        scaled_values.push_back(guards_[k].signed_distance(x));
    }

    std::vector<SignPattern> regions;
    std::vector<Vec> signed_normals(free.size());
    std::vector<double> signed_values(free.size());
    for (auto& p : expand(base, free)) {
        // With one vanishing guard both sides meet the band. With more, the
        // guards are linearised at x and the sign combination is kept iff its
        // polyhedron meets the tol-ball in an open set. When every guard passes
        // through x this is Gordan's test on the signed normals.
        if (free.size() >= 2) {
            for (std::size_t i = 0; i < free.size(); ++i) {
                const double s = p[free[i]] == '+' ? 1.0 : -1.0;
                signed_normals[i] = s * unit_normals[i];
                signed_values[i] = s * scaled_values[i];
            }
            if (!region_meets_ball(signed_normals, signed_values, tol)) continue;
        }
        regions.push_back(std::move(p));
    }
    return regions;
}

Vec PiecewiseField::value_unchecked(const Vec& x) const {
    const SignPattern p = pattern_at(x);
    if (p.find('0') == SignPattern::npos) return piece(p).value(x);
    if (auto it = boundary_values_.find(p); it != boundary_values_.end()) return it->second;
    std::vector<std::size_t> zeros;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] == '0') zeros.push_back(k);
    for (const auto& candidate : expand(p, zeros)) {
        if (auto it = pieces_.find(candidate); it != pieces_.end()) return it->second.value(x);
    }
    throw Error(ErrorCode::UnassignedPattern,
                "field '" + name_ + "' has neither a boundary value nor an adjacent piece for pattern '" + p + "'");
}

Vec evaluate_field(const PiecewiseField& field, const Vec& x) {
    field.check_dimension(x);
    if (field.box() && !field.box()->contains(x))
        throw Error(ErrorCode::OutOfDomain, "point outside the state box of field '" + field.name() + "'");
    return field.value_unchecked(x);
}

ConvexVelocitySet filippov_map(const PiecewiseField& field, const Vec& x, double radius_tol) {
    ConvexVelocitySet set;
    for (const auto& region : field.adjacent_regions(x, radius_tol))
        push_unique(set.vertices, field.piece(region).value(x));
    if (set.empty())
        throw Error(ErrorCode::UnassignedPattern, "no full-dimensional region is adjacent to the query point");
    return set;
}

ConvexVelocitySet krasovskii_map(const PiecewiseField& field, const Vec& x, double radius_tol) {
    ConvexVelocitySet set = filippov_map(field, x, radius_tol);
    const auto& guards = field.guards();
    for (const auto& [pattern, value] : field.boundary_values()) {
        bool compatible = true;
        for (std::size_t k = 0; k < guards.size() && compatible; ++k) {
            const double g = guards[k].signed_distance(x);
            const bool in_band = std::abs(g) <= radius_tol;
            switch (pattern[k]) {
                case '0': compatible = in_band; break;
                case '+': compatible = in_band || g > 0.0; break;
                default: compatible = in_band || g < 0.0; break;
            }
        }
        if (compatible) push_unique(set.vertices, value);
    }
    return set;
}

Vec mollify(const PiecewiseField& field, const Vec& x, double delta, std::size_t samples, Rng& rng) {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "mollifier radius must be positive");
    if (samples == 0) throw Error(ErrorCode::InvalidArgument, "mollify needs at least one sample");
    field.check_dimension(x);
    const Eigen::Index d = x.size();
    Vec sum = Vec::Zero(d);
    for (std::size_t s = 0; s < samples;) {
        Vec dir = rng.normal_vector(d);
        const double len = dir.norm();
        if (len == 0.0) continue;
        const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        if (r >= 1.0) continue;
        // Rejection against exp(-1/(1-r^2)) relative to its peak exp(-1).
        if (rng.uniform() > std::exp(1.0 - 1.0 / (1.0 - r * r))) continue;
        const Vec y = x + (delta * r / len) * dir;
        if (field.pattern_at(y).find('0') != SignPattern::npos) continue;
        sum += field.value_unchecked(y);
        ++s;
    }
    return sum / static_cast<double>(samples);
}

PiecewiseField builtin_field(std::string_view name, Eigen::Index dimension) {
    auto vec = [](std::initializer_list<double> v) {
        Vec out(static_cast<Eigen::Index>(v.size()));
        Eigen::Index i = 0;
        for (double c : v) out[i++] = c;
        return out;
    };
    if (name == "example1") {
        return PiecewiseField("example1", 2, {Guard::coordinate(2, 1)},
                              {{"+", Piece::constant_value(vec({1.0, -1.0}))},
                               {"-", Piece::constant_value(vec({1.0, 1.0}))}},
                              {{"0", vec({-1.0, 0.0})}}, std::nullopt, 0.0);
    }
    if (name == "relay") {
        return PiecewiseField("relay", 1, {Guard::coordinate(1, 0)},
                              {{"+", Piece::constant_value(vec({-1.0}))},
                               {"-", Piece::constant_value(vec({1.0}))}},
                              {{"0", vec({0.0})}}, std::nullopt, 0.0);
    }
    if (name == "spurious_equilibrium") {
        return PiecewiseField("spurious_equilibrium", 1, {Guard::coordinate(1, 0)},
                              {{"+", Piece::constant_value(vec({1.0}))},
                               {"-", Piece::constant_value(vec({1.0}))}},
                              {{"0", vec({0.0})}}, std::nullopt, 0.0);
    }
    if (name == "linear") {
        if (dimension <= 0) throw Error(ErrorCode::InvalidArgument, "linear field needs a positive dimension");
        return PiecewiseField("linear", dimension, {},
                              {{"", Piece::affine(-Mat::Identity(dimension, dimension), Vec::Zero(dimension))}},
                              {}, std::nullopt, 1.0);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown built-in field '" + std::string(name) + "'");
}

std::vector<std::string> builtin_field_names() {
    return {"example1", "relay", "spurious_equilibrium", "linear"};
}

}  // namespace filsa
