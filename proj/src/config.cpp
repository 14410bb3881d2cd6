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

#include "filsa/config.hpp"

#include "filsa/csv.hpp"
#include "filsa/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace filsa {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw Error(ErrorCode::ConfigInvalid, path + ": " + message);
}

std::string child(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string child(const std::string& path, std::size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) fail(child(path, item.key()), "unknown key");
}

const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(child(path, key), "missing");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) fail(path, "must be positive");
    return v;
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vec vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], child(path, i));
    return v;
}

Vec vector_of(const json& j, const std::string& path, Eigen::Index d) {
    Vec v = vector(j, path);
    if (v.size() != d) fail(path, "expected " + std::to_string(d) + " entries, got " + std::to_string(v.size()));
    return v;
}

Mat matrix(const json& j, const std::string& path, Eigen::Index d) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(d)) fail(path, "expected " + std::to_string(d) + " rows");
    Mat m(d, d);
    for (std::size_t r = 0; r < j.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = vector_of(j[r], child(path, r), d).transpose();
    return m;
}

Guard parse_guard(const json& j, const std::string& path, Eigen::Index d) {
    const std::string kind = text(require(j, path, "kind"), child(path, "kind"));
    if (kind == "affine") {
        allow_keys(j, path, {"kind", "a", "b"});
        const Vec a = vector_of(require(j, path, "a"), child(path, "a"), d);
        if (a.squaredNorm() == 0.0) fail(child(path, "a"), "normal must be non-zero");
        const double b = j.contains("b") ? number(j.at("b"), child(path, "b")) : 0.0;
        return Guard::affine(a, b);
    }
    if (kind == "coordinate") {
        allow_keys(j, path, {"kind", "index", "offset"});
        const std::size_t index = count(require(j, path, "index"), child(path, "index"));
        if (index >= static_cast<std::size_t>(d)) fail(child(path, "index"), "out of range");
        const double offset = j.contains("offset") ? number(j.at("offset"), child(path, "offset")) : 0.0;
        return Guard::coordinate(d, static_cast<Eigen::Index>(index), offset);
    }
    if (kind == "norm") {
        allow_keys(j, path, {"kind", "center", "radius"});
        const Vec c = vector_of(require(j, path, "center"), child(path, "center"), d);
        return Guard::norm(c, positive(require(j, path, "radius"), child(path, "radius")));
    }
    fail(child(path, "kind"), "unknown guard kind '" + kind + "'");
}

Piece parse_piece(const json& j, const std::string& path, Eigen::Index d) {
    if (j.is_array()) return Piece::constant_value(vector_of(j, path, d));
    const std::string kind = text(require(j, path, "kind"), child(path, "kind"));
    if (kind == "constant") {
        allow_keys(j, path, {"kind", "value"});
        return Piece::constant_value(vector_of(require(j, path, "value"), child(path, "value"), d));
    }
    if (kind == "affine") {
        allow_keys(j, path, {"kind", "matrix", "offset"});
        const Mat a = matrix(require(j, path, "matrix"), child(path, "matrix"), d);
        const Vec b = j.contains("offset") ? vector_of(j.at("offset"), child(path, "offset"), d) : Vec(Vec::Zero(d));
        return Piece::affine(a, b);
    }
    if (kind == "quadratic") {
        allow_keys(j, path, {"kind", "constant", "linear", "quadratic"});
        const Vec c = j.contains("constant") ? vector_of(j.at("constant"), child(path, "constant"), d) : Vec(Vec::Zero(d));
        const Mat b = j.contains("linear") ? matrix(j.at("linear"), child(path, "linear"), d) : Mat(Mat::Zero(d, d));
        const json& q = require(j, path, "quadratic");
        const std::string qpath = child(path, "quadratic");
        if (!q.is_array() || q.size() != static_cast<std::size_t>(d)) fail(qpath, "expected one matrix per component");
        std::vector<Mat> forms;
        for (std::size_t i = 0; i < q.size(); ++i) forms.push_back(matrix(q[i], child(qpath, i), d));
        return Piece::quadratic_form(c, b, std::move(forms));
    }
    fail(child(path, "kind"), "unknown piece kind '" + kind + "'");
}

std::vector<std::uint64_t> parse_seeds(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of seeds");
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_unsigned() && !(j[i].is_number_integer() && j[i].get<long long>() >= 0))
            fail(child(path, i), "expected a non-negative integer");
        seeds.push_back(j[i].get<std::uint64_t>());
    }
    return seeds;
}

}  // namespace

PiecewiseField parse_field(const json& node, Eigen::Index default_dimension) {
    const std::string path = "field";
    try {
        if (node.is_string()) return builtin_field(node.get<std::string>(), default_dimension);
        if (!node.is_object()) fail(path, "expected a built-in name or an object");
        if (node.contains("builtin")) {
            allow_keys(node, path, {"builtin", "dimension"});
            const Eigen::Index d = node.contains("dimension")
                                       ? static_cast<Eigen::Index>(count(node.at("dimension"), child(path, "dimension")))
                                       : default_dimension;
            return builtin_field(text(node.at("builtin"), child(path, "builtin")), d);
        }
        allow_keys(node, path, {"name", "dimension", "guards", "pieces", "boundary_values", "box", "lipschitz_bound"});
        const std::size_t d_raw = count(require(node, path, "dimension"), child(path, "dimension"));
        if (d_raw == 0) fail(child(path, "dimension"), "must be positive");
        const auto d = static_cast<Eigen::Index>(d_raw);

        std::vector<Guard> guards;
        if (node.contains("guards")) {
            const json& gs = node.at("guards");
            if (!gs.is_array()) fail(child(path, "guards"), "expected an array");
            for (std::size_t i = 0; i < gs.size(); ++i)
                guards.push_back(parse_guard(gs[i], child(child(path, "guards"), i), d));
        }
        std::map<SignPattern, Piece> pieces;
        const json& ps = require(node, path, "pieces");
        if (!ps.is_object() || ps.empty()) fail(child(path, "pieces"), "expected a non-empty object");
        for (const auto& item : ps.items()) {
            const std::string ppath = child(child(path, "pieces"), item.key());
            SignPattern pattern;
            try {
                pattern = normalize_pattern(item.key(), false);
            } catch (const Error& e) {
                fail(ppath, e.what());
            }
            pieces.emplace(pattern, parse_piece(item.value(), ppath, d));
        }
        std::map<SignPattern, Vec> boundary;
        if (node.contains("boundary_values")) {
            const json& bs = node.at("boundary_values");
            if (!bs.is_object()) fail(child(path, "boundary_values"), "expected an object");
            for (const auto& item : bs.items()) {
                const std::string bpath = child(child(path, "boundary_values"), item.key());
                SignPattern pattern;
                try {
                    pattern = normalize_pattern(item.key(), true);
                } catch (const Error& e) {
                    fail(bpath, e.what());
                }
                boundary.emplace(pattern, vector_of(item.value(), bpath, d));
            }
        }
        std::optional<StateBox> box;
        if (node.contains("box")) {
            const json& b = node.at("box");
            const std::string bpath = child(path, "box");
            allow_keys(b, bpath, {"lower", "upper"});
            box = StateBox{vector_of(require(b, bpath, "lower"), child(bpath, "lower"), d),
                           vector_of(require(b, bpath, "upper"), child(bpath, "upper"), d)};
        }
        std::optional<double> lipschitz;
        if (node.contains("lipschitz_bound"))
            lipschitz = number(node.at("lipschitz_bound"), child(path, "lipschitz_bound"));
        const std::string name = node.contains("name") ? text(node.at("name"), child(path, "name")) : "inline";
        return PiecewiseField(name, d, std::move(guards), std::move(pieces), std::move(boundary), box, lipschitz);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigInvalid) throw;
        fail(path, e.what());
    }
}

ExperimentConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("<root>", std::string("malformed JSON: ") + e.what());
    }
    allow_keys(doc, "", {"field", "x0", "schedule", "noise", "n_steps", "seeds", "tracking", "measures", "integrate",
                         "query_points", "radius_tol", "output_dir", "blowup_bound"});

    ExperimentConfig cfg;
    cfg.source = doc;
    cfg.content_hash = sha256_hex(json_text);

    cfg.x0 = vector(require(doc, "", "x0"), "x0");
    cfg.field = parse_field(require(doc, "", "field"), cfg.x0.size());
    if (cfg.field.dimension() != cfg.x0.size())
        fail("x0", "has " + std::to_string(cfg.x0.size()) + " entries but the field has dimension " +
                       std::to_string(cfg.field.dimension()));

    if (doc.contains("schedule")) {
        const json& s = doc.at("schedule");
        allow_keys(s, "schedule", {"kind", "a0", "a", "gamma", "values"});
        const std::string kind = text(require(s, "schedule", "kind"), "schedule.kind");
        if (kind == "power") {
            cfg.schedule = StepsizeSchedule::power(positive(require(s, "schedule", "a0"), "schedule.a0"),
                                                   number(require(s, "schedule", "gamma"), "schedule.gamma"));
        } else if (kind == "constant") {
            const char* key = s.contains("a") ? "a" : "a0";
            cfg.schedule = StepsizeSchedule::constant(positive(require(s, "schedule", key), std::string("schedule.") + key));
        } else if (kind == "custom") {
            const json& vs = require(s, "schedule", "values");
            if (!vs.is_array() || vs.empty()) fail("schedule.values", "expected a non-empty array");
            std::vector<double> values;
            for (std::size_t i = 0; i < vs.size(); ++i) {
                const double v = number(vs[i], child("schedule.values", i));
                if (v < 0.0) fail(child("schedule.values", i), "must be non-negative");
                values.push_back(v);
            }
            cfg.schedule = StepsizeSchedule::custom(std::move(values));
        } else {
            fail("schedule.kind", "unknown schedule kind '" + kind + "'");
        }
    }

    if (doc.contains("noise")) {
        const json& n = doc.at("noise");
        allow_keys(n, "noise", {"kind", "scale"});
        const std::string kind = text(require(n, "noise", "kind"), "noise.kind");
        if (kind == "gaussian") cfg.noise.kind = NoiseKind::Gaussian;
        else if (kind == "uniform-ball" || kind == "uniform_ball") cfg.noise.kind = NoiseKind::UniformBall;
        else if (kind == "rademacher") cfg.noise.kind = NoiseKind::Rademacher;
        else if (kind == "zero") cfg.noise.kind = NoiseKind::Zero;
        else fail("noise.kind", "unknown noise kind '" + kind + "'");
        cfg.noise.scale = n.contains("scale") ? number(n.at("scale"), "noise.scale") : 0.0;
        if (cfg.noise.scale < 0.0) fail("noise.scale", "must be non-negative");
    }

    if (doc.contains("n_steps")) cfg.n_steps = count(doc.at("n_steps"), "n_steps");
    if (cfg.n_steps == 0) fail("n_steps", "must be at least 1");
    if (cfg.schedule.kind == StepsizeKind::Custom && cfg.schedule.values.size() < cfg.n_steps)
        fail("schedule.values", "needs at least n_steps entries");
    if (doc.contains("seeds")) cfg.seeds = parse_seeds(doc.at("seeds"), "seeds");

    if (doc.contains("tracking")) {
        const json& t = doc.at("tracking");
        allow_keys(t, "tracking", {"T", "n_windows", "dt"});
        if (t.contains("T")) cfg.tracking.T = positive(t.at("T"), "tracking.T");
        if (t.contains("n_windows")) cfg.tracking.n_windows = count(t.at("n_windows"), "tracking.n_windows");
        if (t.contains("dt")) cfg.tracking.dt = positive(t.at("dt"), "tracking.dt");
        if (cfg.tracking.n_windows == 0) fail("tracking.n_windows", "must be at least 1");
    }

    if (doc.contains("measures")) {
        const json& m = doc.at("measures");
        allow_keys(m, "measures", {"checkpoints", "checkpoint_times", "eps"});
        if (m.contains("checkpoints")) {
            const json& cs = m.at("checkpoints");
            if (!cs.is_array()) fail("measures.checkpoints", "expected an array");
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const std::size_t c = count(cs[i], child("measures.checkpoints", i));
                if (c == 0 || c > cfg.n_steps) fail(child("measures.checkpoints", i), "must lie in [1, n_steps]");
                if (!cfg.measures.checkpoints.empty() && c <= cfg.measures.checkpoints.back())
                    fail(child("measures.checkpoints", i), "checkpoints must be increasing");
                cfg.measures.checkpoints.push_back(c);
            }
        }
        if (m.contains("checkpoint_times")) {
            const json& ts = m.at("checkpoint_times");
            if (!ts.is_array()) fail("measures.checkpoint_times", "expected an array");
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double t = positive(ts[i], child("measures.checkpoint_times", i));
                if (!cfg.measures.checkpoint_times.empty() && t <= cfg.measures.checkpoint_times.back())
                    fail(child("measures.checkpoint_times", i), "checkpoint times must be increasing");
                cfg.measures.checkpoint_times.push_back(t);
            }
        }
        if (m.contains("eps")) {
            const json& es = m.at("eps");
            if (!es.is_array() || es.empty()) fail("measures.eps", "expected a non-empty array");
            cfg.measures.eps.clear();
            for (std::size_t i = 0; i < es.size(); ++i) cfg.measures.eps.push_back(positive(es[i], child("measures.eps", i)));
        }
    }

    if (doc.contains("integrate")) {
        const json& g = doc.at("integrate");
        allow_keys(g, "integrate", {"t_end", "dt", "x0"});
        if (g.contains("t_end")) cfg.integrate.t_end = positive(g.at("t_end"), "integrate.t_end");
        if (g.contains("dt")) cfg.integrate.dt = positive(g.at("dt"), "integrate.dt");
        if (g.contains("x0")) cfg.integrate.x0 = vector_of(g.at("x0"), "integrate.x0", cfg.field.dimension());
    }

    if (doc.contains("query_points")) {
        const json& qs = doc.at("query_points");
        if (!qs.is_array()) fail("query_points", "expected an array of points");
        for (std::size_t i = 0; i < qs.size(); ++i)
            cfg.query_points.push_back(vector_of(qs[i], child("query_points", i), cfg.field.dimension()));
    }
    if (doc.contains("radius_tol")) cfg.radius_tol = positive(doc.at("radius_tol"), "radius_tol");
    if (doc.contains("output_dir")) cfg.output_dir = text(doc.at("output_dir"), "output_dir");
    if (doc.contains("blowup_bound")) cfg.blowup_bound = positive(doc.at("blowup_bound"), "blowup_bound");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path));
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoFailure, "SHA-256 computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

}  // namespace filsa
