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


#include "filsa/error.hpp"
#include "filsa/field.hpp"
#include "helpers.hpp"

#include <functional>

using namespace filsa;
using filsa::test::hull;
using filsa::test::same_hull;
using filsa::test::vec;

namespace {

ErrorCode code_of(const std::function<void()>& body) {
    try {
        body();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

// Two guards x and y crossing at the origin, one constant piece per quadrant.
PiecewiseField quadrants() {
    return PiecewiseField("quadrants", 2, {Guard::coordinate(2, 0), Guard::coordinate(2, 1)},
                          {{"++", Piece::constant_value(vec({-1, -1}))},
                           {"+-", Piece::constant_value(vec({-1, 1}))},
                           {"-+", Piece::constant_value(vec({1, -1}))},
                           {"--", Piece::constant_value(vec({1, 1}))}},
                          {{"00", vec({5, 5})}});
}

}  // namespace

TEST_CASE("evaluate_field on the example1 field") {
    const auto f = builtin_field("example1");
    CHECK((evaluate_field(f, vec({0, 0.5})) - vec({1, -1})).norm() == 0.0);
    CHECK((evaluate_field(f, vec({0, 0})) - vec({-1, 0})).norm() == 0.0);
    CHECK((evaluate_field(f, vec({3, -2})) - vec({1, 1})).norm() == 0.0);
}

TEST_CASE("evaluate_field on a constant field") {
    const auto f = filsa::test::constant_field(vec({2, 3}));
    for (const auto& x : {vec({0, 0}), vec({-7, 1e6}), vec({1e-300, 4})})
        CHECK((evaluate_field(f, x) - vec({2, 3})).norm() == 0.0);
}

TEST_CASE("evaluate_field boundary tie-break without boundary values") {
    // '+' sorts before '-', so the '+' side wins on the surface.
    const PiecewiseField f("step", 1, {Guard::coordinate(1, 0)},
                           {{"+", Piece::constant_value(vec({7}))}, {"-", Piece::constant_value(vec({-7}))}});
    CHECK(evaluate_field(f, vec({0}))[0] == 7.0);
    const PiecewiseField g("half", 1, {Guard::coordinate(1, 0)}, {{"-", Piece::constant_value(vec({-7}))}});
    CHECK(evaluate_field(g, vec({0}))[0] == -7.0);
    CHECK(code_of([&] { (void)evaluate_field(g, vec({1})); }) == ErrorCode::UnassignedPattern);
}

TEST_CASE("evaluate_field errors") {
    const auto f = builtin_field("example1");
    CHECK(code_of([&] { (void)evaluate_field(f, vec({0})); }) == ErrorCode::InvalidArgument);
    const PiecewiseField boxed("boxed", 1, {}, {{"", Piece::constant_value(vec({1}))}}, {},
                               StateBox{vec({-1}), vec({1})});
    CHECK(code_of([&] { (void)evaluate_field(boxed, vec({2})); }) == ErrorCode::OutOfDomain);
    CHECK(evaluate_field(boxed, vec({1}))[0] == 1.0);
}

TEST_CASE("field construction validates its tables") {
    CHECK(code_of([] {
              PiecewiseField("bad", 1, {Guard::coordinate(1, 0)}, {{"+-", Piece::constant_value(vec({1}))}});
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] {
              PiecewiseField("bad", 1, {Guard::coordinate(1, 0)}, {{"+", Piece::constant_value(vec({1}))}},
                             {{"+", vec({0})}});
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] {
              PiecewiseField("bad", 2, {Guard::coordinate(2, 0)}, {{"+", Piece::constant_value(vec({1}))}});
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)Guard::norm(vec({0, 0}), 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sign patterns accept the unicode minus") {
    CHECK(normalize_pattern("+−", false) == "+-");
    CHECK(normalize_pattern("+0", true) == "+0");
    CHECK_THROWS_AS((void)normalize_pattern("+0", false), Error);
    CHECK_THROWS_AS((void)normalize_pattern("+x", true), Error);
}

TEST_CASE("filippov_map examples") {
    const auto ex1 = builtin_field("example1");
    CHECK(same_hull(filippov_map(ex1, vec({0, 0}), 1e-9), hull({vec({1, -1}), vec({1, 1})}), 1e-12));
    CHECK(same_hull(filippov_map(ex1, vec({0, 0.5}), 1e-9), hull({vec({1, -1})}), 1e-12));
    const auto relay = builtin_field("relay");
    CHECK(same_hull(filippov_map(relay, vec({0}), 1e-9), hull({vec({-1}), vec({1})}), 1e-12));
    // Cross-check: mollified values at the switching point lie inside [-1, 1].
    Rng rng(3);
    for (double delta : {0.01, 0.1, 1.0}) {
        const double m = mollify(relay, vec({0}), delta, 500, rng)[0];
        CHECK(m >= -1.0);
        CHECK(m <= 1.0);
    }
}

TEST_CASE("krasovskii_map examples") {
    const auto ex1 = builtin_field("example1");
    CHECK(same_hull(krasovskii_map(ex1, vec({0, 0}), 1e-9), hull({vec({1, -1}), vec({1, 1}), vec({-1, 0})}),
                    1e-12));
    CHECK(same_hull(krasovskii_map(ex1, vec({0, 0.5}), 1e-9), hull({vec({1, -1})}), 1e-12));
}

TEST_CASE("krasovskii_map of the spurious equilibrium against a brute-force neighborhood scan") {
    const auto f = builtin_field("spurious_equilibrium");
    filsa::test::Gen gen(11);
    ConvexVelocitySet brute;
    for (int i = 0; i < 200; ++i) {
        double y = gen.uniform(-1e-10, 1e-10);
        if (y == 0.0) continue;
        brute.vertices.push_back(evaluate_field(f, vec({y})));
    }
    brute.vertices.push_back(f.boundary_values().at("0"));
    CHECK(same_hull(krasovskii_map(f, vec({0}), 1e-9), brute, 1e-12));
    CHECK(same_hull(krasovskii_map(f, vec({0}), 1e-9), hull({vec({0}), vec({1})}), 1e-12));
    CHECK(same_hull(filippov_map(f, vec({0}), 1e-9), hull({vec({1})}), 1e-12));
}

TEST_CASE("maps at a corner use all quadrants and admit boundary values only in K") {
    const auto f = quadrants();
    const auto F = filippov_map(f, vec({0, 0}), 1e-9);
    CHECK(F.vertices.size() == 4);
    CHECK(hull_contains(F, vec({0, 0}), 1e-12));
    const auto K = krasovskii_map(f, vec({0, 0}), 1e-9);
    CHECK(hull_contains(K, vec({5, 5}), 1e-12));
    CHECK_FALSE(hull_contains(F, vec({5, 5}), 1e-6));
    // On one axis only two quadrants are adjacent.
    CHECK(same_hull(filippov_map(f, vec({0, 1}), 1e-9), hull({vec({-1, -1}), vec({1, -1})}), 1e-12));
}

TEST_CASE("coincident guards bound only the consistent regions") {
    // x and -x vanish together; "++" and "--" are empty.
    const PiecewiseField f("twin", 1, {Guard::coordinate(1, 0), Guard::affine(vec({-1}), 0.0)},
                           {{"+-", Piece::constant_value(vec({-2}))}, {"-+", Piece::constant_value(vec({3}))}});
    const auto regions = f.adjacent_regions(vec({0}), 1e-9);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0] == "+-");
    CHECK(regions[1] == "-+");
    CHECK(same_hull(filippov_map(f, vec({0}), 1e-9), hull({vec({-2}), vec({3})}), 1e-12));
}

TEST_CASE("norm guards: disc inside and outside") {
    const PiecewiseField f("disc", 2, {Guard::norm(vec({0, 0}), 1.0)},
                           {{"-", Piece::constant_value(vec({1, 0}))}, {"+", Piece::constant_value(vec({0, 1}))}});
    CHECK((evaluate_field(f, vec({0.1, 0.2})) - vec({1, 0})).norm() == 0.0);
    CHECK((evaluate_field(f, vec({3, 0})) - vec({0, 1})).norm() == 0.0);
    CHECK(filippov_map(f, vec({1, 0}), 1e-9).vertices.size() == 2);
    CHECK(filippov_map(f, vec({0.5, 0}), 1e-9).vertices.size() == 1);
}

TEST_CASE("affine and quadratic pieces evaluate their coefficient tables") {
    Mat a(2, 2);
    a << 1, 2, 3, 4;
    const Piece affine = Piece::affine(a, vec({1, -1}));
    CHECK((affine.value(vec({1, 1})) - vec({4, 6})).norm() == 0.0);
    Mat q0 = Mat::Zero(2, 2);
    q0(0, 1) = 1.0;  // x*y
    Mat q1 = Mat::Identity(2, 2);  // x^2 + y^2
    const Piece quad = Piece::quadratic_form(vec({0, 1}), Mat::Zero(2, 2), {q0, q1});
    CHECK((quad.value(vec({2, 3})) - vec({6, 14})).norm() <= 1e-12);
}

TEST_CASE("mollify examples") {
    Rng rng(42);
    const auto c = filsa::test::constant_field(vec({2, 3}));
    CHECK((mollify(c, vec({5, 5}), 0.3, 1000, rng) - vec({2, 3})).norm() < 1e-12);
    const auto ex1 = builtin_field("example1");
    CHECK((mollify(ex1, vec({0, 0.5}), 0.1, 1000, rng) - vec({1, -1})).norm() < 1e-12);
    // At the surface the second component is a +-1 coin: its mean has standard
    // error 1/sqrt(n). Oracle: [1, 0] within three standard errors.
    const std::size_t n = 40000;
    const Vec m = mollify(ex1, vec({0, 0}), 0.1, n, rng);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m[1]) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("mollify rejects bad arguments") {
    Rng rng(1);
    const auto f = builtin_field("relay");
    CHECK(code_of([&] { (void)mollify(f, vec({0}), 0.0, 10, rng); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)mollify(f, vec({0}), 0.1, 0, rng); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("built-in catalog") {
    for (const auto& name : builtin_field_names()) CHECK_NOTHROW((void)builtin_field(name, 2));
    CHECK(builtin_field("linear", 3).dimension() == 3);
    CHECK(code_of([] { (void)builtin_field("nope"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("wide bands keep regions whose guards do not meet at x") {
    // Guards x > 0 and x < 0.1 bound a slab. With tol = 0.1 both are in the
    // band at x = 0.05 without meeting there; the slab itself must stay.
    const PiecewiseField f("slab", 1, {Guard::affine(vec({1}), 0.0), Guard::affine(vec({-1}), 0.1)},
                           {{"++", Piece::constant_value(vec({0}))},
                            {"+-", Piece::constant_value(vec({1}))},
                            {"-+", Piece::constant_value(vec({-1}))},
                            {"--", Piece::constant_value(vec({5}))}});
    CHECK(f.adjacent_regions(vec({0.05}), 0.1) == std::vector<SignPattern>{"++", "+-", "-+"});
    CHECK(f.adjacent_regions(vec({0.05}), 0.01) == std::vector<SignPattern>{"++"});
    // Only the slab and the right half-line meet a small ball around x = 0.1.
    CHECK(f.adjacent_regions(vec({0.1}), 1e-9) == std::vector<SignPattern>{"++", "+-"});
}
