#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "shapedesc/mesh.hpp"
#include "shapedesc/remesh.hpp"

using namespace shapedesc;

TEST_SUITE_BEGIN("remesh");

namespace {

const BoundaryCurve& longest(const std::vector<BoundaryCurve>& loops) {
    const BoundaryCurve* best = &loops[0];
    for (const auto& c : loops)
        if (c.arc_length() > best->arc_length()) best = &c;
    return *best;
}

}  // namespace

TEST_CASE("annulus generator: node counts, area, invariants") {
    auto m = generate_annulus(1.0, 0.3, 0.1);
    m.validate();
    CHECK(min_quality(m) >= 20.0);

    auto loops = boundary_loops(m);
    REQUIRE(loops.size() == 2);
    const auto& outer = longest(loops);
    CHECK(outer.size() >= 62);
    CHECK(outer.size() <= 64);

    bool outer_design = true, inner_design = false;
    for (const auto& c : loops) {
        bool all_design = std::all_of(c.design.begin(), c.design.end(), [](bool b) { return b; });
        if (&c == &outer) outer_design = all_design;
        else inner_design = std::any_of(c.design.begin(), c.design.end(), [](bool b) { return b; });
    }
    CHECK(outer_design);
    CHECK(!inner_design);

    // area error decays like h^2
    double exact = std::numbers::pi * 0.91;
    double e1 = std::abs(generate_annulus(1.0, 0.3, 0.1).total_area() - exact);
    double e2 = std::abs(generate_annulus(1.0, 0.3, 0.05).total_area() - exact);
    CHECK(e1 < 0.02);
    CHECK(e2 < 0.6 * e1);
}

TEST_CASE("annulus generator rejects r >= R") {
    CHECK_THROWS_AS(generate_annulus(1.0, 1.1, 0.1), GenerationError);
}

TEST_CASE("diamond generator: corners, perimeter, quality") {
    auto m = generate_diamond_annulus(1.0, 0.5, 0.05);
    m.validate();
    CHECK(min_quality(m) >= 20.0);
    CHECK(all_areas_positive(m));

    auto loops = boundary_loops(m);
    REQUIRE(loops.size() == 2);
    const auto& outer = longest(loops);
    CHECK(std::abs(outer.arc_length() - 4.0 * std::sqrt(2.0)) < 0.05);

    // exactly 4 nodes where the interior turns by 90 degrees
    int corners = 0;
    for (int j = 0; j < outer.size(); ++j) {
        const Vec2& xp = m.nodes[outer.node_ids[outer.prev(j)]];
        const Vec2& xj = m.nodes[outer.node_ids[j]];
        const Vec2& xn = m.nodes[outer.node_ids[outer.next(j)]];
        Vec2 e1 = xj - xp, e2 = xn - xj;
        double turn = std::abs(std::atan2(e1.cross(e2), e1.dot(e2)));
        if (turn > std::numbers::pi / 4.0) {
            ++corners;
            CHECK(turn == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-9));
            // corner vertices sit exactly on the axes at the circumradius
            CHECK(std::abs(xj.norm() - 1.0) < 1e-12);
            CHECK(std::min(std::abs(xj.x), std::abs(xj.y)) < 1e-12);
        }
    }
    CHECK(corners == 4);
}

TEST_CASE("remesh of the pristine annulus preserves area") {
    auto m = generate_annulus(1.0, 0.3, 0.1);
    auto re = remesh(boundary_polylines(m), 0.1);
    re.validate();
    CHECK(std::abs(re.total_area() - m.total_area()) < 0.02);
}

TEST_CASE("remesh keeps corner vertices exactly") {
    auto m = generate_diamond_annulus(1.0, 0.5, 0.1);
    auto re = remesh(boundary_polylines(m), 0.08);
    bool found[4] = {false, false, false, false};
    Vec2 corners[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& x : re.nodes) {
        for (int k = 0; k < 4; ++k) {
            if ((x - corners[k]).norm() < 1e-12) found[k] = true;
        }
    }
    for (int k = 0; k < 4; ++k) CHECK(found[k]);
}

TEST_CASE("remesh rejects a self-intersecting loop") {
    Polyline bow;
    bow.pts = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    bow.loop_id = 0;
    CHECK_THROWS_AS(remesh({bow}, 0.1), RemeshError);
}

TEST_CASE("remesh is idempotent on area and keeps design flags") {
    auto m = generate_annulus(1.0, 0.3, 0.1);
    auto r1 = remesh(boundary_polylines(m), 0.1);
    auto r2 = remesh(boundary_polylines(r1), 0.1);
    CHECK(std::abs(r2.total_area() - r1.total_area()) < 0.01);  // about one triangle

    auto loops = boundary_loops(r2);
    REQUIRE(loops.size() == 2);
    for (const auto& c : loops) {
        double mean_r = 0.0;
        for (int id : c.node_ids) mean_r += r2.nodes[id].norm();
        mean_r /= c.size();
        bool is_outer = mean_r > 0.6;
        for (bool d : c.design) CHECK(d == is_outer);
    }
}

TEST_SUITE_END();
