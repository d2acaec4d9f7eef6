#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "shapedesc/mesh.hpp"
#include "shapedesc/optimizer.hpp"
#include "shapedesc/problem.hpp"
#include "shapedesc/remesh.hpp"
#include "shapedesc/updates.hpp"

using namespace shapedesc;

TEST_SUITE_BEGIN("updates");

namespace {

const BoundaryCurve& design_loop(const std::vector<BoundaryCurve>& loops) {
    for (const auto& c : loops)
        for (bool d : c.design)
            if (d) return c;
    FAIL("no design loop");
    return loops[0];
}

std::vector<UpdateMethod> all_methods() {
    std::vector<UpdateMethod> out;
    for (MethodTag tag : {MethodTag::DS, MethodTag::FS, MethodTag::SLB, MethodTag::VLB,
                          MethodTag::SP_SM, MethodTag::SP_WD, MethodTag::PHD}) {
        UpdateMethod m;
        m.tag = tag;
        out.push_back(m);
    }
    return out;
}

std::vector<double> smooth_s(const TriMesh& mesh, const BoundaryCurve& curve) {
    std::vector<double> s(curve.size(), 0.0);
    for (int j = 0; j < curve.size(); ++j) {
        if (!curve.design[j]) continue;
        const Vec2& x = mesh.nodes[curve.node_ids[j]];
        s[j] = 0.5 + 0.3 * x.x - 0.2 * x.y + 0.1 * x.x * x.y;
    }
    return s;
}

}  // namespace

TEST_CASE("method names round trip; unknown names rejected") {
    for (const auto& m : all_methods()) {
        CHECK(parse_method(method_name(m.tag)) == m.tag);
    }
    CHECK_THROWS(parse_method("bogus"));
}

TEST_CASE("parameter validation per tag") {
    UpdateMethod fs;
    fs.tag = MethodTag::FS;
    fs.sigma = 0.0;
    CHECK_THROWS(fs.check());

    UpdateMethod slb;
    slb.tag = MethodTag::SLB;
    slb.conductivity = -0.5;
    CHECK_THROWS(slb.check());

    UpdateMethod sp;
    sp.tag = MethodTag::SP_SM;
    sp.elasticity.mu = 0.0;
    CHECK_THROWS(sp.check());

    UpdateMethod phd;
    phd.tag = MethodTag::PHD;
    phd.picard.p = 1.0;
    CHECK_THROWS(phd.check());
}

TEST_CASE("zero sensitivity yields a zero update for every method") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    std::vector<double> zero(curve.size(), 0.0);
    for (const auto& method : all_methods()) {
        auto r = compute_update(mesh, curve, zero, method);
        for (const auto& v : r.theta.values) CHECK(v.norm() == 0.0);
        CHECK(r.predicted_decrease == 0.0);
    }
}

TEST_CASE("linearity for all linear methods; homogeneity for the p-harmonic one") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    auto s = smooth_s(mesh, curve);
    std::vector<double> s2(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) s2[j] = 2.0 * s[j];

    for (const auto& method : all_methods()) {
        if (method.tag == MethodTag::PHD) continue;
        auto a = compute_update(mesh, curve, s, method);
        auto b = compute_update(mesh, curve, s2, method);
        double scale = 0.0;
        for (const auto& v : a.theta.values) scale = std::max(scale, v.norm());
        for (int i = 0; i < mesh.node_count(); ++i) {
            CHECK((b.theta[i] - 2.0 * a.theta[i]).norm() < 1e-8 * std::max(1.0, scale));
        }
    }

    UpdateMethod phd;
    phd.tag = MethodTag::PHD;
    phd.picard.p = 4.0;
    std::vector<double> s8(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) s8[j] = 8.0 * s[j];
    auto a = compute_update(mesh, curve, s, phd);
    auto b = compute_update(mesh, curve, s8, phd);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
        num += (b.theta[i] - 2.0 * a.theta[i]).norm2();
        den += (2.0 * a.theta[i]).norm2();
    }
    CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("extension: zero data, constant data, maximum principle") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);

    std::vector<Vec2> zero(curve.size(), Vec2{0, 0});
    for (auto kind : {ExtensionKind::Elasticity, ExtensionKind::WallDistanceDiffusion}) {
        auto th = extend_to_domain(mesh, curve, zero, kind);
        for (const auto& v : th.values) CHECK(v.norm() == 0.0);
    }

    // full-design single-loop fixture: constants solve both extension PDEs
    auto disc = testutil::regular_ngon(16);
    auto dl = boundary_loops(disc);
    REQUIRE(dl.size() == 1);
    std::vector<Vec2> konst(dl[0].size(), Vec2{0.3, -0.7});
    for (auto kind : {ExtensionKind::Elasticity, ExtensionKind::WallDistanceDiffusion}) {
        auto th = extend_to_domain(disc, dl[0], konst, kind);
        for (const auto& v : th.values) {
            CHECK(std::abs(v.x - 0.3) < 1e-9);
            CHECK(std::abs(v.y + 0.7) < 1e-9);
        }
    }

    // diffusion extension obeys the discrete maximum principle componentwise
    std::vector<Vec2> data(curve.size());
    double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
    for (int j = 0; j < curve.size(); ++j) {
        const Vec2& x = mesh.nodes[curve.node_ids[j]];
        data[j] = {0.1 * x.x, 0.05 * x.y * x.y};
    }
    auto th = extend_to_domain(mesh, curve, data, ExtensionKind::WallDistanceDiffusion);
    std::vector<bool> bnd(mesh.nodes.size(), false);
    for (const auto& e : mesh.boundary_edges) bnd[e.a] = bnd[e.b] = true;
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (!bnd[i]) continue;
        lox = std::min(lox, th[i].x);
        hix = std::max(hix, th[i].x);
        loy = std::min(loy, th[i].y);
        hiy = std::max(hiy, th[i].y);
    }
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (bnd[i]) continue;
        CHECK(th[i].x >= lox - 1e-9);
        CHECK(th[i].x <= hix + 1e-9);
        CHECK(th[i].y >= loy - 1e-9);
        CHECK(th[i].y <= hiy + 1e-9);
    }
}

TEST_CASE("extension restriction matches the dirichlet data bitwise") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    std::vector<Vec2> data(curve.size());
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto& v : data) v = {U(rng), U(rng)};
    for (auto kind : {ExtensionKind::Elasticity, ExtensionKind::WallDistanceDiffusion}) {
        auto th = extend_to_domain(mesh, curve, data, kind);
        for (int j = 0; j < curve.size(); ++j) {
            CHECK(th[curve.node_ids[j]].x == data[j].x);
            CHECK(th[curve.node_ids[j]].y == data[j].y);
        }
    }
}

TEST_CASE("predicted decrease: hadamard form, tangential blindness") {
    auto mesh = generate_annulus(1.0, 0.3, 0.05);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    IllustrativeProblem p{0.0, 0.0};
    auto s = sensitivity(mesh, curve, p);

    std::vector<Vec2> ds(curve.size()), tang(curve.size());
    for (int j = 0; j < curve.size(); ++j) {
        Vec2 n = node_normal(curve, j);
        ds[j] = -s[j] * n;
        tang[j] = s[j] * Vec2{-n.y, n.x};
    }
    double pd = predicted_decrease(mesh, curve, s, ds);
    // analytic limit: minus the line integral of s^2 over the circle
    double exact = 0.0;
    const int K = 20000;
    for (int k = 0; k < K; ++k) {
        double a = 2.0 * std::numbers::pi * (k + 0.5) / K;
        double v = f_eval({std::cos(a), std::sin(a)}, p);
        exact += v * v * (2.0 * std::numbers::pi / K);
    }
    CHECK(pd < 0.0);
    CHECK(std::abs(pd + exact) / exact < 0.01);

    double pt = predicted_decrease(mesh, curve, s, tang);
    CHECK(std::abs(pt) < 0.01 * exact);
}

TEST_CASE("predicted decrease is negative for every method on random loads") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (const auto& method : all_methods()) {
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<double> s(curve.size(), 0.0);
            for (int j = 0; j < curve.size(); ++j)
                if (curve.design[j]) s[j] = U(rng);
            auto r = compute_update(mesh, curve, s, method);
            CHECK(r.predicted_decrease < 0.0);
        }
    }
}

TEST_CASE("theta vanishes on the fixed loop for every method") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    auto s = smooth_s(mesh, curve);
    std::vector<bool> fixed(mesh.nodes.size(), false);
    for (const auto& c : loops) {
        for (int j = 0; j < c.size(); ++j)
            if (!c.design[j]) fixed[c.node_ids[j]] = true;
    }
    for (const auto& method : all_methods()) {
        auto r = compute_update(mesh, curve, s, method);
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (fixed[i]) CHECK(r.theta[i].norm() == 0.0);
        }
        // theta_gamma is the boundary restriction
        REQUIRE(r.theta_gamma.size() == static_cast<std::size_t>(curve.size()));
        for (int j = 0; j < curve.size(); ++j) {
            CHECK(r.theta_gamma[j].x == r.theta[curve.node_ids[j]].x);
            CHECK(r.theta_gamma[j].y == r.theta[curve.node_ids[j]].y);
        }
    }
}

TEST_CASE("rotational equivariance of every method") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    auto s = smooth_s(mesh, curve);

    const double a = std::numbers::pi / 5.0;
    auto rot = [&](Vec2 v) {
        return Vec2{std::cos(a) * v.x - std::sin(a) * v.y, std::sin(a) * v.x + std::cos(a) * v.y};
    };
    TriMesh rmesh = mesh;
    for (auto& x : rmesh.nodes) x = rot(x);
    auto rloops = boundary_loops(rmesh);
    const auto& rcurve = design_loop(rloops);
    REQUIRE(rcurve.node_ids == curve.node_ids);

    for (const auto& method : all_methods()) {
        auto base = compute_update(mesh, curve, s, method);
        auto turned = compute_update(rmesh, rcurve, s, method);
        double scale = 0.0;
        for (const auto& v : base.theta.values) scale = std::max(scale, v.norm());
        for (int i = 0; i < mesh.node_count(); ++i) {
            CHECK((turned.theta[i] - rot(base.theta[i])).norm() < 1e-8 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("extended update keeps the displaced mesh valid") {
    auto mesh = generate_annulus(1.0, 0.3, 0.1);
    auto loops = boundary_loops(mesh);
    const auto& curve = design_loop(loops);
    IllustrativeProblem p{0.0, 0.0};
    auto s = sensitivity(mesh, curve, p);
    UpdateMethod m;
    m.tag = MethodTag::DS;
    m.extension = ExtensionKind::Elasticity;
    auto r = compute_update(mesh, curve, s, m);
    double alpha = max_displacement_step(r.theta, 0.02);
    auto moved = displace(mesh, r.theta, alpha);
    CHECK(all_areas_positive(moved));
}

TEST_CASE("domain diameter is the max pairwise distance") {
    auto mesh = generate_annulus(1.0, 0.3, 0.2);
    CHECK(domain_diameter(mesh) == doctest::Approx(2.0).epsilon(5e-3));
    CHECK(domain_diameter(mesh) <= 2.0 + 1e-12);  // inscribed polygon

    // rotation invariance (up to roundoff in the rotated coordinates)
    TriMesh r = mesh;
    double a = 0.7;
    for (auto& x : r.nodes) {
        x = Vec2{std::cos(a) * x.x - std::sin(a) * x.y, std::sin(a) * x.x + std::cos(a) * x.y};
    }
    CHECK(std::abs(domain_diameter(r) - domain_diameter(mesh)) < 1e-12);
}

TEST_SUITE_END();
