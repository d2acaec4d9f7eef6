#include "shapedesc/checks.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "shapedesc/boundary_ops.hpp"
#include "shapedesc/fem.hpp"
#include "shapedesc/io.hpp"
#include "shapedesc/problem.hpp"
#include "shapedesc/remesh.hpp"
#include "shapedesc/updates.hpp"

namespace shapedesc {

namespace {

/// Structured right-triangle mesh of the unit square, (n+1)^2 nodes.
TriMesh structured_square(int n) {
    TriMesh mesh;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
        }
    }
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return mesh;
}

bool on_square_boundary(Vec2 p) {
    return p.x <= 0.0 || p.x >= 1.0 || p.y <= 0.0 || p.y >= 1.0;
}

double scalar_dirichlet_error(int n, const std::function<double(Vec2)>& g, bool perturb) {
    TriMesh mesh = structured_square(n);
    SparseSystem sys = assemble_scalar_diffusion(mesh, [](Vec2) { return 1.0; });
    if (perturb) sys.add((n + 1) * (n / 2) + n / 2, (n + 1) * (n / 2) + n / 2, 1e-3);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (on_square_boundary(mesh.nodes[i])) sys.set_dirichlet(i, g(mesh.nodes[i]));
    }
    auto x = sys.solve(1e-12);
    double err = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
        err = std::max(err, std::abs(x[i] - g(mesh.nodes[i])));
    }
    return err;
}

/// L2 error of the harmonic Dirichlet solve against the exact field, centroid rule.
double scalar_l2_error(int n, const std::function<double(Vec2)>& g) {
    TriMesh mesh = structured_square(n);
    SparseSystem sys = assemble_scalar_diffusion(mesh, [](Vec2) { return 1.0; });
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (on_square_boundary(mesh.nodes[i])) sys.set_dirichlet(i, g(mesh.nodes[i]));
    }
    auto x = sys.solve(1e-13);
    double acc = 0.0;
    for (int t = 0; t < mesh.tri_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        double uh = (x[tri[0]] + x[tri[1]] + x[tri[2]]) / 3.0;
        double d = uh - g(mesh.tri_centroid(t));
        acc += mesh.tri_area(t) * d * d;
    }
    return std::sqrt(acc);
}

double elasticity_patch_error(int n) {
    TriMesh mesh = structured_square(n);
    SparseSystem sys = assemble_elasticity(mesh, {0.7, 1.3});
    auto g = [](Vec2 p) { return Vec2{0.3 * p.x + 0.1 * p.y, -0.2 * p.x + 0.4 * p.y}; };
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (on_square_boundary(mesh.nodes[i])) {
            Vec2 v = g(mesh.nodes[i]);
            sys.set_dirichlet(2 * i, v.x);
            sys.set_dirichlet(2 * i + 1, v.y);
        }
    }
    auto x = sys.solve(1e-12);
    double err = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
        Vec2 v = g(mesh.nodes[i]);
        err = std::max(err, std::abs(x[2 * i] - v.x));
        err = std::max(err, std::abs(x[2 * i + 1] - v.y));
    }
    return err;
}

double stencil_exactness_error(unsigned seed) {
    std::mt19937 rng(seed + 17);
    std::uniform_real_distribution<double> dist(0.05, 0.3);
    const int n = 24;
    BoundaryCurve curve;
    curve.node_ids.resize(n);
    curve.spacing.resize(n);
    curve.normals.assign(n, Vec2{0, 0});
    curve.design.assign(n, true);
    for (int j = 0; j < n; ++j) {
        curve.node_ids[j] = j;
        curve.spacing[j] = dist(rng);
    }
    std::vector<double> pos(n, 0.0);
    for (int j = 1; j < n; ++j) pos[j] = pos[j - 1] + curve.spacing[j];
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = 0.5 * pos[j] * pos[j];
    auto lap = fd_laplace_beltrami(curve, v);
    double err = 0.0;
    // skip the two wrap positions where the quadratic is not cyclic
    for (int j = 1; j + 1 < n; ++j) err = std::max(err, std::abs(lap[j] - 1.0));
    return err;
}

double derivative_consistency_error(unsigned seed) {
    TriMesh mesh = generate_annulus(1.0, 0.5, 0.1);
    auto loops = boundary_loops(mesh);
    const BoundaryCurve* curve = nullptr;
    for (const auto& c : loops) {
        for (bool d : c.design) {
            if (d) curve = &c;
        }
    }
    IllustrativeProblem prob{0.0, 0.0};
    auto s = sensitivity(mesh, *curve, prob);

    std::mt19937 rng(seed + 4242);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
        double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
        // smooth cutoff so the direction vanishes on the fixed inner circle:
        // the finite difference must only see design-boundary motion
        auto cut = [](Vec2 p) {
            double t = std::clamp((p.norm() - 0.6) / 0.2, 0.0, 1.0);
            return t * t * (3.0 - 2.0 * t);
        };
        auto v = [&](Vec2 p) {
            return cut(p) * Vec2{a + c * p.y + 0.3 * std::sin(p.x), b + d * p.x + 0.3 * std::cos(p.y)};
        };
        NodeVecField theta(mesh.nodes.size());
        for (int i = 0; i < mesh.node_count(); ++i) theta[i] = v(mesh.nodes[i]);
        std::vector<Vec2> tg(curve->size());
        for (int j = 0; j < curve->size(); ++j) {
            tg[j] = curve->design[j] ? theta[curve->node_ids[j]] : Vec2{0, 0};
        }
        double predicted = predicted_decrease(mesh, *curve, s, tg);
        const double delta = 1e-4;
        double jp = objective(displace(mesh, theta, delta), prob);
        double jm = objective(displace(mesh, theta, -delta), prob);
        double fd = (jp - jm) / (2.0 * delta);
        worst = std::max(worst, std::abs(predicted - fd) / std::max(1e-12, std::abs(fd)));
    }
    return worst;
}

}  // namespace

bool run_checks(std::ostream& out, const CheckOptions& options) {
    bool all = true;
    auto report = [&](const std::string& name, bool ok, double value, double bound) {
        all = all && ok;
        out << (ok ? "PASS" : "FAIL") << ' ' << name << " (" << fmt17(value) << " vs bound "
            << fmt17(bound) << ")\n";
    };

    {
        double err = scalar_dirichlet_error(
            8, [](Vec2 p) { return 1.0 + 2.0 * p.x + 3.0 * p.y; }, options.perturb_stiffness);
        report("scalar-diffusion patch test", err <= 1e-10, err, 1e-10);
    }
    {
        double err = elasticity_patch_error(8);
        report("elasticity patch test", err <= 1e-10, err, 1e-10);
    }
    {
        // harmonic but not superconvergent on the structured grid
        auto g = [](Vec2 p) {
            const double pi = 3.14159265358979323846;
            return std::sin(pi * p.x) * std::sinh(pi * p.y);
        };
        double e1 = scalar_l2_error(10, g);
        double e2 = scalar_l2_error(20, g);
        double order = std::log2(e1 / e2);
        report("manufactured-solution L2 order", order >= 1.8, order, 1.8);
    }
    {
        double err = stencil_exactness_error(options.seed);
        report("boundary stencil quadratic exactness", err <= 1e-12, err, 1e-12);
    }
    {
        double err = derivative_consistency_error(options.seed);
        report("shape derivative vs finite difference", err <= 0.05, err, 0.05);
    }
    return all;
}

}  // namespace shapedesc
