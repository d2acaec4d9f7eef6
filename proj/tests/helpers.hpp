#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shapedesc/mesh.hpp"

namespace testutil {

using shapedesc::TriMesh;
using shapedesc::Vec2;

// Unit square split along the main diagonal; all boundary edges design.
inline TriMesh unit_square() {
    TriMesh m;
    m.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.boundary_edges = {{0, 1, 0, true}, {1, 2, 0, true}, {2, 3, 0, true}, {3, 0, 0, true}};
    return m;
}

// Structured right-triangle grid on [0,1]^2 with (n+1)^2 nodes.
inline TriMesh structured_square(int n) {
    TriMesh m;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) m.nodes.push_back({double(i) / n, double(j) / n});
    auto id = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    for (int i = 0; i < n; ++i) m.boundary_edges.push_back({id(i, 0), id(i + 1, 0), 0, true});
    for (int j = 0; j < n; ++j) m.boundary_edges.push_back({id(n, j), id(n, j + 1), 0, true});
    for (int i = n; i > 0; --i) m.boundary_edges.push_back({id(i, n), id(i - 1, n), 0, true});
    for (int j = n; j > 0; --j) m.boundary_edges.push_back({id(0, j), id(0, j - 1), 0, true});
    return m;
}

// Regular N-gon fan around a center node; outer loop counterclockwise.
inline TriMesh regular_ngon(int N, double R = 1.0) {
    TriMesh m;
    m.nodes.push_back({0, 0});
    for (int k = 0; k < N; ++k) {
        double a = 2.0 * std::numbers::pi * k / N;
        m.nodes.push_back({R * std::cos(a), R * std::sin(a)});
    }
    for (int k = 0; k < N; ++k) {
        m.triangles.push_back({0, 1 + k, 1 + (k + 1) % N});
        m.boundary_edges.push_back({1 + k, 1 + (k + 1) % N, 0, true});
    }
    return m;
}

// Synthetic closed curve with prescribed spacings (arc-length geometry only);
// positions are irrelevant for the FD stencil, so nodes sit on a unit circle.
inline shapedesc::BoundaryCurve synthetic_loop(const std::vector<double>& spacing) {
    shapedesc::BoundaryCurve c;
    int n = static_cast<int>(spacing.size());
    for (int j = 0; j < n; ++j) {
        c.node_ids.push_back(j);
        c.normals.push_back({1.0, 0.0});
        c.design.push_back(true);
    }
    c.spacing = spacing;
    return c;
}

inline std::string temp_path(const std::string& name) {
    return std::string("/tmp/shapedesc_test_") + name;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace testutil
