#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapedesc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2 operator/(double a) const { return {x / a, y / a}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Boundary edge of a triangulation, oriented so the domain lies to its left.
struct BoundaryEdge {
    int a = -1;
    int b = -1;
    int loop = -1;
    bool design = true;
};

/// Planar triangulation with tagged boundary loops.
struct TriMesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int tri_count() const { return static_cast<int>(triangles.size()); }

    double tri_area(int t) const {
        const auto& tri = triangles[t];
        return 0.5 * (nodes[tri[1]] - nodes[tri[0]]).cross(nodes[tri[2]] - nodes[tri[0]]);
    }
    Vec2 tri_centroid(int t) const {
        const auto& tri = triangles[t];
        return (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) / 3.0;
    }
    double total_area() const;

    /// Throws StructuralError on any invariant violation.
    void validate() const;
};

/// Ordered closed node loop with spacings, averaged outward normals and design mask.
struct BoundaryCurve {
    std::vector<int> node_ids;       // loop order, domain to the left
    std::vector<double> spacing;     // h_j = |x_j - x_{j-1}| (cyclic)
    std::vector<Vec2> normals;       // averaged edge normals, not renormalized
    std::vector<bool> design;        // node belongs to the design boundary
    int loop_id = -1;

    int size() const { return static_cast<int>(node_ids.size()); }
    int prev(int j) const { return (j + size() - 1) % size(); }
    int next(int j) const { return (j + 1) % size(); }
    double arc_length() const;
};

template <class T>
struct Field {
    std::vector<T> values;
    std::string unit;

    Field() = default;
    explicit Field(std::size_t n, T init = T{}, std::string u = "")
        : values(n, init), unit(std::move(u)) {}

    T& operator[](std::size_t i) { return values[i]; }
    const T& operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

using NodeField = Field<double>;
using NodeVecField = Field<Vec2>;
using CellField = Field<double>;
using CellVecField = Field<Vec2>;

/// Extracts all boundary loops; spacings and averaged normals populated.
std::vector<BoundaryCurve> boundary_loops(const TriMesh& mesh);

/// Average of the unit outward normals of the two edges adjacent to loop position j.
Vec2 node_normal(const BoundaryCurve& curve, int j);

/// One-point centroid quadrature of f over the mesh.
double integrate_domain(const TriMesh& mesh, const std::function<double(Vec2)>& f);

/// Minimum interior angle over all triangles, in degrees.
double min_quality(const TriMesh& mesh);

/// Interior angles of a single triangle in degrees.
std::array<double, 3> tri_angles(const TriMesh& mesh, int t);

/// Perturbation of identity: nodes move to x + alpha * theta(x). Topology kept.
TriMesh displace(const TriMesh& mesh, const NodeVecField& theta, double alpha);

/// True if every triangle still has positive signed area.
bool all_areas_positive(const TriMesh& mesh);

/// True if no two boundary edges properly cross (edges sharing a node are
/// skipped); guards against local boundary folds after a displacement.
bool boundary_simple(const TriMesh& mesh);

/// Inverse-distance (Shepard) interpolation from triangle centers to nodes.
/// The unnormalized variant evaluates the raw averaged-weight formula; the
/// normalized variant divides by the weight sum so constants are reproduced.
NodeField shepard_to_nodes(const TriMesh& mesh, const CellField& cf, bool normalized = true);
NodeVecField shepard_to_nodes(const TriMesh& mesh, const CellVecField& cf, bool normalized = true);

/// Node -> adjacent triangle indices.
std::vector<std::vector<int>> node_to_triangles(const TriMesh& mesh);

}  // namespace shapedesc
