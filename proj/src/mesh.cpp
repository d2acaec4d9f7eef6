#include "shapedesc/mesh.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <numbers>
#include <set>

namespace shapedesc {

double TriMesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < tri_count(); ++t) a += tri_area(t);
    return a;
}

void TriMesh::validate() const {
    const int n = node_count();
    for (const auto& tri : triangles) {
        for (int v : tri) {
            if (v < 0 || v >= n) throw StructuralError("triangle node index out of range");
        }
    }
    for (int t = 0; t < tri_count(); ++t) {
        if (!(tri_area(t) > 0.0)) throw StructuralError("non-positive triangle area");
    }

    // Edge incidence: interior edges in exactly two triangles, boundary in one.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::set<std::pair<int, int>> listed;
    for (const auto& be : boundary_edges) {
        auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
        auto it = edge_count.find(key);
        if (it == edge_count.end()) throw StructuralError("boundary edge not part of any triangle");
        if (it->second != 1) throw StructuralError("boundary edge shared by more than one triangle");
        if (!listed.insert(key).second) throw StructuralError("duplicate boundary edge");
    }
    for (const auto& [key, cnt] : edge_count) {
        if (cnt > 2) throw StructuralError("edge shared by more than two triangles");
        if (cnt == 1 && !listed.count(key)) throw StructuralError("incidence boundary edge missing from boundary list");
    }

    // Each boundary node must have exactly one outgoing and one incoming edge,
    // so the boundary partitions into closed loops.
    std::map<int, int> out_deg, in_deg;
    for (const auto& be : boundary_edges) {
        out_deg[be.a]++;
        in_deg[be.b]++;
    }
    for (const auto& [nid, d] : out_deg) {
        if (d != 1 || in_deg[nid] != 1) throw StructuralError("non-manifold boundary node");
    }
}

double BoundaryCurve::arc_length() const {
    double s = 0.0;
    for (double h : spacing) s += h;
    return s;
}

std::vector<BoundaryCurve> boundary_loops(const TriMesh& mesh) {
    // Collect directed boundary edges (domain to the left) from triangle
    // incidence and merge the tags stored on the mesh.
    std::map<std::pair<int, int>, int> edge_tri_count;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            edge_tri_count[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::map<std::pair<int, int>, BoundaryEdge> tagged;
    for (const auto& be : mesh.boundary_edges) {
        tagged[{std::min(be.a, be.b), std::max(be.a, be.b)}] = be;
    }

    std::map<int, std::pair<int, const BoundaryEdge*>> succ;  // node -> (next node, tag)
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            int cnt = edge_tri_count.at(key);
            if (cnt == 1) {
                auto it = tagged.find(key);
                const BoundaryEdge* tag = (it != tagged.end()) ? &it->second : nullptr;
                if (succ.count(a)) throw StructuralError("non-manifold boundary edge");
                succ[a] = {b, tag};
            } else if (cnt > 2) {
                throw StructuralError("edge shared by more than two triangles");
            }
        }
    }

    std::vector<BoundaryCurve> loops;
    std::set<int> visited;
    int loop_counter = 0;
    for (const auto& [start, first] : succ) {
        if (visited.count(start)) continue;
        BoundaryCurve curve;
        curve.loop_id = loop_counter++;
        int cur = start;
        std::vector<bool> edge_design;  // design flag of edge cur->next
        int declared_loop = -1;
        while (true) {
            visited.insert(cur);
            curve.node_ids.push_back(cur);
            auto it = succ.find(cur);
            if (it == succ.end()) throw StructuralError("open boundary chain");
            edge_design.push_back(it->second.second ? it->second.second->design : true);
            if (it->second.second && declared_loop < 0) declared_loop = it->second.second->loop;
            cur = it->second.first;
            if (cur == start) break;
            if (curve.size() > mesh.node_count()) throw StructuralError("boundary chain does not close");
        }
        if (declared_loop >= 0) curve.loop_id = declared_loop;

        const int n = curve.size();
        curve.spacing.resize(n);
        curve.design.resize(n);
        for (int j = 0; j < n; ++j) {
            const Vec2& xj = mesh.nodes[curve.node_ids[j]];
            const Vec2& xp = mesh.nodes[curve.node_ids[curve.prev(j)]];
            curve.spacing[j] = (xj - xp).norm();
            if (!(curve.spacing[j] > 0.0)) throw StructuralError("zero boundary spacing");
            // A node is design only if both adjacent edges are design; junction
            // nodes thereby fall into the Dirichlet set of the boundary solvers.
            curve.design[j] = edge_design[j] && edge_design[curve.prev(j)];
        }
        curve.normals.resize(n);
        for (int j = 0; j < n; ++j) {
            // Edge direction a->b with domain on the left has outward normal
            // (dy, -dx)/len.
            const Vec2& xp = mesh.nodes[curve.node_ids[curve.prev(j)]];
            const Vec2& xj = mesh.nodes[curve.node_ids[j]];
            const Vec2& xn = mesh.nodes[curve.node_ids[curve.next(j)]];
            Vec2 e1 = xj - xp, e2 = xn - xj;
            Vec2 n1 = Vec2{e1.y, -e1.x} / e1.norm();
            Vec2 n2 = Vec2{e2.y, -e2.x} / e2.norm();
            curve.normals[j] = 0.5 * (n1 + n2);
        }
        loops.push_back(std::move(curve));
    }
    return loops;
}

Vec2 node_normal(const BoundaryCurve& curve, int j) { return curve.normals[j]; }

double integrate_domain(const TriMesh& mesh, const std::function<double(Vec2)>& f) {
    double sum = 0.0;
    for (int t = 0; t < mesh.tri_count(); ++t) {
        double v = f(mesh.tri_centroid(t));
        if (!std::isfinite(v)) throw EvaluationError("non-finite integrand at triangle center");
        sum += v * mesh.tri_area(t);
    }
    return sum;
}

std::array<double, 3> tri_angles(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    std::array<double, 3> ang{};
    for (int k = 0; k < 3; ++k) {
        Vec2 u = mesh.nodes[tri[(k + 1) % 3]] - mesh.nodes[tri[k]];
        Vec2 v = mesh.nodes[tri[(k + 2) % 3]] - mesh.nodes[tri[k]];
        double c = u.dot(v) / (u.norm() * v.norm());
        c = std::clamp(c, -1.0, 1.0);
        ang[k] = std::acos(c) * 180.0 / std::numbers::pi;
    }
    return ang;
}

double min_quality(const TriMesh& mesh) {
    double q = 180.0;
    for (int t = 0; t < mesh.tri_count(); ++t) {
        auto ang = tri_angles(mesh, t);
        q = std::min(q, *std::min_element(ang.begin(), ang.end()));
    }
    return q;
}

TriMesh displace(const TriMesh& mesh, const NodeVecField& theta, double alpha) {
    TriMesh out = mesh;
    for (int i = 0; i < mesh.node_count(); ++i) {
        out.nodes[i] = mesh.nodes[i] + alpha * theta[i];
    }
    return out;
}

bool all_areas_positive(const TriMesh& mesh) {
    for (int t = 0; t < mesh.tri_count(); ++t) {
        if (!(mesh.tri_area(t) > 0.0)) return false;
    }
    return true;
}

bool boundary_simple(const TriMesh& mesh) {
    const auto& edges = mesh.boundary_edges;
    const int m = static_cast<int>(edges.size());
    auto proper_cross = [&](const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
        double d1 = (b - a).cross(c - a);
        double d2 = (b - a).cross(d - a);
        double d3 = (d - c).cross(a - c);
        double d4 = (d - c).cross(b - c);
        return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
    };
    for (int i = 0; i < m; ++i) {
        const Vec2& a = mesh.nodes[edges[i].a];
        const Vec2& b = mesh.nodes[edges[i].b];
        double lox = std::min(a.x, b.x), hix = std::max(a.x, b.x);
        double loy = std::min(a.y, b.y), hiy = std::max(a.y, b.y);
        for (int j = i + 1; j < m; ++j) {
            if (edges[i].a == edges[j].a || edges[i].a == edges[j].b ||
                edges[i].b == edges[j].a || edges[i].b == edges[j].b) {
                continue;
            }
            const Vec2& c = mesh.nodes[edges[j].a];
            const Vec2& d = mesh.nodes[edges[j].b];
            if (std::max(c.x, d.x) < lox || std::min(c.x, d.x) > hix ||
                std::max(c.y, d.y) < loy || std::min(c.y, d.y) > hiy) {
                continue;
            }
            if (proper_cross(a, b, c, d)) return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> node_to_triangles(const TriMesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.node_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        for (int v : mesh.triangles[t]) adj[v].push_back(t);
    }
    return adj;
}

namespace {

template <class T>
Field<T> shepard_impl(const TriMesh& mesh, const Field<T>& cf, bool normalized) {
    if (cf.size() != static_cast<std::size_t>(mesh.tri_count())) {
        throw EvaluationError("cell field size does not match triangle count");
    }
    auto adj = node_to_triangles(mesh);
    Field<T> out(mesh.nodes.size());
    int degenerate = 0;
    for (int n = 0; n < mesh.node_count(); ++n) {
        const auto& cells = adj[n];
        if (cells.empty()) throw StructuralError("node without adjacent triangle");
        double dist_sum = 0.0;
        for (int c : cells) dist_sum += (mesh.nodes[n] - mesh.tri_centroid(c)).norm();
        T acc{};
        double wsum = 0.0;
        for (int c : cells) {
            double w = 1.0 - (mesh.nodes[n] - mesh.tri_centroid(c)).norm() / dist_sum;
            acc += w * cf[c];
            wsum += w;
        }
        if (normalized) {
            if (wsum > 0.0) {
                out[n] = acc / wsum;
            } else {
                out[n] = cf[cells.front()];  // single-cell node, nearest value
            }
        } else {
            out[n] = acc / static_cast<double>(cells.size());
            if (cells.size() == 1) ++degenerate;
        }
    }
    if (degenerate > 0) {
        std::cerr << "shepard_to_nodes: " << degenerate
                  << " node(s) with a single adjacent cell receive value 0 under the "
                     "unnormalized variant\n";
    }
    return out;
}

}  // namespace

NodeField shepard_to_nodes(const TriMesh& mesh, const CellField& cf, bool normalized) {
    return shepard_impl(mesh, cf, normalized);
}

NodeVecField shepard_to_nodes(const TriMesh& mesh, const CellVecField& cf, bool normalized) {
    return shepard_impl(mesh, cf, normalized);
}

}  // namespace shapedesc
