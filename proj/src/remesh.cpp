#include "shapedesc/remesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace shapedesc {

namespace {

constexpr double kOrientEps = 1e-13;

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).cross(c - a);
}

// d strictly inside the circumcircle of CCW triangle (a,b,c)?
bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    double ax = a.x - d.x, ay = a.y - d.y;
    double bx = b.x - d.x, by = b.y - d.y;
    double cx = c.x - d.x, cy = c.y - d.y;
    double det = (ax * ax + ay * ay) * (bx * cy - cx * by)
               - (bx * bx + by * by) * (ax * cy - cx * ay)
               + (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > 1e-14;
}

bool segments_properly_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    double d1 = orient2d(q1, q2, p1);
    double d2 = orient2d(q1, q2, p2);
    double d3 = orient2d(p1, p2, q1);
    double d4 = orient2d(p1, p2, q2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Even-odd crossing rule over all loops.
bool point_in_region(const Vec2& p, const std::vector<Polyline>& loops) {
    int crossings = 0;
    for (const auto& loop : loops) {
        const auto& pts = loop.pts;
        const int n = static_cast<int>(pts.size());
        for (int i = 0; i < n; ++i) {
            const Vec2& a = pts[i];
            const Vec2& b = pts[(i + 1) % n];
            if ((a.y > p.y) != (b.y > p.y)) {
                double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (xint > p.x) ++crossings;
            }
        }
    }
    return crossings % 2 == 1;
}

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

// ---------------------------------------------------------------------------
// Incremental Delaunay triangulation with constrained-edge support.
// Triangles are CCW; neighbor n[i] lies across the edge opposite vertex v[i].
// ---------------------------------------------------------------------------
class Delaunay {
public:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> n;
    };

    std::vector<Vec2> pts;
    std::vector<Tri> tris;
    std::vector<char> alive;
    std::vector<int> vert2tri;
    std::unordered_set<uint64_t> constrained;

    explicit Delaunay(const std::vector<Vec2>& points) {
        pts = points;
        vert2tri.assign(points.size(), -1);
        // Super-triangle enclosing everything by a wide margin.
        Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
        for (const auto& p : pts) {
            lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
        }
        Vec2 c = 0.5 * (lo + hi);
        double d = std::max({hi.x - lo.x, hi.y - lo.y, 1.0}) * 64.0;
        super0 = add_point({c.x - d, c.y - d});
        super1 = add_point({c.x + d, c.y - d});
        super2 = add_point({c.x, c.y + d});
        int t = new_tri({super0, super1, super2}, {-1, -1, -1});
        (void)t;
        for (int i = 0; i < static_cast<int>(points.size()); ++i) insert(i);
    }

    bool is_super(int v) const { return v == super0 || v == super1 || v == super2; }

    int add_point(const Vec2& p) {
        pts.push_back(p);
        vert2tri.push_back(-1);
        return static_cast<int>(pts.size()) - 1;
    }

    /// Inserts pre-existing point index vi into the triangulation.
    void insert(int vi) {
        int t = locate(pts[vi]);
        if (t < 0) throw RemeshError("point location failed during triangulation");

        // Grow the Delaunay cavity without crossing constrained edges.
        std::vector<int> cavity;
        std::unordered_set<int> in_cavity;
        std::deque<int> queue{t};
        in_cavity.insert(t);
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            cavity.push_back(cur);
            for (int e = 0; e < 3; ++e) {
                int nb = tris[cur].n[e];
                if (nb < 0 || in_cavity.count(nb)) continue;
                int a = tris[cur].v[(e + 1) % 3];
                int b = tris[cur].v[(e + 2) % 3];
                if (constrained.count(edge_key(a, b))) continue;
                const auto& tv = tris[nb].v;
                if (in_circumcircle(pts[tv[0]], pts[tv[1]], pts[tv[2]], pts[vi])) {
                    in_cavity.insert(nb);
                    queue.push_back(nb);
                }
            }
        }

        // Cavity boundary, oriented CCW around the cavity.
        struct BEdge { int a, b, outer; };
        std::vector<BEdge> bedges;
        for (int ct : cavity) {
            for (int e = 0; e < 3; ++e) {
                int nb = tris[ct].n[e];
                if (nb >= 0 && in_cavity.count(nb)) continue;
                bedges.push_back({tris[ct].v[(e + 1) % 3], tris[ct].v[(e + 2) % 3], nb});
            }
        }
        for (int ct : cavity) alive[ct] = 0;

        // Fan of new triangles (vi, a, b), linked via shared spokes.
        std::unordered_map<int, int> by_start, by_end;
        std::vector<int> created;
        created.reserve(bedges.size());
        for (const auto& be : bedges) {
            int nt = new_tri({vi, be.a, be.b}, {be.outer, -1, -1});
            if (be.outer >= 0) {
                for (int e = 0; e < 3; ++e) {
                    int oa = tris[be.outer].v[(e + 1) % 3];
                    int ob = tris[be.outer].v[(e + 2) % 3];
                    if (oa == be.b && ob == be.a) {
                        tris[be.outer].n[e] = nt;
                        break;
                    }
                }
            }
            by_start[be.a] = nt;
            by_end[be.b] = nt;
            created.push_back(nt);
        }
        for (int nt : created) {
            int a = tris[nt].v[1], b = tris[nt].v[2];
            tris[nt].n[2] = by_end.at(a);    // across edge (vi,a)
            tris[nt].n[1] = by_start.at(b);  // across edge (vi,b)
        }
        last_tri = created.empty() ? last_tri : created.front();
    }

    /// Walks from the last created triangle towards p.
    int locate(const Vec2& p) const {
        int t = last_tri;
        if (t < 0 || !alive[t]) {
            t = -1;
            for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i) {
                if (alive[i]) { t = i; break; }
            }
        }
        std::size_t steps = 0;
        while (t >= 0 && steps++ < tris.size() + 16) {
            bool moved = false;
            for (int e = 0; e < 3; ++e) {
                int a = tris[t].v[(e + 1) % 3];
                int b = tris[t].v[(e + 2) % 3];
                if (orient2d(pts[a], pts[b], p) < -kOrientEps) {
                    t = tris[t].n[e];
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
        }
        // Fallback: exhaustive scan.
        for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
            if (!alive[i]) continue;
            bool inside = true;
            for (int e = 0; e < 3 && inside; ++e) {
                int a = tris[i].v[(e + 1) % 3];
                int b = tris[i].v[(e + 2) % 3];
                if (orient2d(pts[a], pts[b], p) < -kOrientEps) inside = false;
            }
            if (inside) return i;
        }
        return -1;
    }

    bool edge_exists(int a, int b) const {
        int t0 = vert2tri[a];
        if (t0 < 0) return false;
        int t = t0, prev = -1;
        std::size_t guard = 0;
        while (guard++ < tris.size() + 8) {
            int ia = index_of(t, a);
            if (tris[t].v[(ia + 1) % 3] == b || tris[t].v[(ia + 2) % 3] == b) return true;
            int next = tris[t].n[(ia + 1) % 3];  // rotate around a
            if (next < 0 || next == t0) break;
            prev = t;
            (void)prev;
            t = next;
        }
        return false;
    }

    int index_of(int t, int v) const {
        for (int i = 0; i < 3; ++i) {
            if (tris[t].v[i] == v) return i;
        }
        throw RemeshError("vertex not in triangle");
    }

    /// Flips the edge opposite vertex index i1 of triangle t1. Returns false if
    /// the surrounding quad is not strictly convex.
    bool flip(int t1, int i1) {
        int t2 = tris[t1].n[i1];
        if (t2 < 0) return false;
        int i2 = -1;
        for (int i = 0; i < 3; ++i) {
            if (tris[t2].n[i] == t1) { i2 = i; break; }
        }
        if (i2 < 0) throw RemeshError("inconsistent adjacency");
        int p = tris[t1].v[i1];
        int a = tris[t1].v[(i1 + 1) % 3];
        int b = tris[t1].v[(i1 + 2) % 3];
        int q = tris[t2].v[i2];
        if (orient2d(pts[p], pts[a], pts[q]) <= kOrientEps) return false;
        if (orient2d(pts[p], pts[q], pts[b]) <= kOrientEps) return false;

        int A1 = tris[t1].n[(i1 + 1) % 3];  // across (b,p)
        int B1 = tris[t1].n[(i1 + 2) % 3];  // across (p,a)
        int A2 = tris[t2].n[(i2 + 1) % 3];  // across (a,q)
        int B2 = tris[t2].n[(i2 + 2) % 3];  // across (q,b)

        tris[t1] = {{p, a, q}, {A2, t2, B1}};
        tris[t2] = {{p, q, b}, {B2, A1, t1}};
        fix_neighbor(A2, t2, t1);
        fix_neighbor(A1, t1, t2);
        vert2tri[p] = t1;
        vert2tri[a] = t1;
        vert2tri[q] = t1;
        vert2tri[b] = t2;
        return true;
    }

    /// Lawson sweep: flips non-constrained edges violating the Delaunay
    /// criterion until none remain.
    void lawson_sweep() {
        bool any = true;
        int rounds = 0;
        while (any && rounds++ < 64) {
            any = false;
            for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
                if (!alive[t]) continue;
                for (int e = 0; e < 3; ++e) {
                    int nb = tris[t].n[e];
                    if (nb < 0 || nb < t) continue;
                    int a = tris[t].v[(e + 1) % 3];
                    int b = tris[t].v[(e + 2) % 3];
                    if (constrained.count(edge_key(a, b))) continue;
                    int i2 = -1;
                    for (int i = 0; i < 3; ++i) {
                        if (tris[nb].n[i] == t) { i2 = i; break; }
                    }
                    if (i2 < 0) continue;
                    int q = tris[nb].v[i2];
                    const auto& tv = tris[t].v;
                    if (in_circumcircle(pts[tv[0]], pts[tv[1]], pts[tv[2]], pts[q])) {
                        if (flip(t, e)) any = true;
                    }
                }
            }
        }
    }

    /// Forces segment (a,b) to be an edge, flipping crossing edges.
    void recover_segment(int a, int b) {
        if (edge_exists(a, b)) return;
        int guard = 0;
        while (!edge_exists(a, b)) {
            if (++guard > 1024) throw RemeshError("constrained edge recovery failed");
            // Find a triangle edge crossing segment a-b and flip it.
            bool flipped = false;
            for (int t = 0; t < static_cast<int>(tris.size()) && !flipped; ++t) {
                if (!alive[t]) continue;
                for (int e = 0; e < 3 && !flipped; ++e) {
                    int u = tris[t].v[(e + 1) % 3];
                    int v = tris[t].v[(e + 2) % 3];
                    if (u == a || u == b || v == a || v == b) continue;
                    if (constrained.count(edge_key(u, v))) continue;
                    if (segments_properly_intersect(pts[a], pts[b], pts[u], pts[v])) {
                        if (flip(t, e)) flipped = true;
                    }
                }
            }
            if (!flipped) throw RemeshError("constrained edge recovery stalled");
        }
    }

    int super0 = -1, super1 = -1, super2 = -1;
    int last_tri = -1;

private:
    int new_tri(std::array<int, 3> v, std::array<int, 3> n) {
        tris.push_back({v, n});
        alive.push_back(1);
        int idx = static_cast<int>(tris.size()) - 1;
        for (int x : v) vert2tri[x] = idx;
        last_tri = idx;
        return idx;
    }

    void fix_neighbor(int t, int old_nb, int new_nb) {
        if (t < 0) return;
        for (int i = 0; i < 3; ++i) {
            if (tris[t].n[i] == old_nb) {
                tris[t].n[i] = new_nb;
                return;
            }
        }
    }
};

struct ResampledLoop {
    std::vector<Vec2> pts;
    int loop_id;
    bool design;
};

double turning_angle_deg(const Vec2& prev, const Vec2& cur, const Vec2& next) {
    Vec2 d1 = cur - prev, d2 = next - cur;
    double c = d1.dot(d2) / (d1.norm() * d2.norm());
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

std::vector<Vec2> resample_chain(const std::vector<Vec2>& chain, double h, bool closed) {
    // chain: open polyline from one kept vertex to the next (last point is the
    // end vertex, not re-emitted). For closed=true the chain wraps and the
    // first point is kept.
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < chain.size(); ++i) {
        cum.push_back(cum.back() + (chain[i] - chain[i - 1]).norm());
    }
    double L = cum.back();
    int m = std::max(closed ? 3 : 1, static_cast<int>(std::llround(L / h)));
    std::vector<Vec2> out;
    out.reserve(m);
    std::size_t seg = 0;
    for (int j = 0; j < m; ++j) {
        double s = L * j / m;
        while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
        double t = (s - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300);
        out.push_back(chain[seg] + t * (chain[seg + 1] - chain[seg]));
    }
    return out;
}

ResampledLoop resample_loop(const Polyline& loop, double h, double corner_angle) {
    const auto& pts = loop.pts;
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw RemeshError("boundary loop with fewer than 3 points");

    std::vector<int> corners;
    for (int i = 0; i < n; ++i) {
        if (turning_angle_deg(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]) > corner_angle) {
            corners.push_back(i);
        }
    }

    ResampledLoop out;
    out.loop_id = loop.loop_id;
    out.design = loop.design;
    if (corners.empty()) {
        std::vector<Vec2> chain(pts.begin(), pts.end());
        chain.push_back(pts.front());
        out.pts = resample_chain(chain, h, true);
    } else {
        // Resample corner-to-corner chains; each chain keeps its start corner
        // and stops short of the end corner (emitted by the next chain).
        for (std::size_t k = 0; k < corners.size(); ++k) {
            int s = corners[k];
            int e = corners[(k + 1) % corners.size()];
            std::vector<Vec2> chain{pts[s]};
            for (int i = (s + 1) % n; ; i = (i + 1) % n) {
                chain.push_back(pts[i]);
                if (i == e) break;
            }
            auto part = resample_chain(chain, h, false);
            out.pts.insert(out.pts.end(), part.begin(), part.end());
        }
    }
    return out;
}

void check_loops(const std::vector<ResampledLoop>& loops) {
    // Self- and mutual-intersection scan over all segment pairs.
    struct Seg { Vec2 a, b; int loop; int idx; };
    std::vector<Seg> segs;
    for (int li = 0; li < static_cast<int>(loops.size()); ++li) {
        const auto& p = loops[li].pts;
        const int n = static_cast<int>(p.size());
        for (int i = 0; i < n; ++i) {
            segs.push_back({p[i], p[(i + 1) % n], li, i});
        }
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            if (segs[i].loop == segs[j].loop) {
                int n = static_cast<int>(loops[segs[i].loop].pts.size());
                int d = std::abs(segs[i].idx - segs[j].idx);
                if (d == 1 || d == n - 1) continue;  // adjacent
            }
            if (segments_properly_intersect(segs[i].a, segs[i].b, segs[j].a, segs[j].b)) {
                throw RemeshError("boundary loops intersect");
            }
        }
    }
}

struct InputSegment {
    Vec2 a, b;
    bool design;
};

bool nearest_segment_design(const Vec2& p, const std::vector<InputSegment>& segs) {
    double best = 1e300;
    bool design = true;
    for (const auto& s : segs) {
        double d = point_segment_distance(p, s.a, s.b);
        if (d < best) {
            best = d;
            design = s.design;
        }
    }
    return design;
}

TriMesh triangulate(const std::vector<Polyline>& input, const MeshSpec& spec) {
    const double h = spec.h;
    if (!(h > 0.0)) throw RemeshError("target edge length must be positive");

    std::vector<ResampledLoop> loops;
    for (const auto& pl : input) loops.push_back(resample_loop(pl, h, spec.corner_angle));
    check_loops(loops);

    std::vector<Polyline> region;
    for (const auto& rl : loops) region.push_back({rl.pts, rl.loop_id, rl.design});

    std::vector<InputSegment> input_segs;
    for (const auto& pl : input) {
        const int n = static_cast<int>(pl.pts.size());
        for (int i = 0; i < n; ++i) {
            input_segs.push_back({pl.pts[i], pl.pts[(i + 1) % n], pl.design});
        }
    }

    // Point set: resampled boundary nodes plus a clipped hex grid of interior
    // seeds at spacing ~h.
    std::vector<Vec2> points;
    struct LoopRange { int begin, count, loop_id; bool design; };
    std::vector<LoopRange> ranges;
    for (const auto& rl : loops) {
        ranges.push_back({static_cast<int>(points.size()), static_cast<int>(rl.pts.size()),
                          rl.loop_id, rl.design});
        points.insert(points.end(), rl.pts.begin(), rl.pts.end());
    }
    const int n_boundary = static_cast<int>(points.size());

    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto& p : points) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    auto boundary_clearance = [&](const Vec2& p) {
        double d = 1e300;
        for (const auto& rl : loops) {
            const int n = static_cast<int>(rl.pts.size());
            for (int i = 0; i < n; ++i) {
                d = std::min(d, point_segment_distance(p, rl.pts[i], rl.pts[(i + 1) % n]));
            }
        }
        return d;
    };
    const double dy = h * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = lo.y + 0.5 * dy; y < hi.y; y += dy, ++row) {
        double x0 = lo.x + ((row % 2) ? 0.75 * h : 0.25 * h);
        for (double x = x0; x < hi.x; x += h) {
            Vec2 p{x, y};
            if (!point_in_region(p, region)) continue;
            if (boundary_clearance(p) < 0.7 * h) continue;
            points.push_back(p);
        }
    }

    Delaunay dt(points);

    // Constrain the boundary segments.
    struct ConstraintTag { int loop_id; bool design; };
    std::unordered_map<uint64_t, ConstraintTag> tags;
    for (const auto& r : ranges) {
        for (int i = 0; i < r.count; ++i) {
            int a = r.begin + i;
            int b = r.begin + (i + 1) % r.count;
            dt.recover_segment(a, b);
            dt.constrained.insert(edge_key(a, b));
            tags[edge_key(a, b)] = {r.loop_id, r.design};
        }
    }
    dt.lawson_sweep();

    auto inside_tri = [&](int t) {
        const auto& tv = dt.tris[t].v;
        for (int v : tv) {
            if (dt.is_super(v)) return false;
        }
        Vec2 c = (dt.pts[tv[0]] + dt.pts[tv[1]] + dt.pts[tv[2]]) / 3.0;
        return point_in_region(c, region);
    };

    auto smooth = [&](int passes) {
        for (int pass = 0; pass < passes; ++pass) {
            std::vector<Vec2> sum(dt.pts.size(), Vec2{0, 0});
            std::vector<int> cnt(dt.pts.size(), 0);
            for (int t = 0; t < static_cast<int>(dt.tris.size()); ++t) {
                if (!dt.alive[t] || !inside_tri(t)) continue;
                const auto& tv = dt.tris[t].v;
                for (int e = 0; e < 3; ++e) {
                    sum[tv[e]] += dt.pts[tv[(e + 1) % 3]] + dt.pts[tv[(e + 2) % 3]];
                    cnt[tv[e]] += 2;
                }
            }
            std::vector<std::vector<int>> n2t(dt.pts.size());
            for (int t = 0; t < static_cast<int>(dt.tris.size()); ++t) {
                if (!dt.alive[t]) continue;
                for (int v : dt.tris[t].v) n2t[v].push_back(t);
            }
            for (std::size_t v = n_boundary; v < dt.pts.size(); ++v) {
                if (dt.is_super(static_cast<int>(v)) || cnt[v] == 0) continue;
                Vec2 target = sum[v] / static_cast<double>(cnt[v]);
                Vec2 old = dt.pts[v];
                dt.pts[v] = target;
                bool ok = true;
                for (int t : n2t[v]) {
                    const auto& tv = dt.tris[t].v;
                    if (orient2d(dt.pts[tv[0]], dt.pts[tv[1]], dt.pts[tv[2]]) <= kOrientEps) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) dt.pts[v] = old;
            }
            dt.lawson_sweep();
        }
    };

    smooth(4);

    // Targeted refinement: insert circumcenters of poor-quality interior
    // triangles that are safely away from the boundary.
    for (int round = 0; round < 12; ++round) {
        std::vector<Vec2> inserts;
        for (int t = 0; t < static_cast<int>(dt.tris.size()); ++t) {
            if (!dt.alive[t] || !inside_tri(t)) continue;
            const auto& tv = dt.tris[t].v;
            Vec2 a = dt.pts[tv[0]], b = dt.pts[tv[1]], c = dt.pts[tv[2]];
            double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
            double area = 0.5 * orient2d(a, b, c);
            double minang = 180.0;
            auto angle = [](double opp, double s1, double s2) {
                double cv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
                return std::acos(cv) * 180.0 / std::numbers::pi;
            };
            minang = std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
            if (minang >= spec.min_angle_goal && std::max({la, lb, lc}) < 1.8 * h) continue;
            double R = la * lb * lc / std::max(4.0 * area, 1e-300);
            // circumcenter
            double d = 2.0 * ((a - c).cross(b - c));
            if (std::abs(d) < 1e-300) continue;
            double az = (a - c).norm2(), bz = (b - c).norm2();
            Vec2 cc{c.x + (bz * (a.y - c.y) - az * (b.y - c.y)) / -d,
                    c.y + (az * (b.x - c.x) - bz * (a.x - c.x)) / -d};
            (void)R;
            if (!point_in_region(cc, region)) continue;
            if (boundary_clearance(cc) < 0.55 * h) continue;
            inserts.push_back(cc);
        }
        if (inserts.empty()) break;
        for (const auto& p : inserts) {
            // Skip points that ended up close to an earlier insert.
            int t = dt.locate(p);
            if (t < 0) continue;
            bool close = false;
            for (int v : dt.tris[t].v) {
                if ((dt.pts[v] - p).norm() < 0.5 * h) close = true;
            }
            if (close) continue;
            int vi = dt.add_point(p);
            dt.insert(vi);
        }
        smooth(2);
    }
    smooth(2);

    // Assemble the kept triangles into a TriMesh.
    TriMesh mesh;
    std::vector<int> remap(dt.pts.size(), -1);
    for (int t = 0; t < static_cast<int>(dt.tris.size()); ++t) {
        if (!dt.alive[t] || !inside_tri(t)) continue;
        std::array<int, 3> tri{};
        for (int e = 0; e < 3; ++e) {
            int v = dt.tris[t].v[e];
            if (remap[v] < 0) {
                remap[v] = mesh.node_count();
                mesh.nodes.push_back(dt.pts[v]);
            }
            tri[e] = remap[v];
        }
        mesh.triangles.push_back(tri);
    }
    if (mesh.triangles.empty()) throw RemeshError("empty triangulation");

    // Boundary edges from incidence; tags by nearest input segment.
    std::map<std::pair<int, int>, int> edge_count;
    std::map<std::pair<int, int>, std::pair<int, int>> directed;  // sorted -> (a,b) CCW
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            edge_count[key]++;
            directed[key] = {a, b};
        }
    }
    // loop-id assignment by nearest resampled loop
    auto nearest_loop = [&](const Vec2& p) {
        double best = 1e300;
        int id = 0;
        bool design = true;
        for (const auto& rl : loops) {
            const int n = static_cast<int>(rl.pts.size());
            for (int i = 0; i < n; ++i) {
                double d = point_segment_distance(p, rl.pts[i], rl.pts[(i + 1) % n]);
                if (d < best) {
                    best = d;
                    id = rl.loop_id;
                    design = rl.design;
                }
            }
        }
        return std::make_pair(id, design);
    };
    for (const auto& [key, cnt] : edge_count) {
        if (cnt != 1) continue;
        auto [a, b] = directed[key];
        Vec2 mid = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
        auto [loop_id, loop_design] = nearest_loop(mid);
        bool design = loop_design && nearest_segment_design(mid, input_segs);
        mesh.boundary_edges.push_back({a, b, loop_id, design});
    }

    mesh.validate();
    return mesh;
}

std::vector<Vec2> circle_points(double R, double h) {
    int n = std::max(8, static_cast<int>(std::llround(2.0 * std::numbers::pi * R / h)));
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        double phi = 2.0 * std::numbers::pi * i / n;
        pts.push_back({R * std::cos(phi), R * std::sin(phi)});
    }
    return pts;
}

}  // namespace

TriMesh remesh(const std::vector<Polyline>& loops, double h) {
    MeshSpec spec;
    spec.h = h;
    return remesh(loops, spec);
}

TriMesh remesh(const std::vector<Polyline>& loops, const MeshSpec& spec) {
    return triangulate(loops, spec);
}

TriMesh generate_annulus(double R, double r, double h) {
    if (!(r > 0.0 && r < R)) throw GenerationError("annulus requires 0 < r < R");
    if (!(h > 0.0 && h < R - r)) throw GenerationError("annulus requires 0 < h < R - r");
    Polyline outer{circle_points(R, h), 0, true};
    Polyline inner{circle_points(r, h), 1, false};
    TriMesh mesh = remesh({outer, inner}, h);
    if (min_quality(mesh) < 20.0) throw GenerationError("annulus refinement missed the 20 degree goal");
    return mesh;
}

TriMesh generate_diamond_annulus(double circumradius, double r, double h) {
    double c = circumradius;
    if (!(c > 0.0)) throw GenerationError("diamond circumradius must be positive");
    double inradius = c / std::sqrt(2.0);
    if (!(r > 0.0 && r < inradius)) throw GenerationError("diamond hole must fit inside");
    if (!(h > 0.0 && h < inradius - r)) throw GenerationError("h too large for diamond annulus");
    Polyline outer{{{c, 0.0}, {0.0, c}, {-c, 0.0}, {0.0, -c}}, 0, true};
    Polyline inner{circle_points(r, h), 1, false};
    TriMesh mesh = remesh({outer, inner}, h);
    if (min_quality(mesh) < 20.0) throw GenerationError("diamond refinement missed the 20 degree goal");
    return mesh;
}

std::vector<Polyline> boundary_polylines(const TriMesh& mesh) {
    auto curves = boundary_loops(mesh);
    std::vector<Polyline> out;
    for (const auto& c : curves) {
        Polyline pl;
        pl.loop_id = c.loop_id;
        bool any_design = false;
        for (int j = 0; j < c.size(); ++j) {
            pl.pts.push_back(mesh.nodes[c.node_ids[j]]);
            if (c.design[j]) any_design = true;
        }
        pl.design = any_design;
        out.push_back(std::move(pl));
    }
    return out;
}

}  // namespace shapedesc
