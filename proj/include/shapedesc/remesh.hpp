#pragma once

#include <stdexcept>
#include <vector>

#include "shapedesc/mesh.hpp"

namespace shapedesc {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RemeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed boundary polyline (implicitly closed, last connects to first).
struct Polyline {
    std::vector<Vec2> pts;
    int loop_id = 0;
    bool design = true;
};

struct MeshSpec {
    double h = 0.1;                  // target edge length
    double min_angle_goal = 20.0;    // degrees
    double corner_angle = 30.0;      // turning angle above which vertices are kept
};

/// Triangulates the region bounded by the loops (outer loop plus holes).
/// Boundary polylines are resampled at spacing h, vertices with turning angle
/// above the corner threshold are preserved exactly.
TriMesh remesh(const std::vector<Polyline>& loops, double h);
TriMesh remesh(const std::vector<Polyline>& loops, const MeshSpec& spec);

/// Annular benchmark domain: outer circle radius R (design), inner circle
/// radius r (fixed).
TriMesh generate_annulus(double R, double r, double h);

/// Square rotated by 45 degrees with the given circumradius as outer (design)
/// loop, circular hole of radius r (fixed).
TriMesh generate_diamond_annulus(double circumradius, double r, double h);

/// Extracts the boundary curves of a mesh as polylines for re-triangulation.
std::vector<Polyline> boundary_polylines(const TriMesh& mesh);

}  // namespace shapedesc
