#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shapedesc/mesh.hpp"
#include "shapedesc/optimizer.hpp"

namespace shapedesc {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Formats a double with 17 significant digits (shortest bit-exact form).
std::string fmt17(double v);

/// ASCII OFF. Boundary loop/design tags are carried in comment lines after the
/// header, so other OFF consumers still read the geometry while our reader
/// restores the tags exactly.
void write_off(const std::string& path, const TriMesh& mesh);
TriMesh read_off(const std::string& path);

/// Legacy ASCII VTK unstructured grid with optional per-node vector fields.
void write_vtk(const std::string& path, const TriMesh& mesh,
               const std::vector<std::pair<std::string, NodeVecField>>& vectors = {});

/// Boundary polyline CSV: header "x,y,loop", one boundary node per row in loop
/// order.
void write_boundary_csv(const std::string& path, const TriMesh& mesh);
struct BoundaryCsvRow {
    double x, y;
    int loop;
};
std::vector<BoundaryCsvRow> read_boundary_csv(const std::string& path);

/// run.csv: iter,J,G,alpha,min_quality_deg,n_boundary_nodes.
void write_run_csv(const std::string& path, const std::vector<IterationRecord>& records);
std::vector<IterationRecord> read_run_csv(const std::string& path);

/// compare.csv (long format): method,iter,J,G,alpha,min_quality.
struct CompareRow {
    std::string method;
    int iter;
    double J, G, alpha, min_quality;
};
void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);
std::vector<CompareRow> read_compare_csv(const std::string& path);

/// oracle.csv: phi,x,y. Rows where the root finder failed carry nan entries.
struct OracleRow {
    double phi, x, y;
};
void write_oracle_csv(const std::string& path, const std::vector<OracleRow>& rows);
std::vector<OracleRow> read_oracle_csv(const std::string& path);

}  // namespace shapedesc
