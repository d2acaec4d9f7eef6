#include "shapedesc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shapedesc {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& path, int lineno) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
    }
}

long to_long(const std::string& s, const std::string& path, int lineno) {
    try {
        return std::stol(s);
    } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": bad integer '" + s + "'");
    }
}

void expect_header(const std::string& got, const std::string& want, const std::string& path) {
    if (got != want) throw IoError(path + ": expected header '" + want + "', got '" + got + "'");
}

}  // namespace

void write_off(const std::string& path, const TriMesh& mesh) {
    auto out = open_out(path);
    out << "OFF\n";
    for (const auto& be : mesh.boundary_edges) {
        out << "# boundary " << be.a << ' ' << be.b << ' ' << be.loop << ' ' << (be.design ? 1 : 0)
            << '\n';
    }
    out << mesh.node_count() << ' ' << mesh.tri_count() << " 0\n";
    for (const auto& p : mesh.nodes) out << fmt17(p.x) << ' ' << fmt17(p.y) << " 0\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw IoError("write failed: " + path);
}

TriMesh read_off(const std::string& path) {
    auto in = open_in(path);
    TriMesh mesh;
    std::string line;
    int lineno = 0;
    bool saw_magic = false;
    long nv = -1, nf = -1;
    long read_v = 0, read_f = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tag;
            ss >> tag;
            if (tag == "boundary") {
                BoundaryEdge be;
                int d = 1;
                if (!(ss >> be.a >> be.b >> be.loop >> d)) {
                    throw IoError(path + ":" + std::to_string(lineno) + ": bad boundary comment");
                }
                be.design = d != 0;
                mesh.boundary_edges.push_back(be);
            }
            continue;
        }
        if (!saw_magic) {
            if (line.rfind("OFF", 0) != 0) throw IoError(path + ": missing OFF header");
            saw_magic = true;
            continue;
        }
        std::istringstream ss(line);
        if (nv < 0) {
            long ne = 0;
            if (!(ss >> nv >> nf >> ne) || nv < 0 || nf < 0) {
                throw IoError(path + ":" + std::to_string(lineno) + ": bad count line");
            }
            continue;
        }
        if (read_v < nv) {
            double x, y, z = 0.0;
            if (!(ss >> x >> y)) throw IoError(path + ":" + std::to_string(lineno) + ": bad vertex");
            ss >> z;
            mesh.nodes.push_back({x, y});
            ++read_v;
            continue;
        }
        if (read_f < nf) {
            long k, a, b, c;
            if (!(ss >> k >> a >> b >> c) || k != 3) {
                throw IoError(path + ":" + std::to_string(lineno) + ": expected a triangle face");
            }
            mesh.triangles.push_back({static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)});
            ++read_f;
            continue;
        }
    }
    if (!saw_magic || nv < 0 || read_v != nv || read_f != nf) {
        throw IoError(path + ": truncated OFF file");
    }
    mesh.validate();
    return mesh;
}

void write_vtk(const std::string& path, const TriMesh& mesh,
               const std::vector<std::pair<std::string, NodeVecField>>& vectors) {
    for (const auto& [name, field] : vectors) {
        if (field.size() != mesh.nodes.size()) {
            throw IoError("vector field '" + name + "' size does not match node count");
        }
    }
    auto out = open_out(path);
    out << "# vtk DataFile Version 2.0\n";
    out << "mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& p : mesh.nodes) out << fmt17(p.x) << ' ' << fmt17(p.y) << " 0\n";
    out << "CELLS " << mesh.tri_count() << ' ' << 4 * mesh.tri_count() << '\n';
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh.tri_count() << '\n';
    for (int t = 0; t < mesh.tri_count(); ++t) out << "5\n";
    if (!vectors.empty()) {
        out << "POINT_DATA " << mesh.node_count() << '\n';
        for (const auto& [name, field] : vectors) {
            out << "VECTORS " << name << " double\n";
            for (const auto& v : field.values) out << fmt17(v.x) << ' ' << fmt17(v.y) << " 0\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_boundary_csv(const std::string& path, const TriMesh& mesh) {
    auto loops = boundary_loops(mesh);
    auto out = open_out(path);
    out << "x,y,loop\n";
    for (const auto& c : loops) {
        for (int nid : c.node_ids) {
            const Vec2& p = mesh.nodes[nid];
            out << fmt17(p.x) << ',' << fmt17(p.y) << ',' << c.loop_id << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<BoundaryCsvRow> read_boundary_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    expect_header(line, "x,y,loop", path);
    std::vector<BoundaryCsvRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 3) throw IoError(path + ":" + std::to_string(lineno) + ": expected 3 fields");
        rows.push_back({to_double(f[0], path, lineno), to_double(f[1], path, lineno),
                        static_cast<int>(to_long(f[2], path, lineno))});
    }
    return rows;
}

void write_run_csv(const std::string& path, const std::vector<IterationRecord>& records) {
    auto out = open_out(path);
    out << "iter,J,G,alpha,min_quality_deg,n_boundary_nodes\n";
    for (const auto& r : records) {
        out << r.iteration << ',' << fmt17(r.J) << ',' << fmt17(r.G) << ',' << fmt17(r.alpha) << ','
            << fmt17(r.min_quality_deg) << ',' << r.n_boundary_nodes << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<IterationRecord> read_run_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    expect_header(line, "iter,J,G,alpha,min_quality_deg,n_boundary_nodes", path);
    std::vector<IterationRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw IoError(path + ":" + std::to_string(lineno) + ": expected 6 fields");
        IterationRecord r;
        r.iteration = static_cast<int>(to_long(f[0], path, lineno));
        r.J = to_double(f[1], path, lineno);
        r.G = to_double(f[2], path, lineno);
        r.alpha = to_double(f[3], path, lineno);
        r.min_quality_deg = to_double(f[4], path, lineno);
        r.n_boundary_nodes = static_cast<int>(to_long(f[5], path, lineno));
        records.push_back(std::move(r));
    }
    return records;
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
    auto out = open_out(path);
    out << "method,iter,J,G,alpha,min_quality\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.iter << ',' << fmt17(r.J) << ',' << fmt17(r.G) << ','
            << fmt17(r.alpha) << ',' << fmt17(r.min_quality) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<CompareRow> read_compare_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    expect_header(line, "method,iter,J,G,alpha,min_quality", path);
    std::vector<CompareRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw IoError(path + ":" + std::to_string(lineno) + ": expected 6 fields");
        rows.push_back({f[0], static_cast<int>(to_long(f[1], path, lineno)),
                        to_double(f[2], path, lineno), to_double(f[3], path, lineno),
                        to_double(f[4], path, lineno), to_double(f[5], path, lineno)});
    }
    return rows;
}

void write_oracle_csv(const std::string& path, const std::vector<OracleRow>& rows) {
    auto out = open_out(path);
    out << "phi,x,y\n";
    for (const auto& r : rows) {
        out << fmt17(r.phi) << ',' << fmt17(r.x) << ',' << fmt17(r.y) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<OracleRow> read_oracle_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    expect_header(line, "phi,x,y", path);
    std::vector<OracleRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 3) throw IoError(path + ":" + std::to_string(lineno) + ": expected 3 fields");
        rows.push_back({to_double(f[0], path, lineno), to_double(f[1], path, lineno),
                        to_double(f[2], path, lineno)});
    }
    return rows;
}

}  // namespace shapedesc
