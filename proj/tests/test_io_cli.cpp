#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "shapedesc/config.hpp"
#include "shapedesc/io.hpp"
#include "shapedesc/mesh.hpp"
#include "shapedesc/remesh.hpp"

using namespace shapedesc;
using testutil::temp_path;

TEST_SUITE_BEGIN("io_cli");

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

#ifndef SHAPEDESC_CLI_PATH
#error "SHAPEDESC_CLI_PATH must be defined by the build"
#endif

void sh(const std::string& cmd) { REQUIRE(std::system(cmd.c_str()) == 0); }

// runs the CLI, returns its exit code; stdout+stderr captured to capture_file
int run_cli(const std::string& args, const std::string& capture_file,
            const std::string& outdir = "") {
    std::string cmd;
    if (!outdir.empty()) cmd += "SHAPEDESC_OUT=" + outdir + " ";
    cmd += std::string(SHAPEDESC_CLI_PATH) + " " + args + " > " + capture_file + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

}  // namespace

TEST_CASE("fmt17 round trips doubles bitwise") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int k = 0; k < 200; ++k) {
        double v = U(rng) * std::pow(10.0, int(rng() % 17) - 8);
        CHECK(std::stod(fmt17(v)) == v);
    }
    CHECK(std::stod(fmt17(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("off round trip preserves geometry and boundary tags") {
    auto m = generate_annulus(1.0, 0.3, 0.15);
    auto path = temp_path("mesh.off");
    write_off(path, m);
    auto r = read_off(path);
    REQUIRE(r.node_count() == m.node_count());
    REQUIRE(r.tri_count() == m.tri_count());
    for (int i = 0; i < m.node_count(); ++i) {
        CHECK(r.nodes[i].x == m.nodes[i].x);
        CHECK(r.nodes[i].y == m.nodes[i].y);
    }
    CHECK(r.triangles == m.triangles);
    REQUIRE(r.boundary_edges.size() == m.boundary_edges.size());
    for (std::size_t k = 0; k < m.boundary_edges.size(); ++k) {
        CHECK(r.boundary_edges[k].a == m.boundary_edges[k].a);
        CHECK(r.boundary_edges[k].b == m.boundary_edges[k].b);
        CHECK(r.boundary_edges[k].loop == m.boundary_edges[k].loop);
        CHECK(r.boundary_edges[k].design == m.boundary_edges[k].design);
    }
}

TEST_CASE("vtk writer emits a consistent legacy file") {
    auto m = testutil::unit_square();
    NodeVecField v(m.nodes.size(), Vec2{1.0, -2.0});
    auto path = temp_path("mesh.vtk");
    write_vtk(path, m, {{"theta", v}});
    auto text = slurp(path);
    CHECK(text.find("# vtk DataFile") != std::string::npos);
    CHECK(text.find("UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(text.find("POINTS 4") != std::string::npos);
    CHECK(text.find("VECTORS theta") != std::string::npos);
}

TEST_CASE("boundary, run, compare and oracle CSVs round trip") {
    auto m = generate_annulus(1.0, 0.3, 0.2);
    auto bpath = temp_path("boundary.csv");
    write_boundary_csv(bpath, m);
    auto rows = read_boundary_csv(bpath);
    // closed loops: one node per boundary edge
    CHECK(rows.size() == m.boundary_edges.size());
    int loops_seen = 0;
    for (const auto& r : rows) loops_seen = std::max(loops_seen, r.loop + 1);
    CHECK(loops_seen == 2);

    std::vector<IterationRecord> recs(3);
    for (int i = 0; i < 3; ++i) {
        recs[i].iteration = i + 1;
        recs[i].J = -1.5 * i + 1.0 / 3.0;
        recs[i].G = 0.25 / (i + 1);
        recs[i].alpha = 0.1 * i;
        recs[i].min_quality_deg = 20.0 + i;
        recs[i].n_boundary_nodes = 30 + i;
    }
    auto rpath = temp_path("run.csv");
    write_run_csv(rpath, recs);
    auto rr = read_run_csv(rpath);
    REQUIRE(rr.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(rr[i].iteration == recs[i].iteration);
        CHECK(rr[i].J == recs[i].J);
        CHECK(rr[i].G == recs[i].G);
        CHECK(rr[i].alpha == recs[i].alpha);
        CHECK(rr[i].min_quality_deg == recs[i].min_quality_deg);
        CHECK(rr[i].n_boundary_nodes == recs[i].n_boundary_nodes);
    }

    std::vector<CompareRow> cmp{{"DS", 1, -1.0, 0.5, 0.1, 25.0},
                                {"SP-SM", 1, -2.0 / 3.0, 0.25, 0.2, 30.0}};
    auto cpath = temp_path("compare.csv");
    write_compare_csv(cpath, cmp);
    auto cr = read_compare_csv(cpath);
    REQUIRE(cr.size() == 2);
    CHECK(cr[0].method == "DS");
    CHECK(cr[1].method == "SP-SM");
    CHECK(cr[1].J == -2.0 / 3.0);

    std::vector<OracleRow> orc{{0.0, 1.0, 0.0},
                               {1.0, std::nan(""), std::nan("")},
                               {2.0, -0.5, 0.25}};
    auto opath = temp_path("oracle.csv");
    write_oracle_csv(opath, orc);
    auto orr = read_oracle_csv(opath);
    REQUIRE(orr.size() == 3);
    CHECK(orr[0].x == 1.0);
    CHECK(std::isnan(orr[1].x));
    CHECK(orr[2].y == 0.25);
}

TEST_CASE("config parsing and validation name the offending key") {
    auto good = temp_path("good.cfg");
    spit(good,
         "c1 = 0\nc2 = 0\nannulus_R = 1.0\nannulus_r = 0.5\nh = 0.1\n"
         "method = DS\nmax_iterations = 5\noutput_dir = /tmp/shapedesc_cfgout\n");
    auto cfg = load_run_config(good, false);
    CHECK(cfg.h == 0.1);
    CHECK(cfg.method.tag == MethodTag::DS);
    CHECK(cfg.max_iterations == 5);

    auto bad_h = temp_path("bad_h.cfg");
    spit(bad_h, "h = -1\nmethod = DS\n");
    try {
        load_run_config(bad_h, false);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("h") != std::string::npos);
    }

    auto both = temp_path("both_geoms.cfg");
    spit(both, "annulus_R = 1\ndiamond_circumradius = 1\nh = 0.1\nmethod = DS\n");
    CHECK_THROWS_AS(load_run_config(both, false), ConfigError);

    auto unknown = temp_path("unknown.cfg");
    spit(unknown, "h = 0.1\nmethod = DS\nbogus_key = 3\n");
    try {
        load_run_config(unknown, false);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }

    auto dup = temp_path("dup.cfg");
    spit(dup, "h = 0.1\nh = 0.2\nmethod = DS\n");
    CHECK_THROWS_AS(load_run_config(dup, false), ConfigError);
}

TEST_CASE("cli run: smoke, validation failure, output files") {
    auto cfgp = temp_path("cli_run.cfg");
    spit(cfgp,
         "c1 = 0\nc2 = 0\nannulus_R = 1.0\nannulus_r = 0.5\nh = 0.15\n"
         "method = DS\nmax_iterations = 4\n");
    std::string outdir = temp_path("cli_run_out");
    sh("rm -rf " + outdir + " && mkdir -p " + outdir);
    int rc = run_cli("run " + cfgp, temp_path("cli_run.log"), outdir);
    CHECK(rc == 0);
    auto recs = read_run_csv(outdir + "/run.csv");
    CHECK(recs.size() >= 2);
    CHECK(!slurp(outdir + "/final.off").empty());
    CHECK(!slurp(outdir + "/final.vtk").empty());
    auto log = slurp(temp_path("cli_run.log"));
    CHECK(log.find("final J") != std::string::npos);

    auto badp = temp_path("cli_bad.cfg");
    spit(badp, "h = -1\nmethod = DS\n");
    rc = run_cli("run " + badp, temp_path("cli_bad.log"));
    CHECK(rc != 0);
    CHECK(slurp(temp_path("cli_bad.log")).find("h") != std::string::npos);
}

TEST_CASE("cli run.csv is byte-identical across reruns") {
    auto cfgp = temp_path("cli_det.cfg");
    spit(cfgp,
         "c1 = 0\nc2 = 0\nannulus_R = 1.0\nannulus_r = 0.5\nh = 0.15\n"
         "method = VLB\nmax_iterations = 4\n");
    std::string o1 = temp_path("cli_det1"), o2 = temp_path("cli_det2");
    sh("rm -rf " + o1 + " " + o2 + " && mkdir -p " + o1 + " " + o2);
    CHECK(run_cli("run " + cfgp, temp_path("cli_det.log"), o1) == 0);
    CHECK(run_cli("run " + cfgp, temp_path("cli_det.log"), o2) == 0);
    CHECK(slurp(o1 + "/run.csv") == slurp(o2 + "/run.csv"));
}

TEST_CASE("cli compare: labels present, failing method skipped") {
    auto cfgp = temp_path("cli_cmp.cfg");
    spit(cfgp,
         "c1 = 0\nc2 = 0\nannulus_R = 1.0\nannulus_r = 0.5\nh = 0.15\n"
         "methods = DS, VLB\nmax_iterations = 3\n");
    std::string outdir = temp_path("cli_cmp_out");
    sh("rm -rf " + outdir + " && mkdir -p " + outdir);
    CHECK(run_cli("compare " + cfgp, temp_path("cli_cmp.log"), outdir) == 0);
    auto rows = read_compare_csv(outdir + "/compare.csv");
    bool has_ds = false, has_vlb = false;
    for (const auto& r : rows) {
        if (r.method == "DS") has_ds = true;
        if (r.method == "VLB") has_vlb = true;
    }
    CHECK(has_ds);
    CHECK(has_vlb);

    // invalid conductivity: VLB rows absent, exit still 0 with a warning
    auto failp = temp_path("cli_cmp_fail.cfg");
    spit(failp,
         "c1 = 0\nc2 = 0\nannulus_R = 1.0\nannulus_r = 0.5\nh = 0.15\n"
         "methods = DS, VLB\nconductivity = -0.5\nmax_iterations = 3\n");
    std::string faildir = temp_path("cli_cmp_fail_out");
    sh("rm -rf " + faildir + " && mkdir -p " + faildir);
    CHECK(run_cli("compare " + failp, temp_path("cli_cmp_fail.log"), faildir) == 0);
    auto frows = read_compare_csv(faildir + "/compare.csv");
    bool fail_ds = false, fail_vlb = false;
    for (const auto& r : frows) {
        if (r.method == "DS") fail_ds = true;
        if (r.method == "VLB") fail_vlb = true;
    }
    CHECK(fail_ds);
    CHECK(!fail_vlb);
}

TEST_CASE("cli oracle: analytic radii and symmetry") {
    std::string outdir = temp_path("cli_orc_out");
    sh("rm -rf " + outdir + " && mkdir -p " + outdir);
    CHECK(run_cli("oracle --c1 0 --n 4", temp_path("cli_orc.log"), outdir) == 0);
    auto rows = read_oracle_csv(outdir + "/oracle.csv");
    REQUIRE(rows.size() == 4);
    double want[4] = {1.0 / std::sqrt(2.0), 2.0, 1.0 / std::sqrt(2.0), 2.0};
    for (int k = 0; k < 4; ++k) {
        double r = std::hypot(rows[k].x, rows[k].y);
        CHECK(std::abs(r - want[k]) < 1e-8);
    }

    std::string outdir2 = temp_path("cli_orc360");
    sh("rm -rf " + outdir2 + " && mkdir -p " + outdir2);
    CHECK(run_cli("oracle --c1 0 --n 360", temp_path("cli_orc.log"), outdir2) == 0);
    auto big = read_oracle_csv(outdir2 + "/oracle.csv");
    REQUIRE(big.size() == 360);
    for (int k = 0; k < 360; ++k) {
        int mirror = (360 - k) % 360;  // phi -> -phi maps row k to row 360-k
        CHECK(std::abs(big[k].x - big[mirror].x) < 1e-9);
        CHECK(std::abs(big[k].y + big[mirror].y) < 1e-9);
    }
}

TEST_CASE("cli check: deterministic pass, perturbed fail") {
    auto log1 = temp_path("check1.log"), log2 = temp_path("check2.log");
    CHECK(run_cli("check", log1) == 0);
    CHECK(run_cli("check", log2) == 0);
    CHECK(slurp(log1) == slurp(log2));
    CHECK(slurp(log1).find("PASS") != std::string::npos);

    auto log3 = temp_path("check3.log");
    CHECK(run_cli("check --perturb-stiffness", log3) != 0);
    CHECK(slurp(log3).find("FAIL") != std::string::npos);
}

TEST_SUITE_END();
