#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "shapedesc/checks.hpp"
#include "shapedesc/config.hpp"
#include "shapedesc/io.hpp"
#include "shapedesc/remesh.hpp"

namespace fs = std::filesystem;
using namespace shapedesc;

namespace {

std::string resolve_outdir(const std::string& configured) {
    const char* env = std::getenv("SHAPEDESC_OUT");
    if (env && *env) return env;
    return configured;
}

int cmd_run(const std::string& config_path) {
    RunConfig cfg;
    try {
        cfg = load_run_config(config_path, /*with_method_list=*/false);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    const std::string outdir = resolve_outdir(cfg.output_dir);
    fs::create_directories(outdir);

    TriMesh mesh0;
    std::unique_ptr<SensitivityProvider> provider;
    try {
        mesh0 = build_geometry(cfg);
        provider = build_provider(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    DescentConfig dcfg = build_descent_config(cfg);
    dcfg.snapshot = [&](int iter, const TriMesh& m) {
        char name[32];
        std::snprintf(name, sizeof(name), "boundary_%04d.csv", iter);
        write_boundary_csv(outdir + "/" + name, m);
    };

    DescentResult res = run_descent(*provider, mesh0, dcfg);
    write_run_csv(outdir + "/run.csv", res.records);
    write_boundary_csv(outdir + "/boundary_final.csv", res.mesh);
    write_off(outdir + "/final.off", res.mesh);
    write_vtk(outdir + "/final.vtk", res.mesh);

    double final_J = provider->evaluate_objective(res.mesh);
    std::cout << "final J = " << fmt17(final_J) << ", iterations = " << res.records.size()
              << ", termination = " << stop_reason_name(res.reason);
    if (!res.message.empty()) std::cout << " (" << res.message << ")";
    std::cout << '\n';
    return res.reason == StopReason::Aborted ? 1 : 0;
}

int cmd_compare(const std::string& config_path) {
    RunConfig cfg;
    try {
        cfg = load_run_config(config_path, /*with_method_list=*/true);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    const std::string outdir = resolve_outdir(cfg.output_dir);
    fs::create_directories(outdir);

    TriMesh mesh0;
    std::unique_ptr<SensitivityProvider> provider;
    try {
        mesh0 = build_geometry(cfg);
        provider = build_provider(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    std::vector<CompareRow> rows;
    std::ostringstream summary;
    int warnings = 0;
    for (const auto& name : cfg.method_names) {
        try {
            DescentConfig dcfg = build_descent_config(cfg);
            dcfg.method = method_with_tag(cfg, name);
            DescentResult res = run_descent(*provider, mesh0, dcfg);
            for (const auto& r : res.records) {
                rows.push_back({name, r.iteration, r.J, r.G, r.alpha, r.min_quality_deg});
            }
            summary << name << ": " << res.records.size() << " iterations, termination = "
                    << stop_reason_name(res.reason) << '\n';
            if (res.reason == StopReason::Aborted) {
                ++warnings;
                std::cerr << "warning: method " << name << " aborted: " << res.message << '\n';
            }
        } catch (const std::exception& e) {
            ++warnings;
            std::cerr << "warning: method " << name << " failed: " << e.what() << '\n';
        }
    }
    write_compare_csv(outdir + "/compare.csv", rows);
    std::cout << summary.str();
    if (warnings > 0) std::cout << "warnings: " << warnings << '\n';
    return 0;
}

int cmd_oracle(double c1, int n, const std::string& outdir_arg) {
    const std::string outdir = resolve_outdir(outdir_arg);
    fs::create_directories(outdir);
    std::vector<OracleRow> rows;
    int warnings = 0;
    const double two_pi = 8.0 * std::atan(1.0);
    IllustrativeProblem prob{c1, 0.0};
    for (int i = 0; i < n; ++i) {
        double phi = two_pi * i / n;
        try {
            double r = levelset_oracle(phi, prob);
            rows.push_back({phi, r * std::cos(phi), r * std::sin(phi)});
        } catch (const OracleError&) {
            ++warnings;
            double qnan = std::numeric_limits<double>::quiet_NaN();
            rows.push_back({phi, qnan, qnan});
        }
    }
    write_oracle_csv(outdir + "/oracle.csv", rows);
    std::cout << "wrote " << rows.size() << " rows";
    if (warnings > 0) std::cout << ", " << warnings << " bracketing failures";
    std::cout << '\n';
    return 0;
}

int cmd_check(bool perturb, unsigned seed) {
    std::ostringstream report;
    CheckOptions options;
    options.perturb_stiffness = perturb;
    options.seed = seed;
    bool ok = run_checks(report, options);
    std::cout << report.str();
    std::cout << (ok ? "all checks passed" : "CHECK FAILURES") << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D parameter-free shape optimization laboratory"};
    app.require_subcommand(1);

    std::string run_config, compare_config;
    auto* run = app.add_subcommand("run", "run a single optimization from a config file");
    run->add_option("config", run_config, "key=value config file")->required();

    auto* compare = app.add_subcommand("compare", "run several update methods on one setup");
    compare->add_option("config", compare_config, "key=value config file")->required();

    double oracle_c1 = 0.0;
    int oracle_n = 360;
    std::string oracle_out = ".";
    auto* oracle = app.add_subcommand("oracle", "emit the analytic optimal-boundary polyline");
    oracle->add_option("--c1", oracle_c1, "corner coefficient C1");
    oracle->add_option("--n", oracle_n, "number of sample angles")->check(CLI::PositiveNumber);
    oracle->add_option("--out", oracle_out, "output directory");

    bool check_perturb = false;
    unsigned check_seed = 0;
    auto* check = app.add_subcommand("check", "run the built-in verification suite");
    check->add_flag("--perturb-stiffness", check_perturb,
                    "corrupt one stiffness entry (negative control)");
    check->add_option("--seed", check_seed, "seed for randomized checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config);
        if (compare->parsed()) return cmd_compare(compare_config);
        if (oracle->parsed()) return cmd_oracle(oracle_c1, oracle_n, oracle_out);
        if (check->parsed()) return cmd_check(check_perturb, check_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
