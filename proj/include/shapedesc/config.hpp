#pragma once

#include <memory>
#include <string>
#include <vector>

#include "shapedesc/optimizer.hpp"
#include "shapedesc/problem.hpp"

namespace shapedesc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GeometryKind { Annulus, Diamond };

/// Flat key=value run configuration shared by the run and compare commands.
struct RunConfig {
    // provider: analytic benchmark (c1, c2) or an external sensitivity file
    double c1 = 0.0;
    double c2 = 0.0;
    std::string sensitivity_file;  // empty: analytic provider

    GeometryKind geometry = GeometryKind::Annulus;
    double annulus_R = 1.0;
    double annulus_r = 0.5;
    double diamond_circumradius = 1.0;
    double diamond_r = 0.5;
    double h = 0.05;

    UpdateMethod method;                     // run: single method
    std::vector<std::string> method_names;   // compare: method list

    StepMode step_mode = StepMode::LineSearch;
    LineSearchConfig line_search;
    double theta_max = 0.0;
    int remesh_interval = 0;
    int max_iterations = 100;
    double g_tol = 1e-4;
    double rel_j_tol = 1e-3;

    std::string output_dir = ".";
    unsigned seed = 0;
};

/// Parses the flat key=value file; with_method_list selects between the
/// single-method "method" key (run) and the "methods" list (compare).
/// Validation failures throw ConfigError naming the offending key.
RunConfig load_run_config(const std::string& path, bool with_method_list);

TriMesh build_geometry(const RunConfig& cfg);
std::unique_ptr<SensitivityProvider> build_provider(const RunConfig& cfg);
DescentConfig build_descent_config(const RunConfig& cfg);

/// Applies a method name to a copy of the configured method parameters.
UpdateMethod method_with_tag(const RunConfig& cfg, const std::string& name);

}  // namespace shapedesc
