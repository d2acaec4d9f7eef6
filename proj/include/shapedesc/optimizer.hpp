#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shapedesc/problem.hpp"
#include "shapedesc/updates.hpp"

namespace shapedesc {

struct StepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StepMode { LineSearch, MaxDisplacement };

struct LineSearchConfig {
    double alpha0 = 0.0;          // <= 0: derived from 2% of the domain diameter
    double expansion = 2.0;       // bracket growth factor
    double shrink_tol = 1e-2;     // relative bracket width at which bisection stops
    double alpha_min = 1e-6;      // below this the search reports failure (0)
    double quality_gate_deg = 10.0;
    int max_expansions = 60;
    void check() const;
};

struct DescentConfig {
    UpdateMethod method;
    StepMode step_mode = StepMode::LineSearch;
    LineSearchConfig line_search;
    double theta_max = 0.0;       // max-displacement mode; <= 0: 2% of diameter
    int remesh_interval = 0;      // remesh every k iterations; 0 = never
    int max_iterations = 100;
    double g_tol = 1e-4;          // stop when the mean boundary displacement drops below
    double rel_j_tol = 1e-3;      // stop when |dJ|/|J| drops below (0.1%)
    double remesh_h = 0.0;        // target spacing when remeshing; <= 0: mean boundary spacing
    std::function<void(int iteration, const TriMesh& mesh)> snapshot;  // after each iteration
    void check() const;
};

struct IterationRecord {
    int iteration = 0;
    double J = 0.0;
    double G = 0.0;
    double alpha = 0.0;
    double min_quality_deg = 0.0;
    int n_boundary_nodes = 0;
    bool remeshed = false;  // a remesh happened at the end of this iteration
    std::vector<std::string> diagnostics;
};

enum class StopReason {
    MeanDisplacementSmall,  // G < g_tol
    ObjectiveStagnant,      // relative J change below rel_j_tol
    StepFailure,            // alpha = 0 twice in a row (after one remesh retry)
    MaxIterations,
    Aborted,                // remesh or solver error; message holds the reason
};

std::string stop_reason_name(StopReason reason);

struct DescentResult {
    std::vector<IterationRecord> records;
    TriMesh mesh;
    StopReason reason = StopReason::MaxIterations;
    std::string message;
};

/// Divide-and-conquer step selection: expand alpha0 by cfg.expansion until J
/// increases or the mesh quality gate trips, then bisect toward the minimizer
/// from below. Returns 0 when no step >= alpha_min decreases J. step_map, when
/// given, turns a trial alpha into the actual displacement multiplier (used by
/// the p-harmonic update, whose displacement scales as alpha^{1/(p-1)}).
double line_search(const TriMesh& mesh, const NodeVecField& theta,
                   const std::function<double(const TriMesh&)>& evaluate_J,
                   const LineSearchConfig& cfg,
                   const std::function<double(double)>& step_map = {},
                   bool* gate_limited = nullptr);

/// alpha such that alpha * max||theta|| = theta_max exactly.
double max_displacement_step(const NodeVecField& theta, double theta_max);

/// Steepest-descent loop: evaluate (J, s), compute the update, pick a step,
/// displace, optionally remesh, log. Errors abort with partial records kept.
DescentResult run_descent(const SensitivityProvider& provider, const TriMesh& mesh0,
                          const DescentConfig& cfg);

}  // namespace shapedesc
