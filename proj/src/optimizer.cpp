#include "shapedesc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shapedesc/remesh.hpp"

namespace shapedesc {

void LineSearchConfig::check() const {
    if (!(alpha_min > 0.0)) throw StepError("alpha_min must be positive");
    if (!(expansion > 1.0)) throw StepError("expansion factor must exceed 1");
    if (!(shrink_tol > 0.0 && shrink_tol < 1.0)) throw StepError("shrink tolerance must be in (0, 1)");
    if (!(quality_gate_deg > 0.0 && quality_gate_deg < 60.0)) {
        throw StepError("quality gate must be in (0, 60) degrees");
    }
}

void DescentConfig::check() const {
    method.check();
    line_search.check();
    if (step_mode == StepMode::MaxDisplacement && theta_max < 0.0) {
        throw StepError("theta_max must be positive in max-displacement mode");
    }
    if (max_iterations < 1) throw StepError("max_iterations must be at least 1");
    if (remesh_interval < 0) throw StepError("remesh interval must be non-negative");
    if (!(g_tol >= 0.0) || !(rel_j_tol >= 0.0)) throw StepError("stop tolerances must be non-negative");
}

std::string stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::MeanDisplacementSmall: return "mean-displacement-small";
        case StopReason::ObjectiveStagnant: return "objective-stagnant";
        case StopReason::StepFailure: return "step-failure";
        case StopReason::MaxIterations: return "max-iterations";
        case StopReason::Aborted: return "aborted";
    }
    return "?";
}

double max_displacement_step(const NodeVecField& theta, double theta_max) {
    if (!(theta_max > 0.0)) throw StepError("theta_max must be positive");
    double max_norm = 0.0;
    for (const auto& v : theta.values) max_norm = std::max(max_norm, v.norm());
    if (max_norm == 0.0) throw StepError("update direction is identically zero");
    return theta_max / max_norm;
}

double line_search(const TriMesh& mesh, const NodeVecField& theta,
                   const std::function<double(const TriMesh&)>& evaluate_J,
                   const LineSearchConfig& cfg,
                   const std::function<double(double)>& step_map, bool* gate_limited) {
    cfg.check();
    if (!(cfg.alpha0 > 0.0)) throw StepError("line search needs a positive alpha0");
    if (gate_limited) *gate_limited = false;

    auto factor = [&](double a) { return step_map ? step_map(a) : a; };
    auto trial = [&](double a) { return displace(mesh, theta, factor(a)); };
    auto feasible = [&](const TriMesh& m) {
        return all_areas_positive(m) && min_quality(m) >= cfg.quality_gate_deg &&
               boundary_simple(m);
    };
    auto hit_gate = [&] {
        if (gate_limited) *gate_limited = true;
    };

    const double J0 = evaluate_J(mesh);

    // Shrink until some step is both feasible and decreasing.
    double lo = cfg.alpha0;
    double J_lo = 0.0;
    bool found = false;
    while (lo >= cfg.alpha_min) {
        TriMesh m = trial(lo);
        if (feasible(m)) {
            J_lo = evaluate_J(m);
            if (J_lo < J0) {
                found = true;
                break;
            }
        } else {
            hit_gate();
        }
        lo *= 0.5;
    }
    if (!found) return 0.0;

    // Expand until J increases or the quality gate trips.
    double hi = -1.0;
    for (int k = 0; k < cfg.max_expansions; ++k) {
        double b = lo * cfg.expansion;
        TriMesh m = trial(b);
        if (!feasible(m)) {
            hit_gate();
            hi = b;
            break;
        }
        double Jb = evaluate_J(m);
        if (Jb >= J_lo) {
            hi = b;
            break;
        }
        lo = b;
        J_lo = Jb;
    }
    if (hi < 0.0) return lo;  // never stopped decreasing within the expansion cap

    // Bisect toward the minimizer from below: only accept midpoints that are
    // feasible and still decrease J.
    while ((hi - lo) / hi > cfg.shrink_tol) {
        double mid = 0.5 * (lo + hi);
        TriMesh m = trial(mid);
        if (feasible(m)) {
            double Jm = evaluate_J(m);
            if (Jm < J_lo) {
                lo = mid;
                J_lo = Jm;
                continue;
            }
        } else {
            hit_gate();
        }
        hi = mid;
    }
    return lo;
}

namespace {

/// Loop-position index of the curve carrying design nodes.
const BoundaryCurve& design_curve(const std::vector<BoundaryCurve>& loops) {
    for (const auto& c : loops) {
        for (bool d : c.design) {
            if (d) return c;
        }
    }
    throw EvaluationError("mesh has no design boundary");
}

double mean_boundary_spacing(const BoundaryCurve& curve) {
    double acc = 0.0;
    for (double h : curve.spacing) acc += h;
    return acc / curve.size();
}

}  // namespace

DescentResult run_descent(const SensitivityProvider& provider, const TriMesh& mesh0,
                          const DescentConfig& cfg) {
    cfg.check();
    DescentResult result;
    result.mesh = mesh0;
    result.reason = StopReason::MaxIterations;

    const bool is_phd = cfg.method.tag == MethodTag::PHD;
    const double phd_power = is_phd ? 1.0 / (cfg.method.picard.p - 1.0) : 1.0;
    // The discrete p-Laplacian is (p-1)-homogeneous, so the displacement for a
    // trial step alpha is alpha^{1/(p-1)} * theta computed at alpha_hint = 1.
    auto step_map = [&](double a) { return is_phd ? std::pow(a, phd_power) : a; };
    // Inverse of step_map: the alpha whose displacement multiplier equals f.
    auto step_map_inv = [&](double f) { return is_phd ? std::pow(f, cfg.method.picard.p - 1.0) : f; };

    double prev_J = std::numeric_limits<double>::quiet_NaN();
    bool prev_clean = false;  // previous iteration took a step and did not remesh
    double fixed_alpha = -1.0;
    int consecutive_zero = 0;

    try {
        for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
            auto loops = boundary_loops(result.mesh);
            const BoundaryCurve& curve = design_curve(loops);

            const double J = provider.evaluate_objective(result.mesh);
            const auto s = provider.evaluate_sensitivity(result.mesh, curve);
            UpdateResult upd = compute_update(result.mesh, curve, s, cfg.method, 1.0);

            double theta_max_norm = 0.0;
            for (const auto& v : upd.theta.values) theta_max_norm = std::max(theta_max_norm, v.norm());

            IterationRecord rec;
            rec.iteration = iter;
            rec.J = J;
            rec.min_quality_deg = min_quality(result.mesh);
            rec.n_boundary_nodes = curve.size();
            rec.diagnostics = upd.diagnostics;

            if (theta_max_norm == 0.0) {
                result.records.push_back(rec);
                result.reason = StopReason::MeanDisplacementSmall;
                break;
            }

            const double diameter = domain_diameter(result.mesh);
            double alpha = 0.0;
            bool gate_limited = false;
            if (cfg.step_mode == StepMode::LineSearch) {
                LineSearchConfig ls = cfg.line_search;
                if (!(ls.alpha0 > 0.0)) {
                    ls.alpha0 = step_map_inv(max_displacement_step(upd.theta, 0.02 * diameter));
                }
                alpha = line_search(
                    result.mesh, upd.theta,
                    [&](const TriMesh& m) { return provider.evaluate_objective(m); }, ls, step_map,
                    &gate_limited);
            } else {
                if (fixed_alpha < 0.0) {
                    double tm = cfg.theta_max > 0.0 ? cfg.theta_max : 0.02 * diameter;
                    fixed_alpha = step_map_inv(max_displacement_step(upd.theta, tm));
                }
                alpha = fixed_alpha;
            }

            rec.alpha = alpha;
            rec.G = mean_boundary_displacement(upd.theta, step_map(alpha), curve);

            bool want_remesh = false;
            if (alpha == 0.0) {
                ++consecutive_zero;
                if (consecutive_zero >= 2) {
                    result.records.push_back(rec);
                    result.reason = StopReason::StepFailure;
                    break;
                }
                // one remesh retry before giving up on the next zero step
                if (cfg.remesh_interval > 0) want_remesh = true;
            } else {
                consecutive_zero = 0;
                result.mesh = displace(result.mesh, upd.theta, step_map(alpha));
                if (cfg.remesh_interval > 0 && iter % cfg.remesh_interval == 0) want_remesh = true;
            }

            if (want_remesh) {
                double h = cfg.remesh_h > 0.0 ? cfg.remesh_h : mean_boundary_spacing(curve);
                result.mesh = remesh(boundary_polylines(result.mesh), h);
                rec.remeshed = true;
            }
            result.records.push_back(rec);
            if (cfg.snapshot) cfg.snapshot(iter, result.mesh);

            // A gate-limited step says the mesh blocked progress, not that the
            // shape converged, so convergence stops only apply to clean steps.
            if (alpha > 0.0 && !gate_limited && rec.G < cfg.g_tol) {
                result.reason = StopReason::MeanDisplacementSmall;
                break;
            }
            if (alpha > 0.0 && !gate_limited && prev_clean && std::isfinite(prev_J) &&
                prev_J != 0.0 && std::abs(J - prev_J) / std::abs(prev_J) < cfg.rel_j_tol) {
                result.reason = StopReason::ObjectiveStagnant;
                break;
            }
            prev_J = J;
            prev_clean = alpha > 0.0 && !rec.remeshed;
        }
    } catch (const std::exception& e) {
        result.reason = StopReason::Aborted;
        result.message = e.what();
    }
    return result;
}

}  // namespace shapedesc
