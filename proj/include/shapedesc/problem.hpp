#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "shapedesc/mesh.hpp"

namespace shapedesc {

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllustrativeProblem {
    double C1 = 0.0;  // corner coefficient
    double C2 = 0.0;  // high-frequency coefficient
};

double f_eval(Vec2 x, const IllustrativeProblem& problem);

/// J = integral of f over the mesh, one-point centroid rule.
double objective(const TriMesh& mesh, const IllustrativeProblem& problem);

/// s_n = f(x_n) at design nodes (0 elsewhere), indexed by loop position.
std::vector<double> sensitivity(const TriMesh& mesh, const BoundaryCurve& curve,
                                const IllustrativeProblem& problem);

/// Smallest radius t > 0.31 with f(t cos(phi), t sin(phi)) = 0, bisection to
/// 1e-10 after bracketing on a 1e-3 grid. Requires C2 = 0.
double levelset_oracle(double phi, const IllustrativeProblem& problem);

/// G = (alpha / N) * sum ||theta_n|| over all boundary nodes of the curve.
double mean_boundary_displacement(const NodeVecField& theta, double alpha,
                                  const BoundaryCurve& curve);

/// Produces J and the nodal sensitivity for a given mesh/curve pair.
class SensitivityProvider {
public:
    virtual ~SensitivityProvider() = default;
    virtual double evaluate_objective(const TriMesh& mesh) const = 0;
    virtual std::vector<double> evaluate_sensitivity(const TriMesh& mesh,
                                                     const BoundaryCurve& curve) const = 0;
};

class AnalyticProvider : public SensitivityProvider {
public:
    explicit AnalyticProvider(IllustrativeProblem p) : problem_(p) {}
    double evaluate_objective(const TriMesh& mesh) const override {
        return objective(mesh, problem_);
    }
    std::vector<double> evaluate_sensitivity(const TriMesh& mesh,
                                             const BoundaryCurve& curve) const override {
        return sensitivity(mesh, curve, problem_);
    }
    const IllustrativeProblem& problem() const { return problem_; }

private:
    IllustrativeProblem problem_;
};

/// Reads the external sensitivity CSV (header "J,<value>", then rows
/// "cell_index,s_value") and serves nodal values via normalized Shepard
/// interpolation.
std::unique_ptr<SensitivityProvider> load_external_sensitivity(const std::string& path);

}  // namespace shapedesc
