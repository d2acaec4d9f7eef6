#pragma once

#include <string>
#include <vector>

#include "shapedesc/boundary_ops.hpp"
#include "shapedesc/fem.hpp"
#include "shapedesc/mesh.hpp"

namespace shapedesc {

enum class MethodTag { DS, FS, SLB, VLB, SP_SM, SP_WD, PHD };

enum class ExtensionKind { Elasticity, WallDistanceDiffusion };

std::string method_name(MethodTag tag);
MethodTag parse_method(const std::string& name);

struct UpdateMethod {
    MethodTag tag = MethodTag::DS;
    double sigma = 0.1;                // FS
    double conductivity = 0.1;         // SLB / VLB
    ElasticityParams elasticity;       // SP-SM and elasticity extension
    double wd_epsilon = -1.0;          // SP-WD; < 0 means 1e-3 * domain diameter
    PicardConfig picard;               // PHD
    ExtensionKind extension = ExtensionKind::WallDistanceDiffusion;

    void check() const;
};

struct UpdateResult {
    NodeVecField theta;                 // domain update direction on all nodes
    std::vector<Vec2> theta_gamma;      // restriction to the curve, by loop position
    double predicted_decrease = 0.0;    // first-order change of J per unit step
    std::vector<std::string> diagnostics;
};

/// Extends boundary data into the domain by the chosen PDE; Dirichlet data is
/// theta_gamma on the curve's nodes and zero on every other boundary node.
NodeVecField extend_to_domain(const TriMesh& mesh, const BoundaryCurve& curve,
                              const std::vector<Vec2>& theta_gamma, ExtensionKind constitutive,
                              const ElasticityParams& params = {}, double wd_epsilon = -1.0);

/// Trapezoidal quadrature of theta^Gamma . n s over the design part of the curve.
double predicted_decrease(const TriMesh& mesh, const BoundaryCurve& curve,
                          const std::vector<double>& s, const std::vector<Vec2>& theta_gamma);

/// Turns a sensitivity distribution into a domain update direction.
/// For PHD, alpha_hint scales the traction and theta = -u / alpha_hint.
UpdateResult compute_update(const TriMesh& mesh, const BoundaryCurve& curve,
                            const std::vector<double>& s, const UpdateMethod& method,
                            double alpha_hint = 1.0);

/// Mesh diameter (bounding-box diagonal), the length scale for defaults.
double domain_diameter(const TriMesh& mesh);

}  // namespace shapedesc
