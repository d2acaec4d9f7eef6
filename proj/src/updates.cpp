#include "shapedesc/updates.hpp"

#include <algorithm>
#include <cmath>

namespace shapedesc {

std::string method_name(MethodTag tag) {
    switch (tag) {
        case MethodTag::DS: return "DS";
        case MethodTag::FS: return "FS";
        case MethodTag::SLB: return "SLB";
        case MethodTag::VLB: return "VLB";
        case MethodTag::SP_SM: return "SP-SM";
        case MethodTag::SP_WD: return "SP-WD";
        case MethodTag::PHD: return "PHD";
    }
    return "?";
}

MethodTag parse_method(const std::string& name) {
    if (name == "DS") return MethodTag::DS;
    if (name == "FS") return MethodTag::FS;
    if (name == "SLB") return MethodTag::SLB;
    if (name == "VLB") return MethodTag::VLB;
    if (name == "SP-SM" || name == "SP_SM") return MethodTag::SP_SM;
    if (name == "SP-WD" || name == "SP_WD") return MethodTag::SP_WD;
    if (name == "PHD") return MethodTag::PHD;
    throw std::invalid_argument("unknown update method: " + name);
}

void UpdateMethod::check() const {
    switch (tag) {
        case MethodTag::FS:
            if (!(sigma > 0.0)) throw SolverError("FS requires sigma > 0");
            break;
        case MethodTag::SLB:
        case MethodTag::VLB:
            if (conductivity < 0.0) throw SolverError("conductivity must be non-negative");
            break;
        case MethodTag::SP_SM:
            elasticity.check();
            break;
        case MethodTag::SP_WD:
            if (wd_epsilon == 0.0) throw SolverError("wall-distance epsilon must be positive");
            break;
        case MethodTag::PHD:
            picard.check();
            break;
        default:
            break;
    }
}

double domain_diameter(const TriMesh& mesh) {
    // max pairwise distance over boundary nodes; the boundary attains the
    // diameter, and unlike a bounding box this is rotation invariant
    std::vector<int> ids;
    {
        std::vector<char> seen(mesh.nodes.size(), 0);
        for (const auto& be : mesh.boundary_edges) seen[be.a] = seen[be.b] = 1;
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (seen[i]) ids.push_back(static_cast<int>(i));
    }
    if (ids.empty()) {
        for (int i = 0; i < mesh.node_count(); ++i) ids.push_back(i);
    }
    double best = 0.0;
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            best = std::max(best, (mesh.nodes[ids[a]] - mesh.nodes[ids[b]]).norm2());
        }
    }
    return std::sqrt(best);
}

namespace {

double effective_epsilon(const TriMesh& mesh, double wd_epsilon) {
    return wd_epsilon > 0.0 ? wd_epsilon : 1e-3 * domain_diameter(mesh);
}

double segment_distance(const TriMesh& mesh, const Vec2& p) {
    double best = 1e300;
    for (const auto& be : mesh.boundary_edges) {
        const Vec2& a = mesh.nodes[be.a];
        const Vec2& b = mesh.nodes[be.b];
        Vec2 ab = b - a;
        double len2 = ab.norm2();
        double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (p - (a + t * ab)).norm());
    }
    return best;
}

/// Dirichlet values for the whole boundary: theta_gamma on the curve, zero on
/// every other boundary node.
std::vector<std::pair<int, Vec2>> boundary_dirichlet(const TriMesh& mesh,
                                                     const BoundaryCurve& curve,
                                                     const std::vector<Vec2>& theta_gamma) {
    std::vector<std::pair<int, Vec2>> out;
    std::vector<char> on_curve(mesh.node_count(), 0);
    for (int j = 0; j < curve.size(); ++j) {
        on_curve[curve.node_ids[j]] = 1;
        out.emplace_back(curve.node_ids[j], theta_gamma[j]);
    }
    for (const auto& be : mesh.boundary_edges) {
        for (int nid : {be.a, be.b}) {
            if (!on_curve[nid]) {
                on_curve[nid] = 1;
                out.emplace_back(nid, Vec2{0, 0});
            }
        }
    }
    return out;
}

/// Scatters a loop-position vector to a field over global node ids.
NodeField node_field_from_positions(const TriMesh& mesh, const BoundaryCurve& curve,
                                    const std::vector<double>& s) {
    NodeField out(mesh.nodes.size());
    for (int j = 0; j < curve.size(); ++j) out[curve.node_ids[j]] = s[j];
    return out;
}

std::vector<int> fixed_boundary_nodes(const TriMesh& mesh, const BoundaryCurve& curve) {
    std::vector<char> design(mesh.node_count(), 0), on_boundary(mesh.node_count(), 0);
    for (int j = 0; j < curve.size(); ++j) {
        if (curve.design[j]) design[curve.node_ids[j]] = 1;
    }
    for (const auto& be : mesh.boundary_edges) {
        on_boundary[be.a] = 1;
        on_boundary[be.b] = 1;
    }
    std::vector<int> fixed;
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (on_boundary[i] && !design[i]) fixed.push_back(i);
    }
    return fixed;
}

}  // namespace

NodeVecField extend_to_domain(const TriMesh& mesh, const BoundaryCurve& curve,
                              const std::vector<Vec2>& theta_gamma, ExtensionKind constitutive,
                              const ElasticityParams& params, double wd_epsilon) {
    auto dirichlet = boundary_dirichlet(mesh, curve, theta_gamma);
    NodeVecField theta(mesh.nodes.size());

    if (constitutive == ExtensionKind::Elasticity) {
        SparseSystem sys = assemble_elasticity(mesh, params);
        for (const auto& [nid, v] : dirichlet) {
            sys.set_dirichlet(2 * nid + 0, v.x);
            sys.set_dirichlet(2 * nid + 1, v.y);
        }
        auto x = sys.solve(1e-13);
        for (int i = 0; i < mesh.node_count(); ++i) theta[i] = {x[2 * i], x[2 * i + 1]};
    } else {
        double eps = effective_epsilon(mesh, wd_epsilon);
        auto kappa = [&](Vec2 p) { return 1.0 / (segment_distance(mesh, p) + eps); };
        for (int comp = 0; comp < 2; ++comp) {
            SparseSystem sys = assemble_scalar_diffusion(mesh, kappa);
            for (const auto& [nid, v] : dirichlet) {
                sys.set_dirichlet(nid, comp == 0 ? v.x : v.y);
            }
            auto x = sys.solve(1e-13);
            for (int i = 0; i < mesh.node_count(); ++i) {
                if (comp == 0) theta[i].x = x[i];
                else theta[i].y = x[i];
            }
        }
    }
    return theta;
}

double predicted_decrease(const TriMesh& mesh, const BoundaryCurve& curve,
                          const std::vector<double>& s, const std::vector<Vec2>& theta_gamma) {
    double acc = 0.0;
    for (int j = 0; j < curve.size(); ++j) {
        int k = curve.next(j);
        if (!(curve.design[j] && curve.design[k])) continue;
        int na = curve.node_ids[j], nb = curve.node_ids[k];
        Vec2 e = mesh.nodes[nb] - mesh.nodes[na];
        double len = e.norm();
        Vec2 normal = Vec2{e.y, -e.x} / len;
        acc += 0.5 * len * (theta_gamma[j].dot(normal) * s[j] + theta_gamma[k].dot(normal) * s[k]);
    }
    return acc;
}

UpdateResult compute_update(const TriMesh& mesh, const BoundaryCurve& curve,
                            const std::vector<double>& s, const UpdateMethod& method,
                            double alpha_hint) {
    method.check();
    UpdateResult result;
    const int n = curve.size();

    auto finish_boundary_method = [&](std::vector<Vec2> theta_gamma) {
        result.theta = extend_to_domain(mesh, curve, theta_gamma, method.extension,
                                        method.elasticity, method.wd_epsilon);
        result.theta_gamma = std::move(theta_gamma);
    };

    switch (method.tag) {
        case MethodTag::DS:
            finish_boundary_method(direct_sensitivity(curve, s));
            break;
        case MethodTag::FS: {
            FilterConfig fc;
            fc.sigma = method.sigma;
            finish_boundary_method(filter_sensitivity(curve, s, fc));
            break;
        }
        case MethodTag::SLB: {
            auto ubar = solve_slb(curve, s, method.conductivity);
            std::vector<Vec2> tg(n, Vec2{0, 0});
            for (int j = 0; j < n; ++j) {
                if (curve.design[j]) tg[j] = -ubar[j] * curve.normals[j];
            }
            finish_boundary_method(std::move(tg));
            break;
        }
        case MethodTag::VLB: {
            auto ug = solve_vlb(curve, s, method.conductivity);
            std::vector<Vec2> tg(n, Vec2{0, 0});
            for (int j = 0; j < n; ++j) {
                if (curve.design[j]) tg[j] = -1.0 * ug[j];
            }
            finish_boundary_method(std::move(tg));
            break;
        }
        case MethodTag::SP_SM: {
            auto fixed = fixed_boundary_nodes(mesh, curve);
            if (fixed.empty()) throw SolverError("SP-SM requires a non-design boundary part");
            SparseSystem sys = assemble_elasticity(mesh, method.elasticity);
            apply_neumann_load(sys, mesh, curve, node_field_from_positions(mesh, curve, s));
            for (int f : fixed) {
                sys.set_dirichlet(2 * f + 0, 0.0);
                sys.set_dirichlet(2 * f + 1, 0.0);
            }
            auto x = sys.solve(1e-13);
            result.theta = NodeVecField(mesh.nodes.size());
            for (int i = 0; i < mesh.node_count(); ++i) {
                result.theta[i] = {-x[2 * i], -x[2 * i + 1]};
            }
            break;
        }
        case MethodTag::SP_WD: {
            auto fixed = fixed_boundary_nodes(mesh, curve);
            double eps = effective_epsilon(mesh, method.wd_epsilon);
            auto kappa = [&](Vec2 p) { return 1.0 / (segment_distance(mesh, p) + eps); };
            NodeField sf = node_field_from_positions(mesh, curve, s);
            result.theta = NodeVecField(mesh.nodes.size());
            for (int comp = 0; comp < 2; ++comp) {
                SparseSystem sys = assemble_scalar_diffusion(mesh, kappa);
                apply_neumann_load(sys, mesh, curve, sf, true, 1, comp);
                for (int f : fixed) sys.set_dirichlet(f, 0.0);
                auto x = sys.solve(1e-13);
                for (int i = 0; i < mesh.node_count(); ++i) {
                    if (comp == 0) result.theta[i].x = -x[i];
                    else result.theta[i].y = -x[i];
                }
            }
            break;
        }
        case MethodTag::PHD: {
            PicardDiagnostics pd;
            NodeField sf = node_field_from_positions(mesh, curve, s);
            auto u = solve_p_laplacian(mesh, curve, sf, alpha_hint, method.picard, &pd);
            result.theta = NodeVecField(mesh.nodes.size());
            for (int i = 0; i < mesh.node_count(); ++i) {
                result.theta[i] = (-1.0 / alpha_hint) * u[i];
            }
            result.diagnostics.push_back("picard iterations: " + std::to_string(pd.total_iterations));
            if (pd.stagnated) result.diagnostics.push_back("picard stagnated at the inner cap");
            break;
        }
    }

    if (result.theta_gamma.empty()) {
        result.theta_gamma.resize(n);
        for (int j = 0; j < n; ++j) result.theta_gamma[j] = result.theta[curve.node_ids[j]];
    }
    result.predicted_decrease = predicted_decrease(mesh, curve, s, result.theta_gamma);
    return result;
}

}  // namespace shapedesc
