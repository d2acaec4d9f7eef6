#include "shapedesc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace shapedesc {

SparseSystem::SparseSystem(int n) : n_(n), rows_(n), rhs_(n, 0.0) {}

void SparseSystem::add(int i, int j, double v) {
    rows_[i][j] += v;
}

double SparseSystem::coeff(int i, int j) const {
    auto it = rows_[i].find(j);
    return it == rows_[i].end() ? 0.0 : it->second;
}

void SparseSystem::set_dirichlet(int dof, double value) {
    auto [it, inserted] = dirichlet_.emplace(dof, value);
    if (!inserted && it->second != value) {
        throw ConstraintError("conflicting Dirichlet constraints on one dof");
    }
}

bool SparseSystem::is_constrained(int dof) const { return dirichlet_.count(dof) > 0; }

void SparseSystem::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        if (dirichlet_.count(i)) {
            y[i] = x[i];
            continue;
        }
        double acc = 0.0;
        for (const auto& [j, v] : rows_[i]) {
            if (dirichlet_.count(j)) continue;
            acc += v * x[j];
        }
        y[i] = acc;
    }
}

std::vector<double> SparseSystem::effective_rhs() const {
    std::vector<double> b = rhs_;
    for (int i = 0; i < n_; ++i) {
        if (dirichlet_.count(i)) {
            b[i] = dirichlet_.at(i);
            continue;
        }
        for (const auto& [j, v] : rows_[i]) {
            auto it = dirichlet_.find(j);
            if (it != dirichlet_.end()) b[i] -= v * it->second;
        }
    }
    return b;
}

std::vector<double> SparseSystem::solve(double tol, int max_iter) const {
    if (max_iter < 0) max_iter = 20 * n_ + 1000;
    std::vector<char> fixed(n_, 0);
    for (const auto& [d, v] : dirichlet_) fixed[d] = 1;
    std::vector<double> b = effective_rhs();

    // CSR copy of the eliminated operator: constrained dofs become identity
    // rows, so map traversal leaves the hot loop.
    std::vector<int> rowptr(n_ + 1, 0), col;
    std::vector<double> val;
    for (int i = 0; i < n_; ++i) {
        rowptr[i] = static_cast<int>(col.size());
        if (fixed[i]) {
            col.push_back(i);
            val.push_back(1.0);
            continue;
        }
        for (const auto& [j, v] : rows_[i]) {
            if (fixed[j]) continue;
            col.push_back(j);
            val.push_back(v);
        }
    }
    rowptr[n_] = static_cast<int>(col.size());

    auto spmv = [&](const std::vector<double>& xv, std::vector<double>& yv) {
        for (int i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) acc += val[k] * xv[col[k]];
            yv[i] = acc;
        }
    };

    std::vector<double> x(n_, 0.0);
    for (const auto& [d, v] : dirichlet_) x[d] = v;

    std::vector<double> diag(n_, 1.0);
    for (int i = 0; i < n_; ++i) {
        if (fixed[i]) continue;
        double d = coeff(i, i);
        diag[i] = (d > 0.0) ? d : 1.0;
    }

    std::vector<double> r(n_), z(n_), p(n_), Ap(n_);
    spmv(x, Ap);
    double bnorm = 0.0;
    for (int i = 0; i < n_; ++i) {
        r[i] = b[i] - Ap[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return x;

    auto dot = [this](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += a[i] * c[i];
        return s;
    };

    for (int i = 0; i < n_; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    double rnorm = std::sqrt(dot(r, r));
    int it = 0;
    while (rnorm / bnorm > tol) {
        if (it++ >= max_iter) {
            throw SolverError("conjugate gradients did not converge, relative residual " +
                              std::to_string(rnorm / bnorm));
        }
        spmv(p, Ap);
        double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) {
            throw SolverError("system not positive definite after elimination");
        }
        double alpha = rz / pAp;
        for (int i = 0; i < n_; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        for (int i = 0; i < n_; ++i) z[i] = r[i] / diag[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n_; ++i) p[i] = z[i] + beta * p[i];
        rnorm = std::sqrt(dot(r, r));
    }
    for (const auto& [d, v] : dirichlet_) x[d] = v;
    return x;
}

std::vector<std::vector<double>> SparseSystem::dense() const {
    std::vector<std::vector<double>> m(n_, std::vector<double>(n_, 0.0));
    for (int i = 0; i < n_; ++i) {
        for (const auto& [j, v] : rows_[i]) m[i][j] = v;
    }
    return m;
}

double SparseSystem::symmetry_defect() const {
    double worst = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (const auto& [j, v] : rows_[i]) {
            double vt = coeff(j, i);
            double scale = std::max({std::abs(v), std::abs(vt), 1e-300});
            worst = std::max(worst, std::abs(v - vt) / scale);
        }
    }
    return worst;
}

namespace {

struct P1Gradients {
    std::array<Vec2, 3> g;  // gradient of each nodal shape function
    double area;
};

P1Gradients tri_gradients(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& a = mesh.nodes[tri[0]];
    const Vec2& b = mesh.nodes[tri[1]];
    const Vec2& c = mesh.nodes[tri[2]];
    double area2 = (b - a).cross(c - a);
    P1Gradients out;
    out.area = 0.5 * area2;
    out.g[0] = Vec2{b.y - c.y, c.x - b.x} / area2;
    out.g[1] = Vec2{c.y - a.y, a.x - c.x} / area2;
    out.g[2] = Vec2{a.y - b.y, b.x - a.x} / area2;
    return out;
}

SparseSystem assemble_scalar_diffusion_impl(const TriMesh& mesh,
                                            const std::vector<double>& kappa,
                                            double mass_coeff) {
    SparseSystem sys(mesh.node_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        if (!(kappa[t] > 0.0)) throw AssemblyError("non-positive conductivity");
        auto p1 = tri_gradients(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double k = kappa[t] * p1.g[i].dot(p1.g[j]) * p1.area;
                if (mass_coeff != 0.0) {
                    k += mass_coeff * p1.area / 12.0 * (i == j ? 2.0 : 1.0);
                }
                sys.add(tri[i], tri[j], k);
            }
        }
    }
    return sys;
}

}  // namespace

SparseSystem assemble_scalar_diffusion(const TriMesh& mesh,
                                       const std::function<double(Vec2)>& conductivity,
                                       double mass_coeff) {
    std::vector<double> kappa(mesh.tri_count());
    for (int t = 0; t < mesh.tri_count(); ++t) kappa[t] = conductivity(mesh.tri_centroid(t));
    return assemble_scalar_diffusion_impl(mesh, kappa, mass_coeff);
}

SparseSystem assemble_elasticity(const TriMesh& mesh, const ElasticityParams& params) {
    params.check();
    const double lambda = params.lambda, mu = params.mu;
    SparseSystem sys(2 * mesh.node_count());
    for (int t = 0; t < mesh.tri_count(); ++t) {
        auto p1 = tri_gradients(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                double ga[2] = {p1.g[a].x, p1.g[a].y};
                double gb[2] = {p1.g[b].x, p1.g[b].y};
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) {
                        double k = lambda * ga[i] * gb[j] + mu * ga[j] * gb[i];
                        if (i == j) k += mu * p1.g[a].dot(p1.g[b]);
                        sys.add(2 * tri[a] + i, 2 * tri[b] + j, k * p1.area);
                    }
                }
            }
        }
    }
    return sys;
}

void apply_neumann_load(SparseSystem& system, const TriMesh& mesh, const BoundaryCurve& curve,
                        const NodeField& s, bool design_only, int dofs_per_node, int component,
                        double scale) {
    const int n = curve.size();
    for (int j = 0; j < n; ++j) {
        int k = curve.next(j);
        // nodes at design/fixed junctions carry design=false (both-edge rule),
        // so a segment belongs to the design part if either endpoint is design
        if (design_only && !(curve.design[j] || curve.design[k])) continue;
        int na = curve.node_ids[j], nb = curve.node_ids[k];
        Vec2 e = mesh.nodes[nb] - mesh.nodes[na];
        double len = e.norm();
        Vec2 normal = Vec2{e.y, -e.x} / len;  // outward, domain to the left
        double na_val = 0.5 * len * s[na] * scale;
        double nb_val = 0.5 * len * s[nb] * scale;
        if (dofs_per_node == 2) {
            system.add_rhs(2 * na + 0, na_val * normal.x);
            system.add_rhs(2 * na + 1, na_val * normal.y);
            system.add_rhs(2 * nb + 0, nb_val * normal.x);
            system.add_rhs(2 * nb + 1, nb_val * normal.y);
        } else {
            double nc = (component == 0) ? normal.x : normal.y;
            system.add_rhs(na, na_val * nc);
            system.add_rhs(nb, nb_val * nc);
        }
    }
}

NodeField wall_distance(const TriMesh& mesh) {
    NodeField w(mesh.nodes.size(), 0.0, "length");
    for (int i = 0; i < mesh.node_count(); ++i) {
        double best = 1e300;
        for (const auto& be : mesh.boundary_edges) {
            const Vec2& a = mesh.nodes[be.a];
            const Vec2& b = mesh.nodes[be.b];
            Vec2 ab = b - a;
            double len2 = ab.norm2();
            double t = len2 > 0.0 ? std::clamp((mesh.nodes[i] - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
            best = std::min(best, (mesh.nodes[i] - (a + t * ab)).norm());
        }
        w[i] = best;
    }
    return w;
}

void PicardConfig::check() const {
    if (!(p >= 2.0)) throw SolverError("p-Laplacian exponent must be >= 2");
    if (!(eps_grad > 0.0)) throw SolverError("gradient regularization must be positive");
    if (!schedule.empty()) {
        if (schedule.front() != 2.0) throw SolverError("exponent schedule must start at 2");
        for (std::size_t i = 1; i < schedule.size(); ++i) {
            if (!(schedule[i] > schedule[i - 1])) throw SolverError("exponent schedule must be increasing");
        }
        if (schedule.back() != p) throw SolverError("exponent schedule must end at p");
    }
}

std::vector<double> PicardConfig::effective_schedule() const {
    if (!schedule.empty()) return schedule;
    std::vector<double> sched{2.0};
    while (sched.back() + 0.5 < p - 1e-12) sched.push_back(sched.back() + 0.5);
    if (sched.back() < p) sched.push_back(p);
    return sched;
}

NodeVecField solve_p_laplacian(const TriMesh& mesh, const BoundaryCurve& curve,
                               const NodeField& s, double alpha, const PicardConfig& cfg,
                               PicardDiagnostics* diag) {
    cfg.check();
    const int n = mesh.node_count();

    // Dirichlet set: every non-design boundary node of the whole mesh.
    std::set<int> fixed;
    for (const auto& loop : boundary_loops(mesh)) {
        for (int j = 0; j < loop.size(); ++j) {
            if (!loop.design[j]) fixed.insert(loop.node_ids[j]);
        }
    }
    if (fixed.empty()) throw SolverError("p-Laplacian requires a non-design boundary part");

    NodeVecField u(mesh.nodes.size());
    double first_norm = -1.0;
    PicardDiagnostics local;
    PicardDiagnostics& d = diag ? *diag : local;

    for (double q : cfg.effective_schedule()) {
        std::vector<double> changes;
        // undamped Picard oscillates for q noticeably above 2; 1/(q-1) damping
        // keeps the fixed point (and its homogeneity) while restoring contraction
        const double tau = 1.0 / (q - 1.0);
        for (int it = 0; it < cfg.max_inner; ++it) {
            std::vector<double> omega(mesh.tri_count());
            for (int t = 0; t < mesh.tri_count(); ++t) {
                auto p1 = tri_gradients(mesh, t);
                const auto& tri = mesh.triangles[t];
                Vec2 gx{0, 0}, gy{0, 0};
                for (int a = 0; a < 3; ++a) {
                    gx += u[tri[a]].x * p1.g[a];
                    gy += u[tri[a]].y * p1.g[a];
                }
                double g2 = gx.norm2() + gy.norm2() + cfg.eps_grad * cfg.eps_grad;
                omega[t] = std::pow(g2, (q - 2.0) / 2.0);
            }
            SparseSystem base = assemble_scalar_diffusion_impl(mesh, omega, 0.0);

            NodeVecField u_new(mesh.nodes.size());
            for (int comp = 0; comp < 2; ++comp) {
                SparseSystem sys = base;
                apply_neumann_load(sys, mesh, curve, s, true, 1, comp, alpha);
                for (int f : fixed) sys.set_dirichlet(f, 0.0);
                auto x = sys.solve(1e-12);
                for (int i = 0; i < n; ++i) {
                    if (comp == 0) u_new[i].x = x[i];
                    else u_new[i].y = x[i];
                }
            }

            for (int i = 0; i < n; ++i) u_new[i] = u[i] + tau * (u_new[i] - u[i]);
            double diff2 = 0.0, norm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                diff2 += (u_new[i] - u[i]).norm2();
                norm2 += u_new[i].norm2();
            }
            double change = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
            changes.push_back(change);
            d.total_iterations++;
            u = u_new;

            double unorm = std::sqrt(norm2);
            if (first_norm < 0.0 && unorm > 0.0) first_norm = unorm;
            if (first_norm > 0.0 && unorm > 1e3 * first_norm) {
                throw SolverError("p-Laplacian Picard iteration diverged");
            }
            if (change <= cfg.tol) break;
            if (it == cfg.max_inner - 1) d.stagnated = true;
        }
        d.stage_changes.push_back(changes.empty() ? 0.0 : changes.back());
        d.stage_histories.push_back(changes);
        d.final_change = changes.empty() ? 0.0 : changes.back();
    }
    return u;
}

}  // namespace shapedesc
