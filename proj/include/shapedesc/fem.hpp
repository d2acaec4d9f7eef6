#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "shapedesc/mesh.hpp"

namespace shapedesc {

struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symmetric sparse system with Dirichlet constraints applied by symmetric
/// elimination: constrained rows/columns are zeroed (with rhs compensation),
/// the diagonal set to one and the constrained value reinserted on solve.
class SparseSystem {
public:
    explicit SparseSystem(int n);

    int size() const { return n_; }
    void add(int i, int j, double v);
    void add_rhs(int i, double v) { rhs_[i] += v; }
    double rhs(int i) const { return rhs_[i]; }
    double coeff(int i, int j) const;

    void set_dirichlet(int dof, double value);
    bool is_constrained(int dof) const;

    /// Jacobi-preconditioned conjugate gradients to a relative residual.
    std::vector<double> solve(double tol = 1e-10, int max_iter = -1) const;

    /// Dense row expansion, mainly for diagnostics and tests.
    std::vector<std::vector<double>> dense() const;

    /// Max relative symmetry defect.
    double symmetry_defect() const;

    /// y = A x with constraints applied.
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;

    std::vector<double> effective_rhs() const;

private:
    int n_ = 0;
    std::vector<std::map<int, double>> rows_;
    std::vector<double> rhs_;
    std::map<int, double> dirichlet_;
};

struct ElasticityParams {
    double lambda = 0.0;  // first Lame constant
    double mu = 1.0;      // shear modulus
    void check() const {
        if (!(mu > 0.0) || !(lambda + mu > 0.0)) throw AssemblyError("invalid Lame constants");
    }
};

struct PicardConfig {
    double p = 4.0;                    // target exponent, > 2
    std::vector<double> schedule;      // empty: built as 2, 2.5, ..., p
    double eps_grad = 1e-8;            // gradient regularization
    int max_inner = 60;
    double tol = 1e-10;                // relative change tolerance
    void check() const;
    std::vector<double> effective_schedule() const;
};

struct PicardDiagnostics {
    int total_iterations = 0;
    double final_change = 0.0;
    bool stagnated = false;
    std::vector<double> stage_changes;                 // last relative change per stage
    std::vector<std::vector<double>> stage_histories;  // all relative changes per stage
};

/// P1 stiffness for -div(kappa grad u) plus mass_coeff times the consistent
/// mass matrix; one dof per node.
SparseSystem assemble_scalar_diffusion(const TriMesh& mesh,
                                       const std::function<double(Vec2)>& conductivity,
                                       double mass_coeff = 0.0);

/// Plane-strain P1 elasticity, two dofs per node (dof = 2*node + component).
SparseSystem assemble_elasticity(const TriMesh& mesh, const ElasticityParams& params);

/// Adds the boundary traction integral of s*n over design edges of the curve,
/// trapezoidal edge quadrature, per-edge constant unit normal.
/// dofs_per_node = 2 targets a vector system; component selects the rhs slot
/// for scalar systems assembled per component.
void apply_neumann_load(SparseSystem& system, const TriMesh& mesh, const BoundaryCurve& curve,
                        const NodeField& s, bool design_only = true, int dofs_per_node = 2,
                        int component = -1, double scale = 1.0);

/// Distance from each node to the nearest boundary segment.
NodeField wall_distance(const TriMesh& mesh);

/// Vector p-Laplacian with Picard iteration over an increasing exponent
/// schedule; traction alpha*s*n on design edges, u = 0 on non-design nodes.
NodeVecField solve_p_laplacian(const TriMesh& mesh, const BoundaryCurve& curve,
                               const NodeField& s, double alpha, const PicardConfig& cfg,
                               PicardDiagnostics* diag = nullptr);

}  // namespace shapedesc
