#include "shapedesc/boundary_ops.hpp"

#include <algorithm>
#include <cmath>

namespace shapedesc {

// All per-node vectors in this module are indexed by loop position.

namespace {

/// Dense LU solve with partial pivoting, used for the small cyclic boundary
/// systems.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        }
        if (std::abs(a[piv][k]) < 1e-300) throw SolverError("singular boundary system");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            double f = a[i][k] / a[k][k];
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
        x[i] = acc / a[i][i];
    }
    return x;
}

struct StencilCoeffs {
    double c_minus, c_plus;  // L v = c_minus v_{j-1} - (c_minus+c_plus) v_j + c_plus v_{j+1}
};

StencilCoeffs stencil(const BoundaryCurve& curve, int j) {
    double hj = curve.spacing[j];
    double hn = curve.spacing[curve.next(j)];
    return {2.0 / (hj * (hj + hn)), 2.0 / (hn * (hj + hn))};
}

std::vector<double> solve_helmholtz(const BoundaryCurve& curve, const std::vector<double>& rhs,
                                    double A) {
    if (A < 0.0) throw SolverError("Laplace-Beltrami conductivity must be non-negative");
    const int n = curve.size();
    std::vector<std::vector<double>> mat(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (!curve.design[j]) {
            mat[j][j] = 1.0;
            continue;
        }
        auto st = stencil(curve, j);
        mat[j][j] = 1.0 + A * (st.c_minus + st.c_plus);
        mat[j][curve.prev(j)] -= A * st.c_minus;
        mat[j][curve.next(j)] -= A * st.c_plus;
        b[j] = rhs[j];
    }
    auto u = dense_solve(std::move(mat), std::move(b));
    // pivoting can smear roundoff into the Dirichlet rows; their value is 0 by
    // construction, so pin it
    for (int j = 0; j < n; ++j) {
        if (!curve.design[j]) u[j] = 0.0;
    }
    return u;
}

}  // namespace

std::vector<double> fd_laplace_beltrami(const BoundaryCurve& curve, const std::vector<double>& v) {
    const int n = curve.size();
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
        auto st = stencil(curve, j);
        out[j] = st.c_plus * (v[curve.next(j)] - v[j]) - st.c_minus * (v[j] - v[curve.prev(j)]);
    }
    return out;
}

std::vector<double> solve_slb(const BoundaryCurve& curve, const std::vector<double>& s, double A) {
    return solve_helmholtz(curve, s, A);
}

std::vector<Vec2> solve_vlb(const BoundaryCurve& curve, const std::vector<double>& s, double A) {
    const int n = curve.size();
    std::vector<double> rx(n, 0.0), ry(n, 0.0);
    for (int j = 0; j < n; ++j) {
        rx[j] = curve.normals[j].x * s[j];
        ry[j] = curve.normals[j].y * s[j];
    }
    auto ux = solve_helmholtz(curve, rx, A);
    auto uy = solve_helmholtz(curve, ry, A);
    std::vector<Vec2> out(n);
    for (int j = 0; j < n; ++j) out[j] = {ux[j], uy[j]};
    return out;
}

std::vector<Vec2> filter_sensitivity(const BoundaryCurve& curve, const std::vector<double>& s,
                                     const FilterConfig& cfg) {
    cfg.check();
    const int n = curve.size();
    std::vector<double> pos(n, 0.0);
    for (int j = 1; j < n; ++j) pos[j] = pos[j - 1] + curve.spacing[j];
    const double L = pos.back() + curve.spacing[0];

    std::vector<Vec2> out(n, Vec2{0, 0});
    const double cutoff = cfg.cutoff();
    for (int j = 0; j < n; ++j) {
        if (!curve.design[j]) continue;
        double wsum = 0.0;
        Vec2 acc{0, 0};
        for (int k = 0; k < n; ++k) {
            if (!curve.design[k]) continue;
            double d = std::abs(pos[j] - pos[k]);
            d = std::min(d, L - d);
            if (d > cutoff) continue;
            double w = std::exp(-d * d / (2.0 * cfg.sigma * cfg.sigma));
            wsum += w;
            acc += w * s[k] * curve.normals[k];
        }
        out[j] = (-1.0 / wsum) * acc;  // wsum >= weight of k=j which is 1
    }
    return out;
}

std::vector<Vec2> direct_sensitivity(const BoundaryCurve& curve, const std::vector<double>& s) {
    const int n = curve.size();
    std::vector<Vec2> out(n, Vec2{0, 0});
    for (int j = 0; j < n; ++j) {
        if (curve.design[j]) out[j] = -s[j] * curve.normals[j];
    }
    return out;
}

}  // namespace shapedesc
