#pragma once

#include <vector>

#include "shapedesc/fem.hpp"
#include "shapedesc/mesh.hpp"

namespace shapedesc {

struct FilterConfig {
    double sigma = 0.1;  // Gaussian width along arc length
    double cutoff() const { return 3.0 * sigma; }
    void check() const {
        if (!(sigma > 0.0)) throw SolverError("filter width must be positive");
    }
};

/// Second arc-length difference on the closed loop:
///   2 (v_{j+1}-v_j) / (h_{j+1} (h_j+h_{j+1})) - 2 (v_j-v_{j-1}) / (h_j (h_j+h_{j+1}))
std::vector<double> fd_laplace_beltrami(const BoundaryCurve& curve, const std::vector<double>& v);

/// Solves (I - A L) ubar = s on design nodes, ubar = 0 elsewhere.
std::vector<double> solve_slb(const BoundaryCurve& curve, const std::vector<double>& s, double A);

/// Componentwise (I - A L) applied to the vector right-hand side n * s.
std::vector<Vec2> solve_vlb(const BoundaryCurve& curve, const std::vector<double>& s, double A);

/// Gaussian arc-distance filter: theta_n = -sum_j w_{n,j} s_j n_j over design
/// nodes within 3 sigma, weights normalized to sum 1.
std::vector<Vec2> filter_sensitivity(const BoundaryCurve& curve, const std::vector<double>& s,
                                     const FilterConfig& cfg);

/// theta_n = -n_n s_n on design nodes, 0 elsewhere.
std::vector<Vec2> direct_sensitivity(const BoundaryCurve& curve, const std::vector<double>& s);

}  // namespace shapedesc
