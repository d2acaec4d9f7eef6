#include "shapedesc/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace shapedesc {

double f_eval(Vec2 x, const IllustrativeProblem& p) {
    double x1 = x.x, x2 = x.y;
    double f = 2.0 * x1 * x1 * x1 * x1 + x2 * x2 * x2 * x2 - x1 * x1 - 4.0 * x2 * x2;
    f -= 3.0 * p.C1 * std::abs(std::max(x1, x2));
    f += p.C2 / 10.0 * (std::sin(50.0 * x1) + std::sin(50.0 * x2));
    return f;
}

double objective(const TriMesh& mesh, const IllustrativeProblem& p) {
    return integrate_domain(mesh, [&](Vec2 x) { return f_eval(x, p); });
}

std::vector<double> sensitivity(const TriMesh& mesh, const BoundaryCurve& curve,
                                const IllustrativeProblem& p) {
    std::vector<double> s(curve.size(), 0.0);
    for (int j = 0; j < curve.size(); ++j) {
        if (curve.design[j]) s[j] = f_eval(mesh.nodes[curve.node_ids[j]], p);
    }
    return s;
}

double levelset_oracle(double phi, const IllustrativeProblem& p) {
    if (p.C2 != 0.0) throw OracleError("level-set oracle requires C2 = 0");
    const double c = std::cos(phi), sn = std::sin(phi);
    auto g = [&](double t) { return f_eval({t * c, t * sn}, p); };

    const double t_lo = 0.31, t_hi = 4.0, grid = 1e-3;
    double a = t_lo, fa = g(a);
    double b = 0.0, fb = 0.0;
    bool found = false;
    for (double t = t_lo + grid; t <= t_hi + 0.5 * grid; t += grid) {
        double ft = g(t);
        if (fa == 0.0) return a;
        if ((fa < 0.0) != (ft < 0.0)) {
            b = t;
            fb = ft;
            found = true;
            break;
        }
        a = t;
        fa = ft;
    }
    if (!found) throw OracleError("no level-set sign change along ray");

    while (b - a > 1e-10) {
        double m = 0.5 * (a + b);
        double fm = g(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    (void)fb;
    return 0.5 * (a + b);
}

double mean_boundary_displacement(const NodeVecField& theta, double alpha,
                                  const BoundaryCurve& curve) {
    double acc = 0.0;
    for (int nid : curve.node_ids) acc += theta[nid].norm();
    return alpha * acc / curve.size();
}

namespace {

class ExternalProvider : public SensitivityProvider {
public:
    ExternalProvider(double J, std::vector<double> cell_s) : J_(J), cell_s_(std::move(cell_s)) {}

    double evaluate_objective(const TriMesh&) const override { return J_; }

    std::vector<double> evaluate_sensitivity(const TriMesh& mesh,
                                             const BoundaryCurve& curve) const override {
        if (cell_s_.size() != static_cast<std::size_t>(mesh.tri_count())) {
            throw ParseError("sensitivity row count does not match mesh triangle count");
        }
        CellField cf(cell_s_.size());
        cf.values = cell_s_;
        NodeField nodal = shepard_to_nodes(mesh, cf, /*normalized=*/true);
        std::vector<double> s(curve.size(), 0.0);
        for (int j = 0; j < curve.size(); ++j) {
            if (curve.design[j]) s[j] = nodal[curve.node_ids[j]];
        }
        return s;
    }

private:
    double J_;
    std::vector<double> cell_s_;
};

}  // namespace

std::unique_ptr<SensitivityProvider> load_external_sensitivity(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sensitivity file: " + path);
    std::string line;
    int lineno = 0;

    auto fail = [&](const std::string& what) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + what);
    };

    if (!std::getline(in, line)) fail("missing header");
    ++lineno;
    double J = 0.0;
    {
        std::istringstream ss(line);
        std::string key;
        if (!std::getline(ss, key, ',') || key != "J") fail("header must be 'J,<value>'");
        std::string val;
        if (!std::getline(ss, val)) fail("header must be 'J,<value>'");
        try {
            J = std::stod(val);
        } catch (const std::exception&) {
            fail("bad objective value in header");
        }
    }

    std::vector<double> s;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string idx_str, val_str;
        if (!std::getline(ss, idx_str, ',') || !std::getline(ss, val_str)) {
            fail("expected 'cell_index,s_value'");
        }
        long idx = -1;
        double val = 0.0;
        try {
            idx = std::stol(idx_str);
            val = std::stod(val_str);
        } catch (const std::exception&) {
            fail("bad number");
        }
        if (idx != static_cast<long>(s.size())) fail("cell indices must be consecutive from 0");
        if (!std::isfinite(val)) fail("non-finite sensitivity value");
        s.push_back(val);
    }
    return std::make_unique<ExternalProvider>(J, std::move(s));
}

}  // namespace shapedesc
