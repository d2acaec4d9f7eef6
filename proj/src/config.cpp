#include "shapedesc/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "shapedesc/remesh.hpp"

namespace shapedesc {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ConfigError("key '" + key + "': " + why);
}

struct KeyValues {
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    std::string take(const std::string& k) {
        auto it = kv.find(k);
        std::string v = it->second;
        kv.erase(it);
        return v;
    }

    double number(const std::string& k, double fallback) {
        if (!has(k)) return fallback;
        std::string v = take(k);
        try {
            std::size_t pos = 0;
            double x = std::stod(v, &pos);
            if (pos != v.size()) bad_key(k, "not a number: '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            bad_key(k, "not a number: '" + v + "'");
        }
    }

    long integer(const std::string& k, long fallback) {
        if (!has(k)) return fallback;
        std::string v = take(k);
        try {
            std::size_t pos = 0;
            long x = std::stol(v, &pos);
            if (pos != v.size()) bad_key(k, "not an integer: '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            bad_key(k, "not an integer: '" + v + "'");
        }
    }

    std::string text(const std::string& k, const std::string& fallback) {
        if (!has(k)) return fallback;
        return take(k);
    }
};

KeyValues parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    KeyValues out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // drop comments (values never contain '#')
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = strip_quotes(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        if (out.has(key)) bad_key(key, "specified twice");
        out.kv[key] = val;
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

RunConfig load_run_config(const std::string& path, bool with_method_list) {
    KeyValues kv = parse_file(path);
    RunConfig cfg;

    // provider
    bool analytic_keys = kv.has("c1") || kv.has("c2");
    cfg.c1 = kv.number("c1", 0.0);
    cfg.c2 = kv.number("c2", 0.0);
    if (kv.has("sensitivity_file")) {
        if (analytic_keys) bad_key("sensitivity_file", "conflicts with c1/c2 (pick one provider)");
        cfg.sensitivity_file = kv.take("sensitivity_file");
        if (cfg.sensitivity_file.empty()) bad_key("sensitivity_file", "must not be empty");
    }

    // geometry
    bool annulus = kv.has("annulus_R") || kv.has("annulus_r");
    bool diamond = kv.has("diamond_circumradius") || kv.has("diamond_r");
    if (annulus && diamond) {
        bad_key("diamond_circumradius", "conflicts with annulus_R/annulus_r (pick one geometry)");
    }
    cfg.geometry = diamond ? GeometryKind::Diamond : GeometryKind::Annulus;
    cfg.annulus_R = kv.number("annulus_R", cfg.annulus_R);
    cfg.annulus_r = kv.number("annulus_r", cfg.annulus_r);
    cfg.diamond_circumradius = kv.number("diamond_circumradius", cfg.diamond_circumradius);
    cfg.diamond_r = kv.number("diamond_r", cfg.diamond_r);
    cfg.h = kv.number("h", cfg.h);
    if (!(cfg.h > 0.0)) bad_key("h", "must be positive");

    // method(s)
    if (with_method_list) {
        if (!kv.has("methods")) bad_key("methods", "required (comma-separated method list)");
        cfg.method_names = split_list(kv.take("methods"));
        if (cfg.method_names.empty()) bad_key("methods", "must list at least one method");
    } else {
        if (!kv.has("method")) bad_key("method", "required");
        std::string name = kv.take("method");
        try {
            cfg.method.tag = parse_method(name);
        } catch (const std::exception&) {
            bad_key("method", "unknown method '" + name + "'");
        }
    }
    cfg.method.sigma = kv.number("sigma", cfg.method.sigma);
    cfg.method.conductivity = kv.number("conductivity", cfg.method.conductivity);
    cfg.method.elasticity.lambda = kv.number("lambda", cfg.method.elasticity.lambda);
    cfg.method.elasticity.mu = kv.number("mu", cfg.method.elasticity.mu);
    cfg.method.wd_epsilon = kv.number("wd_epsilon", cfg.method.wd_epsilon);
    cfg.method.picard.p = kv.number("p", cfg.method.picard.p);
    if (kv.has("extension")) {
        std::string ext = kv.take("extension");
        if (ext == "elasticity") cfg.method.extension = ExtensionKind::Elasticity;
        else if (ext == "wall-distance") cfg.method.extension = ExtensionKind::WallDistanceDiffusion;
        else bad_key("extension", "must be 'elasticity' or 'wall-distance'");
    }

    // stepping
    if (kv.has("step_mode")) {
        std::string mode = kv.take("step_mode");
        if (mode == "line-search") cfg.step_mode = StepMode::LineSearch;
        else if (mode == "max-displacement") cfg.step_mode = StepMode::MaxDisplacement;
        else bad_key("step_mode", "must be 'line-search' or 'max-displacement'");
    }
    cfg.line_search.alpha0 = kv.number("alpha0", cfg.line_search.alpha0);
    cfg.line_search.alpha_min = kv.number("alpha_min", cfg.line_search.alpha_min);
    cfg.line_search.quality_gate_deg = kv.number("quality_gate", cfg.line_search.quality_gate_deg);
    cfg.line_search.expansion = kv.number("expansion", cfg.line_search.expansion);
    cfg.line_search.shrink_tol = kv.number("shrink_tol", cfg.line_search.shrink_tol);
    cfg.theta_max = kv.number("theta_max", cfg.theta_max);
    cfg.remesh_interval = static_cast<int>(kv.integer("remesh_interval", cfg.remesh_interval));
    cfg.max_iterations = static_cast<int>(kv.integer("max_iterations", cfg.max_iterations));
    cfg.g_tol = kv.number("g_tol", cfg.g_tol);
    cfg.rel_j_tol = kv.number("rel_j_tol", cfg.rel_j_tol);

    cfg.output_dir = kv.text("output_dir", cfg.output_dir);
    cfg.seed = static_cast<unsigned>(kv.integer("seed", cfg.seed));

    if (!kv.kv.empty()) bad_key(kv.kv.begin()->first, "unknown key");
    return cfg;
}

TriMesh build_geometry(const RunConfig& cfg) {
    if (cfg.geometry == GeometryKind::Annulus) {
        return generate_annulus(cfg.annulus_R, cfg.annulus_r, cfg.h);
    }
    return generate_diamond_annulus(cfg.diamond_circumradius, cfg.diamond_r, cfg.h);
}

std::unique_ptr<SensitivityProvider> build_provider(const RunConfig& cfg) {
    if (!cfg.sensitivity_file.empty()) return load_external_sensitivity(cfg.sensitivity_file);
    return std::make_unique<AnalyticProvider>(IllustrativeProblem{cfg.c1, cfg.c2});
}

DescentConfig build_descent_config(const RunConfig& cfg) {
    DescentConfig d;
    d.method = cfg.method;
    d.step_mode = cfg.step_mode;
    d.line_search = cfg.line_search;
    d.theta_max = cfg.theta_max;
    d.remesh_interval = cfg.remesh_interval;
    d.max_iterations = cfg.max_iterations;
    d.g_tol = cfg.g_tol;
    d.rel_j_tol = cfg.rel_j_tol;
    d.remesh_h = cfg.h;
    return d;
}

UpdateMethod method_with_tag(const RunConfig& cfg, const std::string& name) {
    UpdateMethod m = cfg.method;
    m.tag = parse_method(name);
    return m;
}

}  // namespace shapedesc
