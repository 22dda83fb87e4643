#pragma once

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "decaylab/models/skew_walk.hpp"

namespace decaylab {

// Configuration file grammar (also printed by `decaylab print-schema`):
//   - line comments start with '#'
//   - sections as [name], keys as key = value
//   - every section and key must be known; unknown names are schema errors
//     reported with their full path
struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(what) {}
};

struct ExperimentConfig {
    models::ModelParams model;
    std::string experiment = "all";  // decay|cesaro|rage|virial|bounds|all

    // grids
    double t_min = 1.0, t_max = 100.0;
    int t_points = 160;
    long n_min = 1, n_max = 10000;
    int n_points = 160;
    int order_max = 3;

    // vectors
    std::string shape = "auto";  // auto|gaussian|indicator|delta
    double center = -1.0;        // -1: model default
    double width = -1.0;
    double modulation = 0.0;
    double psi_offset = -1.0;

    Tolerances tol;
    std::string output_dir = "out";
    unsigned long seed = 1;
};

namespace detail_config {

inline double to_double(const std::string& path, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw SchemaError("config: " + path + ": not a number: '" + v + "'");
    }
}

inline long to_long(const std::string& path, const std::string& v) {
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw SchemaError("config: " + path + ": not an integer: '" + v + "'");
    }
}

inline bool to_bool(const std::string& path, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw SchemaError("config: " + path + ": not a boolean: '" + v + "'");
}

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail_config

inline const char* config_schema_text() {
    return R"(# experiment configuration
#
# [model]
#   kind        = shift_Z | regular_rep_Zd | fock | fractional_laplacian |
#                 stark_1d | hyperbolic_2d | skew_product_u1 | quantum_walk_Z
#   dim         = lattice sites / grid points per axis (kind default when absent)
#   length      = physical extent (fractional_laplacian, stark_1d)
#   s           = fractional exponent in (0,2)
#   alpha       = rotation number (skew; snapped to the nearest p/dim)
#   winding     = cocycle winding w (skew)
#   perturbation= amplitude of the sin(2 pi x) term in theta (skew)
#   coin        = hadamard | identity | rotation  (walk)
#   coin_angle  = rotation coin angle (walk)
#   anisotropic = bool (walk)
#   coin_angle_left, coin_angle_right, range_exponent, range_amplitude (walk)
#   d           = 1 | 2 (regular_rep_Zd)
#   net_max     = largest net element j (regular_rep_Zd)
#   interior_margin = override of the interior buffer
#
# [experiment]
#   type = decay | cesaro | rage | virial | bounds | all
#
# [grids]
#   t_min, t_max, t_points        time grid (log spaced)
#   n_min, n_max, n_points        power grid (log-subsampled integers)
#   order_max                     highest bound order (1..3)
#
# [vectors]
#   shape = auto | gaussian | indicator | delta
#   center, width, modulation, psi_offset    profile parameters (sites)
#
# [tolerances]
#   relation, bound_slack, noise_floor, cluster, commutant_gate, unitary,
#   norm_preserve, quadrature_xcheck
#
# [output]
#   dir  = report directory (env DECAYLAB_OUTPUT_DIR overrides)
#   seed = integer seed for randomized probes
)";
}

inline ExperimentConfig parse_config(const std::string& text) {
    using namespace detail_config;
    ExperimentConfig cfg;
    static const std::map<std::string, std::set<std::string>> schema = {
        {"model",
         {"kind", "dim", "length", "s", "alpha", "winding", "perturbation", "coin", "coin_angle",
          "anisotropic", "coin_angle_left", "coin_angle_right", "range_exponent",
          "range_amplitude", "d", "net_max", "interior_margin"}},
        {"experiment", {"type"}},
        {"grids", {"t_min", "t_max", "t_points", "n_min", "n_max", "n_points", "order_max"}},
        {"vectors", {"shape", "center", "width", "modulation", "psi_offset"}},
        {"tolerances",
         {"relation", "bound_slack", "noise_floor", "cluster", "commutant_gate", "unitary",
          "norm_preserve", "quadrature_xcheck"}},
        {"output", {"dir", "seed"}},
    };

    std::string section;
    std::set<std::string> seen;
    bool have_kind = false;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (auto h = line.find('#'); h != std::string::npos) line = trim(line.substr(0, h));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw SchemaError("config: line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema.count(section))
                throw SchemaError("config: [" + section + "]: unknown section");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SchemaError("config: line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty()) throw SchemaError("config: key '" + key + "' outside any section");
        std::string path = section + "." + key;
        if (!schema.at(section).count(key))
            throw SchemaError("config: " + path + ": unknown key");
        if (!seen.insert(path).second) throw SchemaError("config: " + path + ": duplicate key");

        if (section == "model") {
            auto& m = cfg.model;
            if (key == "kind") {
                try {
                    m.kind = models::kind_from_name(val);
                } catch (const Error&) {
                    throw SchemaError("config: model.kind: unknown model '" + val + "'");
                }
                have_kind = true;
            } else if (key == "dim") m.dim = int(to_long(path, val));
            else if (key == "length") m.length = to_double(path, val);
            else if (key == "s") m.s = to_double(path, val);
            else if (key == "alpha") m.alpha = to_double(path, val);
            else if (key == "winding") m.winding = int(to_long(path, val));
            else if (key == "perturbation") m.perturbation = to_double(path, val);
            else if (key == "coin") m.coin = val;
            else if (key == "coin_angle") m.coin_angle = to_double(path, val);
            else if (key == "anisotropic") m.anisotropic = to_bool(path, val);
            else if (key == "coin_angle_left") m.coin_angle_left = to_double(path, val);
            else if (key == "coin_angle_right") m.coin_angle_right = to_double(path, val);
            else if (key == "range_exponent") m.range_exponent = to_double(path, val);
            else if (key == "range_amplitude") m.range_amplitude = to_double(path, val);
            else if (key == "d") m.reg_dimension = int(to_long(path, val));
            else if (key == "net_max") m.net_max = to_long(path, val);
            else if (key == "interior_margin") m.interior_margin = int(to_long(path, val));
        } else if (section == "experiment") {
            static const std::set<std::string> kinds{"decay", "cesaro", "rage", "virial", "bounds", "all"};
            if (!kinds.count(val)) throw SchemaError("config: experiment.type: unknown experiment '" + val + "'");
            cfg.experiment = val;
        } else if (section == "grids") {
            if (key == "t_min") cfg.t_min = to_double(path, val);
            else if (key == "t_max") cfg.t_max = to_double(path, val);
            else if (key == "t_points") cfg.t_points = int(to_long(path, val));
            else if (key == "n_min") cfg.n_min = to_long(path, val);
            else if (key == "n_max") cfg.n_max = to_long(path, val);
            else if (key == "n_points") cfg.n_points = int(to_long(path, val));
            else if (key == "order_max") cfg.order_max = int(to_long(path, val));
        } else if (section == "vectors") {
            if (key == "shape") {
                static const std::set<std::string> shapes{"auto", "gaussian", "indicator", "delta"};
                if (!shapes.count(val)) throw SchemaError("config: vectors.shape: unknown shape '" + val + "'");
                cfg.shape = val;
            } else if (key == "center") cfg.center = to_double(path, val);
            else if (key == "width") cfg.width = to_double(path, val);
            else if (key == "modulation") cfg.modulation = to_double(path, val);
            else if (key == "psi_offset") cfg.psi_offset = to_double(path, val);
        } else if (section == "tolerances") {
            if (key == "relation") cfg.tol.relation = to_double(path, val);
            else if (key == "bound_slack") cfg.tol.bound_slack = to_double(path, val);
            else if (key == "noise_floor") cfg.tol.noise_floor = to_double(path, val);
            else if (key == "cluster") cfg.tol.cluster = to_double(path, val);
            else if (key == "commutant_gate") cfg.tol.commutant_gate = to_double(path, val);
            else if (key == "unitary") cfg.tol.unitary = to_double(path, val);
            else if (key == "norm_preserve") cfg.tol.norm_preserve = to_double(path, val);
            else if (key == "quadrature_xcheck") cfg.tol.quadrature_xcheck = to_double(path, val);
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = val;
            else if (key == "seed") cfg.seed = static_cast<unsigned long>(to_long(path, val));
        }
    }
    if (!have_kind) throw SchemaError("config: model.kind is required");
    if (cfg.order_max < 1 || cfg.order_max > 3)
        throw SchemaError("config: grids.order_max must lie in 1..3");
    return cfg;
}

}  // namespace decaylab
