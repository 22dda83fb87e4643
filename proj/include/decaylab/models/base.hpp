#pragma once

#include <nlohmann/json.hpp>

#include "decaylab/calculus.hpp"

namespace decaylab::models {

using json = nlohmann::json;

enum class Kind {
    ShiftZ,
    RegularRepZd,
    Fock,
    FractionalLaplacian,
    Stark1d,
    Hyperbolic2d,
    SkewProductU1,
    QuantumWalkZ,
};

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::ShiftZ: return "shift_Z";
        case Kind::RegularRepZd: return "regular_rep_Zd";
        case Kind::Fock: return "fock";
        case Kind::FractionalLaplacian: return "fractional_laplacian";
        case Kind::Stark1d: return "stark_1d";
        case Kind::Hyperbolic2d: return "hyperbolic_2d";
        case Kind::SkewProductU1: return "skew_product_u1";
        case Kind::QuantumWalkZ: return "quantum_walk_Z";
    }
    return "?";
}

inline Kind kind_from_name(const std::string& s) {
    for (Kind k : {Kind::ShiftZ, Kind::RegularRepZd, Kind::Fock, Kind::FractionalLaplacian,
                   Kind::Stark1d, Kind::Hyperbolic2d, Kind::SkewProductU1, Kind::QuantumWalkZ})
        if (s == kind_name(k)) return k;
    throw Error("unknown model kind '" + s + "'");
}

struct ModelParams {
    Kind kind = Kind::ShiftZ;
    int dim = 0;              // sites / grid points per axis (0 = kind default)
    double length = 0.0;      // physical extent (fractional: x-box, stark: spectral window)
    double s = 1.0;           // fractional exponent, s in (0,2)
    double alpha = 0.6180339887498949;  // skew rotation number (snapped to p/M)
    int winding = 1;                    // skew cocycle degree
    double perturbation = 0.0;          // skew: theta(x) = 2*pi*w*x + perturbation*sin(2*pi*x)
    std::string coin = "hadamard";      // walk: hadamard | identity | rotation
    double coin_angle = pi / 4;         // walk: rotation coin angle
    bool anisotropic = false;           // walk: x-dependent coin profile
    double coin_angle_left = pi / 4, coin_angle_right = pi / 4;
    double range_exponent = 1.0;        // walk: short-range exponent eps
    double range_amplitude = 0.5;       // walk: kappa of the profile
    int reg_dimension = 1;              // regular rep: d
    long net_max = 100;                 // regular rep: net x_j = j*e1, j <= net_max
    int interior_margin = -1;           // -1 = kind default
};

// Conjugation structure of multiplication-type commutators:
// K = mult(values), U^m K U^-m = mult(values shifted by m*step on the cyclic grid).
struct MultiplierConjugation {
    RVec values;
    long step = 0;
};

// A bundle: generator, conjugate operator A, declared commutation relation,
// expected limit D, validity window, interior mask.
struct ModelInstance {
    Kind kind{};
    ModelParams params;
    Eigen::Index dim = 0;
    bool discrete = false;  // unitary (true) vs self-adjoint generator

    // generator: always applicable, concrete Operator form where feasible
    std::optional<Operator> generator;
    std::shared_ptr<SpectralData> spec;  // generator spectral data (continuous kinds)

    std::function<Vec(const Vec&)> applyU, applyUinv;   // discrete kinds
    std::function<Vec(long, const Vec&)> applyU_pow;    // n may be negative
    std::function<Vec(const Vec&)> applyH;              // continuous kinds

    LinOp A;
    std::optional<LinOp> Atilde;  // (H+i)^{-1} A (H-i)^{-1}
    std::optional<LinOp> B;       // auxiliary operator of the higher-order bound
    std::optional<LinOp> D;       // reference limit action, when declared
    std::optional<double> expected_D_scalar;
    std::optional<MultiplierConjugation> mult_conj;  // exact conjugation fast path

    // f, g = f<.>^-2 for continuous kinds (real maps on the spectrum)
    std::function<double(double)> f_map, g_map, gprime_map;

    std::string relation_tag;       // e.g. "[iH,A] = 1 - H^2"
    std::string relation_method;    // interior-columns | symbol-homogeneity | probe | coin-short-range
    double relation_residual = 0.0;
    double relation_tolerance = 1e-8;

    std::vector<Eigen::Index> interior;  // flattened interior index set
    double validity_window = 0;
    bool local_propagation = false;   // banded dynamics: support spreads 1 site/step
    double probe_margin_extra = 0.0;  // beyond-light-cone margin for 1e-9 grade checks
    Eigen::Index sites = 0;           // lattice sites (dim/components for spinor models)
    double alpha_error = 0.0;         // skew: |alpha - p/M|

    std::vector<StateVector> probes;  // canonical normalized interior probes

    // walk, constant coin: <phi, V0^2 phi> evaluated in the band basis
    std::function<double(const StateVector&)> quadratic_D_expectation;

    json card;  // model card: params, residuals, validity window

    Vec apply_A(const Vec& v) const { return A(v); }

    // largest horizon for which the given vectors stay inside the interior
    // under one-site-per-step propagation (the validity window when not
    // applicable). Support is effective support: entries above 1e-12 of the
    // norm, so resolvent tails do not count. A lattice side only constrains
    // when non-interior sites exist there (the fock site-0 edge is physical).
    double probe_horizon(const std::vector<StateVector>& vecs) const {
        if (!local_propagation) return validity_window;
        const Eigen::Index ns = sites > 0 ? sites : dim;
        Eigen::Index ilo = ns, ihi = -1;
        for (auto i : interior) {
            ilo = std::min(ilo, i % ns);
            ihi = std::max(ihi, i % ns);
        }
        Eigen::Index lo = ns, hi = -1;
        for (const auto& v : vecs) {
            double floor = 1e-12 * v.norm();
            for (Eigen::Index i = 0; i < v.entries.size(); ++i)
                if (std::abs(v.entries[i]) > floor) {
                    lo = std::min(lo, i % ns);
                    hi = std::max(hi, i % ns);
                }
        }
        if (hi < 0) return 0;
        double margin = std::numeric_limits<double>::infinity();
        if (ilo > 0) margin = std::min(margin, double(lo - ilo));
        if (ihi < ns - 1) margin = std::min(margin, double(ihi - hi));
        margin -= probe_margin_extra;
        return std::max(0.0, std::min(margin, validity_window));
    }
    Vec commutator_K(const Vec& v) const {  // [A,U]U^{-1} v
        Vec w = applyUinv(v);
        return A(v) - applyU(A(w));
    }
    Vec commutator_iHA(const Vec& v) const {  // [iH,A] v
        return iu * (applyH(A(v)) - A(applyH(v)));
    }
    StateVector evolve_state(double t, const StateVector& v) const {
        if (!spec) throw Error("model has no spectral data for evolution");
        return evolve(*spec, t, v);
    }
};

// --- probe construction helpers -------------------------------------------

// Discrete gaussian packet, hard-truncated at 8 sigma so the support is exactly
// compact (the chopped tail is ~1e-14, below every working tolerance).
inline StateVector gaussian_profile(Eigen::Index dim, double center, double width,
                                    double modulation, const std::string& label) {
    Vec v = Vec::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double dx = double(i) - center;
        if (std::abs(dx) > 8.0 * width) continue;
        v[i] = std::exp(cplx(0.0, modulation * double(i))) * std::exp(-dx * dx / (2.0 * width * width));
    }
    double n = v.norm();
    if (!(n > 0)) throw Error("gaussian_profile: vanishing norm");
    return {v / n, label};
}

// distance from the probes' joint support to the truncation edges, minus buf
inline long support_window(const std::vector<StateVector>& probes, Eigen::Index dim, long buf,
                           Eigen::Index sites = -1) {
    const Eigen::Index n_sites = sites > 0 ? sites : dim;
    Eigen::Index lo = n_sites, hi = -1;
    for (const auto& p : probes)
        for (Eigen::Index i = 0; i < p.entries.size(); ++i)
            if (std::abs(p.entries[i]) > 0) {
                Eigen::Index x = i % n_sites;
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
    if (hi < 0) return 0;
    return std::max<long>(0, std::min<long>(lo - buf, n_sites - 1 - buf - hi));
}

inline bool supported_in(const Vec& v, const std::vector<Eigen::Index>& mask, double tail_tol = 1e-12) {
    std::vector<char> in(size_t(v.size()), 0);
    for (auto i : mask) in[size_t(i)] = 1;
    double out_mass = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!in[size_t(i)]) out_mass += std::norm(v[i]);
    return std::sqrt(out_mass) <= tail_tol * v.norm();
}

inline std::vector<Eigen::Index> contiguous_interior(Eigen::Index dim, Eigen::Index lo,
                                                     Eigen::Index hi) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = lo; i <= hi; ++i) out.push_back(i);
    return out;
}

}  // namespace decaylab::models
