#pragma once

#include "decaylab/cesaro.hpp"

namespace decaylab {

// --- coefficient series -------------------------------------------------------

// |<phi, U^n psi>| over integer n
inline std::vector<double> coefficient_series(const models::ModelInstance& m,
                                              const StateVector& phi, const StateVector& psi,
                                              const std::vector<long>& n_grid) {
    if (!m.discrete) throw Error("coefficient_series: integer grid needs a unitary generator");
    if (n_grid.empty() || double(n_grid.back()) > m.validity_window)
        throw Error("coefficient_series: grid exceeds the validity window");
    if (double(n_grid.back()) > m.probe_horizon({phi, psi}) + m.probe_margin_extra)
        throw Error("coefficient_series: vectors leave the interior within the horizon");
    std::vector<double> out;
    Vec w = psi.entries;
    long cur = 0;
    for (long n : n_grid) {
        if (m.applyU_pow && n - cur > 64) {
            w = m.applyU_pow(n - cur, w);
            cur = n;
        }
        while (cur < n) {
            w = m.applyU(w);
            ++cur;
        }
        out.push_back(std::abs(phi.entries.dot(w)));
    }
    return out;
}

// |<phi, e^{-itH} psi>| over real t
inline std::vector<double> coefficient_series(const models::ModelInstance& m,
                                              const StateVector& phi, const StateVector& psi,
                                              const std::vector<double>& t_grid) {
    if (m.discrete) throw Error("coefficient_series: real grid needs a self-adjoint generator");
    if (t_grid.empty() || t_grid.back() > m.validity_window)
        throw Error("coefficient_series: grid exceeds the validity window");
    if (t_grid.back() > m.probe_horizon({phi, psi}) + m.probe_margin_extra)
        throw Error("coefficient_series: vectors leave the interior within the horizon");
    if (!m.spec) throw Error("coefficient_series: no spectral data");
    Vec cphi = m.spec->basis.to_eigen(phi.entries);
    Vec cpsi = m.spec->basis.to_eigen(psi.entries);
    RVec lam = m.spec->eigenvalues.real();
    std::vector<double> out;
    for (double t : t_grid) {
        cplx acc = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            acc += std::conj(cphi[i]) * std::exp(cplx(0.0, -t * lam[i])) * cpsi[i];
        out.push_back(std::abs(acc));
    }
    return out;
}

// --- vector preparation ---------------------------------------------------------

// chi/psi profiles per model kind, tuned so the acceptance windows stay inside
// each model's validity window.
inline StateVector default_chi(const models::ModelInstance& m) {
    using models::Kind;
    const double n = double(m.dim);
    switch (m.kind) {
        case Kind::ShiftZ:
            return models::gaussian_profile(m.dim, n / 2, 1.5, 0.0, "chi");
        case Kind::RegularRepZd: {
            // normalized indicator of [-5,5]
            Vec v = Vec::Zero(m.dim);
            long c = m.dim / 2;
            for (long i = -5; i <= 5; ++i) v[c + i] = 1.0;
            v /= v.norm();
            return {v, "chi[-5,5]"};
        }
        case Kind::Fock:
            return models::gaussian_profile(m.dim, n / 2, 1.5, 0.0, "chi");
        case Kind::FractionalLaplacian: {
            double h = m.params.length / n;
            return models::gaussian_profile(m.dim, n / 2, 1.0 / (0.2 * h), 2.0 * h, "chi");
        }
        case Kind::Stark1d: {
            double dl = m.params.length / n;
            return models::gaussian_profile(m.dim, n / 2, 2.0 / dl, 0.0, "chi");
        }
        case Kind::SkewProductU1:
            return models::gaussian_profile(m.dim, n / 2, 0.02 * n, 0.0, "chi");
        default:
            return m.probes.at(0);
    }
}

inline StateVector default_psi(const models::ModelInstance& m) {
    using models::Kind;
    const double n = double(m.dim);
    switch (m.kind) {
        case Kind::ShiftZ:
            return models::gaussian_profile(m.dim, n / 2 + 3, 1.5, 0.0, "psi");
        case Kind::RegularRepZd:
            return default_chi(m);  // the overlap pair of the compact-support bound
        case Kind::Fock:
            return models::gaussian_profile(m.dim, n / 2 + 5, 1.5, 0.0, "psi");
        case Kind::FractionalLaplacian: {
            double h = m.params.length / n;
            return models::gaussian_profile(m.dim, n / 2 - 3.0 / h, 1.0 / (0.2 * h), 2.0 * h, "psi");
        }
        case Kind::Stark1d: {
            double dl = m.params.length / n;
            return models::gaussian_profile(m.dim, n / 2 + 2.0 / dl, 1.4 / dl, 0.5 * dl, "psi");
        }
        case Kind::SkewProductU1:
            return models::gaussian_profile(m.dim, n / 2 + 0.1 * n, 0.015 * n, 0.0, "psi");
        default:
            return m.probes.size() > 1 ? m.probes.at(1) : m.probes.at(0);
    }
}

struct PreparedVectors {
    StateVector phi, psi, chi;
    double phi_raw_norm = 0.0;      // ||D^order chi|| before normalization
    bool conditioning_warning = false;  // ||D^order chi|| below 1e-6
    int order = 1;
};

// chi -> phi = D^order chi (normalized), psi independent profile.
// chi in ker(D) is an error: the decay estimates say nothing there.
inline PreparedVectors prepare_vectors(const models::ModelInstance& m, int order,
                                       std::optional<StateVector> chi_in = {},
                                       std::optional<StateVector> psi_in = {}) {
    if (order < 1) throw Error("prepare_vectors: order must be >= 1");
    if (!m.D) throw Error("prepare_vectors: model declares no reference limit D");
    PreparedVectors out;
    out.order = order;
    out.chi = chi_in ? *chi_in : default_chi(m);
    out.psi = psi_in ? *psi_in : default_psi(m);
    Vec phi = out.chi.entries;
    for (int k = 0; k < order; ++k) phi = (*m.D)(phi);
    out.phi_raw_norm = phi.norm();
    if (out.phi_raw_norm < 1e-12)
        throw Error("prepare_vectors: chi lies in ker(D); no bound applies there");
    out.conditioning_warning = out.phi_raw_norm < 1e-6;
    out.phi = StateVector{phi / out.phi_raw_norm, "D^" + std::to_string(order) + " chi"};
    return out;
}

// --- the recursive constant of the higher-order decay bound ---------------------

// C(1,a,b) = ||A a|| ||b|| + ||a|| ||A b||
// C(k,a,b) = C(k-1, (A+(k-1)B) a, b) + C(k-1, a, A b)
// For self-adjoint generators A is the conjugated (H+i)^{-1}A(H-i)^{-1}.
inline double bound_constant(const models::ModelInstance& m, int order, const StateVector& chi,
                             const StateVector& psi, const Tolerances& tol = default_tol()) {
    if (order < 1) throw Error("bound_constant: order must be >= 1");
    const LinOp& a = (!m.discrete && m.Atilde) ? *m.Atilde : m.A;
    if (order >= 2) {
        if (!m.B || !m.D) throw Error("bound_constant: orders >= 2 need the auxiliary B and D");
        // gate: [A,D] = DB and [D,B] = 0 on the working vectors
        double gate = 0.0;
        for (const Vec* v : {&chi.entries, &psi.entries}) {
            Vec ad = a((*m.D)(*v)) - (*m.D)(a(*v));
            Vec db = (*m.D)((*m.B)(*v));
            gate = std::max(gate, (ad - db).norm() / v->norm());
            Vec comm = (*m.D)((*m.B)(*v)) - (*m.B)((*m.D)(*v));
            gate = std::max(gate, comm.norm() / v->norm());
        }
        if (gate > tol.commutant_gate)
            throw Error("bound_constant: [A,D]-DB residual exceeds the gate; refusing order >= 2");
    }
    std::function<double(int, const Vec&, const Vec&)> rec = [&](int k, const Vec& x,
                                                                 const Vec& y) -> double {
        if (k == 1) return a(x).norm() * y.norm() + x.norm() * a(y).norm();
        Vec left = a(x);
        if (m.B) left += double(k - 1) * (*m.B)(x);
        return rec(k - 1, left, y) + rec(k - 1, x, a(y));
    };
    return rec(order, chi.entries, psi.entries);
}

// --- decay-order fitting ---------------------------------------------------------

struct DecayFit {
    double slope = 0.0;
    double half_width = 0.0;  // standard error of the slope
    int points_used = 0;
    bool envelope_mode = false;
};

// least-squares slope of log(value) against log(index); oscillating series are
// fitted on their upper envelope (local maxima), since the bounds cap the
// envelope, not each oscillation.
inline DecayFit fit_decay_order(const std::vector<double>& index, const std::vector<double>& value,
                                double window_lo, double window_hi,
                                double noise_floor = default_tol().noise_floor) {
    if (index.size() != value.size()) throw Error("fit_decay_order: length mismatch");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < index.size(); ++i)
        if (index[i] >= window_lo && index[i] <= window_hi && value[i] > noise_floor) {
            xs.push_back(index[i]);
            ys.push_back(value[i]);
        }
    DecayFit fit;
    if (xs.size() < 8) throw Error("fit_decay_order: too few usable points");

    // oscillation: a noticeable share of interior points are strict dips
    size_t dips = 0;
    for (size_t i = 1; i + 1 < ys.size(); ++i)
        if (ys[i] < 0.7 * ys[i - 1] && ys[i] < 0.7 * ys[i + 1]) ++dips;
    std::vector<double> fx, fy;
    if (dips >= 2) {
        fit.envelope_mode = true;
        for (size_t i = 0; i < ys.size(); ++i) {
            bool up_left = i == 0 || ys[i] >= ys[i - 1];
            bool up_right = i + 1 == ys.size() || ys[i] >= ys[i + 1];
            if (up_left && up_right) {
                fx.push_back(xs[i]);
                fy.push_back(ys[i]);
            }
        }
        if (fx.size() < 8) {
            fit.envelope_mode = false;
            fx = xs;
            fy = ys;
        }
    } else {
        fx = xs;
        fy = ys;
    }

    const size_t n = fx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log(fx[i]), ly = std::log(fy[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = sxx - sx * sx / double(n);
    fit.slope = (sxy - sx * sy / double(n)) / denom;
    double icept = (sy - fit.slope * sx) / double(n);
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = std::log(fy[i]) - (icept + fit.slope * std::log(fx[i]));
        ss += r * r;
    }
    fit.half_width = n > 2 ? std::sqrt(ss / double(n - 2) / denom) : 0.0;
    fit.points_used = int(n);
    return fit;
}

// --- verdicts ---------------------------------------------------------------------

struct DecayReport {
    std::string model, phi_label, psi_label, mode;
    int order = 1;
    std::vector<double> index, series, bound;
    std::vector<char> verdict;
    double constant = 0.0;       // effective c (normalization folded in)
    double phi_raw_norm = 1.0;
    std::optional<DecayFit> fit;
    bool all_pass = false;
    double slack = 1e-10;
};

// exact-D mode: series <= c / (||D^n chi|| index^n) + slack
inline DecayReport verify_bound(const models::ModelInstance& m, const PreparedVectors& pv,
                                double c_raw, const std::vector<double>& index,
                                const std::vector<double>& series,
                                const Tolerances& tol = default_tol()) {
    DecayReport r;
    r.model = models::kind_name(m.kind);
    r.phi_label = pv.phi.label;
    r.psi_label = pv.psi.label;
    r.mode = "exact-D";
    r.order = pv.order;
    r.index = index;
    r.series = series;
    r.phi_raw_norm = pv.phi_raw_norm;
    r.constant = c_raw / pv.phi_raw_norm;
    r.slack = tol.bound_slack;
    r.all_pass = true;
    for (size_t i = 0; i < index.size(); ++i) {
        double b = r.constant / std::pow(index[i], double(pv.order));
        r.bound.push_back(b);
        bool ok = series[i] <= b + tol.bound_slack;
        r.verdict.push_back(ok);
        r.all_pass = r.all_pass && ok;
    }
    return r;
}

// part-(a) mode: series <= (residual_n ||psi|| + c/n) / ||D phi_tilde||,
// with residual_n = ||(D - D_n) phi_tilde|| supplied by a Cesaro run.
inline DecayReport verify_bound_part_a(const models::ModelInstance& m, const StateVector& phi_tilde,
                                       const StateVector& psi, double c_raw, double phi_raw_norm,
                                       const std::vector<double>& index,
                                       const std::vector<double>& series,
                                       const std::vector<double>& residuals,
                                       const Tolerances& tol = default_tol()) {
    if (residuals.size() != index.size()) throw Error("verify_bound_part_a: residual grid mismatch");
    DecayReport r;
    r.model = models::kind_name(m.kind);
    r.phi_label = "D " + phi_tilde.label;
    r.psi_label = psi.label;
    r.mode = "part-a";
    r.order = 1;
    r.index = index;
    r.series = series;
    r.phi_raw_norm = phi_raw_norm;
    r.constant = c_raw / phi_raw_norm;
    r.slack = tol.bound_slack;
    r.all_pass = true;
    for (size_t i = 0; i < index.size(); ++i) {
        double b = (residuals[i] * psi.norm() + c_raw / index[i]) / phi_raw_norm;
        r.bound.push_back(b);
        bool ok = series[i] <= b + tol.bound_slack;
        r.verdict.push_back(ok);
        r.all_pass = r.all_pass && ok;
    }
    return r;
}

}  // namespace decaylab
