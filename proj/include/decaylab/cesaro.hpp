#pragma once

#include "decaylab/models/skew_walk.hpp"

namespace decaylab {

// One evaluation point of a Cesaro-mean family, with per-probe diagnostics.
struct CesaroPoint {
    double index = 0;                 // power n or time t
    std::vector<double> residual;     // ||(D - D_index) phi_p|| per probe
    std::vector<double> qform;        // Re <phi_p, D_index phi_p>
    std::vector<double> action_norm;  // ||D_index phi_p||
    double defect = 0;                // commutation defect ||[D_index, U]|| proxy
};

struct CesaroSeries {
    bool discrete = true;
    std::vector<std::string> probe_labels;
    std::vector<CesaroPoint> points;
    bool reference_is_estimate = false;
    // probe actions D_index phi_p, kept when the dimension allows
    std::vector<std::vector<Vec>> actions;
    std::vector<StateVector> probes;

    void check_monotone_index() const {
        for (size_t i = 1; i < points.size(); ++i)
            if (!(points[i].index > points[i - 1].index))
                throw Error("CesaroSeries: index grid must increase strictly");
    }
};

namespace detail_cesaro {

// circular correlation S(i) = sum_s cnt[s] * values[(i+s) mod M] via the FFT
inline RVec shift_accumulate(const RVec& values, const std::vector<double>& cnt) {
    const Eigen::Index m = values.size();
    Vec a(m), b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a[i] = values[i];
        b[i] = cnt[size_t(i)];
    }
    Fft::forward(a);
    Fft::forward(b);
    Vec prod = a.cwiseProduct(b.conjugate());
    Fft::inverse(prod);
    prod *= std::sqrt(double(m));
    return prod.real();
}

}  // namespace detail_cesaro

// D_n = (1/n)[A,U^n]U^{-n} on a probe set, evaluated at the indices of n_grid.
// Multiplication-structured models (skew product, shift, regular representation)
// use the exact conjugation of their commutator symbol; otherwise the engine
// keeps w_m = U^{-m} phi running and reconstructs at the report indices, cost
// O(sum of report indices) operator applications.
inline CesaroSeries cesaro_discrete(const models::ModelInstance& m, const std::vector<long>& n_grid,
                                    const std::vector<StateVector>& probes,
                                    bool with_defect = true) {
    if (!m.discrete) throw Error("cesaro_discrete: model has a self-adjoint generator");
    if (n_grid.empty()) throw Error("cesaro_discrete: empty grid");
    for (size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw Error("cesaro_discrete: grid must increase");
    if (double(n_grid.back()) > m.validity_window)
        throw Error("cesaro_discrete: horizon exceeds the validity window");
    if (double(n_grid.back()) > m.probe_horizon(probes))
        throw Error("cesaro_discrete: probes leave the interior within the horizon");

    CesaroSeries out;
    out.discrete = true;
    out.probes = probes;
    for (const auto& p : probes) out.probe_labels.push_back(p.label);
    const bool keep_actions = m.dim <= 16384;

    if (m.mult_conj) {
        // D_n = mult( (1/n) sum_{q<n} values shifted by q*step ).
        // Direct accumulation is exact; the FFT route covers horizons where
        // n*dim would be prohibitive (its rounding is ~1e-12, fine for smooth
        // commutator symbols like the skew product's theta').
        const auto& mc = *m.mult_conj;
        const Eigen::Index dim = m.dim;
        const bool direct = double(n_grid.back()) * double(dim) <= 2e8;
        RVec direct_sums = RVec::Zero(dim);
        std::vector<double> cnt(size_t(dim), 0.0);
        long cursor = 0, filled = 0;
        for (long n : n_grid) {
            while (filled < n) {
                long off = ((cursor % dim) + dim) % dim;
                if (direct) {
                    for (Eigen::Index i = 0; i < dim; ++i)
                        direct_sums[i] += mc.values[(i + off) % dim];
                } else {
                    cnt[size_t(off)] += 1.0;
                }
                cursor -= mc.step;
                ++filled;
            }
            RVec sums = direct ? direct_sums : detail_cesaro::shift_accumulate(mc.values, cnt);
            RVec dn = sums / double(n);
            CesaroPoint pt;
            pt.index = double(n);
            for (const auto& p : probes) {
                Vec act = dn.cast<cplx>().cwiseProduct(p.entries);
                if (m.D) {
                    pt.residual.push_back((act - (*m.D)(p.entries)).norm());
                } else {
                    pt.residual.push_back(std::numeric_limits<double>::quiet_NaN());
                }
                pt.qform.push_back(p.entries.dot(act).real());
                pt.action_norm.push_back(act.norm());
            }
            if (with_defect) {
                // ||[D_n,U] phi|| on the probe set (the seam region of the
                // multiplier never meets interior-supported probes)
                double worst = 0.0;
                Vec dnc = dn.cast<cplx>();
                for (const auto& p : probes) {
                    Vec lhs = dnc.cwiseProduct(m.applyU(p.entries));
                    Vec rhs = m.applyU(Vec(dnc.cwiseProduct(p.entries)));
                    worst = std::max(worst, (lhs - rhs).norm());
                }
                pt.defect = worst;
            }
            if (keep_actions) {
                std::vector<Vec> acts;
                for (const auto& p : probes) acts.push_back(dn.cast<cplx>().cwiseProduct(p.entries));
                out.actions.push_back(std::move(acts));
            }
            out.points.push_back(std::move(pt));
        }
        out.check_monotone_index();
        return out;
    }

    // generic vector route; defect needs D_n on U phi as well
    std::vector<StateVector> extended = probes;
    if (with_defect)
        for (const auto& p : probes) extended.push_back({m.applyU(p.entries), p.label + "/U"});

    const size_t np = probes.size(), ne = extended.size();
    std::vector<Vec> w(ne), aphi(ne);
    for (size_t p = 0; p < ne; ++p) {
        w[p] = extended[p].entries;
        aphi[p] = m.A(extended[p].entries);
    }
    long cur = 0;
    for (long n : n_grid) {
        while (cur < n) {
            for (size_t p = 0; p < ne; ++p) w[p] = m.applyUinv(w[p]);
            ++cur;
        }
        std::vector<Vec> dn(ne);
        for (size_t p = 0; p < ne; ++p) {
            Vec fwd = m.applyU_pow ? m.applyU_pow(n, m.A(w[p])) : [&] {
                Vec z = m.A(w[p]);
                for (long q = 0; q < n; ++q) z = m.applyU(z);
                return z;
            }();
            dn[p] = (aphi[p] - fwd) / double(n);
        }
        CesaroPoint pt;
        pt.index = double(n);
        for (size_t p = 0; p < np; ++p) {
            if (m.D)
                pt.residual.push_back((dn[p] - (*m.D)(extended[p].entries)).norm());
            else
                pt.residual.push_back(std::numeric_limits<double>::quiet_NaN());
            pt.qform.push_back(extended[p].entries.dot(dn[p]).real());
            pt.action_norm.push_back(dn[p].norm());
        }
        if (with_defect) {
            double worst = 0.0;
            for (size_t p = 0; p < np; ++p)
                worst = std::max(worst, (dn[np + p] - m.applyU(dn[p])).norm());
            pt.defect = worst;
        }
        if (keep_actions) {
            std::vector<Vec> acts(dn.begin(), dn.begin() + long(np));
            out.actions.push_back(std::move(acts));
        }
        out.points.push_back(std::move(pt));
    }
    if (!m.D) {
        // Richardson reference from the two largest indices: D_n ~ D + C/n
        out.reference_is_estimate = true;
        if (out.actions.size() >= 2) {
            size_t i2 = out.actions.size() - 1, i1 = i2 - 1;
            double n1 = out.points[i1].index, n2 = out.points[i2].index;
            for (size_t i = 0; i < out.points.size(); ++i)
                for (size_t p = 0; p < np; ++p) {
                    Vec dhat = (n2 * out.actions[i2][p] - n1 * out.actions[i1][p]) / (n2 - n1);
                    out.points[i].residual[p] = (out.actions[i][p] - dhat).norm();
                }
        }
    }
    out.check_monotone_index();
    return out;
}

// Time average D_t = (1/t) int_0^t e^{-i tau H} (H+i)^{-1}[iH,A](H-i)^{-1} e^{i tau H} d tau,
// evaluated entrywise in the eigenbasis: the (i,j) factor is the closed-form mean
// mu_t(lambda_i - lambda_j) = (e^{-it d}-1)/(-it d), with removable singularity 1.
inline cplx cesaro_phase_mean(double t, double gap) {
    double x = t * gap;
    if (std::abs(x) < 1e-8) return cplx(1.0 - x * x / 6.0, -x / 2.0);
    cplx num = std::exp(cplx(0.0, -x)) - 1.0;
    return num / cplx(0.0, -x);
}

class ContinuousCesaro {
public:
    ContinuousCesaro(const models::ModelInstance& m, Eigen::Index dense_cap = 2048) : m_(m) {
        if (m.discrete) throw Error("cesaro_continuous: model has a unitary generator");
        if (!m.spec) throw Error("cesaro_continuous: model carries no spectral data");
        const Eigen::Index n = m.dim;
        if (n > dense_cap) throw Error("cesaro_continuous: dimension exceeds the dense cap");
        lam_ = m.spec->eigenvalues.real();
        mhat_.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            Vec col = m.spec->basis.column(j);
            Vec w = apply_function(*m.spec, [](cplx z) { return 1.0 / (z - iu); }, col);
            w = m.commutator_iHA(w);
            w = apply_function(*m.spec, [](cplx z) { return 1.0 / (z + iu); }, w);
            mhat_.col(j) = m.spec->basis.to_eigen(w);
        }
    }

    Vec apply(double t, const Vec& phi) const {
        Vec c = m_.spec->basis.to_eigen(phi);
        Vec out = Vec::Zero(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            cplx acc = 0.0;
            for (Eigen::Index j = 0; j < c.size(); ++j)
                acc += mhat_(i, j) * cesaro_phase_mean(t, lam_[i] - lam_[j]) * c[j];
            out[i] = acc;
        }
        return m_.spec->basis.from_eigen(out);
    }

    // trapezoid quadrature route, kept as a cross-check of the closed form
    Vec apply_quadrature(double t, const Vec& phi, double step) const {
        double lmax = lam_.cwiseAbs().maxCoeff();
        if (step > pi / (4.0 * std::max(lmax, 1e-12)))
            throw Error("cesaro_continuous: quadrature step too coarse for the fastest phase");
        long nsteps = std::max<long>(2, std::lround(t / step));
        Vec c = m_.spec->basis.to_eigen(phi);
        Vec out = Vec::Zero(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            cplx acc = 0.0;
            for (Eigen::Index j = 0; j < c.size(); ++j) {
                double gap = lam_[i] - lam_[j];
                cplx q = 0.0;
                for (long s = 0; s <= nsteps; ++s) {
                    double tau = t * double(s) / double(nsteps);
                    double wgt = (s == 0 || s == nsteps) ? 0.5 : 1.0;
                    q += wgt * std::exp(cplx(0.0, -tau * gap));
                }
                q /= double(nsteps);
                acc += mhat_(i, j) * q * c[j];
            }
            out[i] = acc;
        }
        return m_.spec->basis.from_eigen(out);
    }

private:
    const models::ModelInstance& m_;
    RVec lam_;
    Mat mhat_;
};

inline CesaroSeries cesaro_continuous(const models::ModelInstance& m,
                                      const std::vector<double>& t_grid,
                                      const std::vector<StateVector>& probes,
                                      bool with_defect = true,
                                      std::optional<double> quadrature_xcheck_step = {},
                                      const Tolerances& tol = default_tol()) {
    if (t_grid.empty()) throw Error("cesaro_continuous: empty grid");
    if (t_grid.back() > m.validity_window)
        throw Error("cesaro_continuous: horizon exceeds the validity window");
    if (t_grid.back() > m.probe_horizon(probes))
        throw Error("cesaro_continuous: probes leave the interior within the horizon");
    ContinuousCesaro engine(m);

    CesaroSeries out;
    out.discrete = false;
    out.probes = probes;
    for (const auto& p : probes) out.probe_labels.push_back(p.label);

    std::vector<StateVector> extended = probes;
    if (with_defect)
        for (const auto& p : probes) extended.push_back(m.evolve_state(1.0, p));

    const size_t np = probes.size();
    for (double t : t_grid) {
        CesaroPoint pt;
        pt.index = t;
        std::vector<Vec> acts(extended.size());
        for (size_t p = 0; p < extended.size(); ++p) acts[p] = engine.apply(t, extended[p].entries);
        if (quadrature_xcheck_step) {
            Vec q = engine.apply_quadrature(t, extended[0].entries, *quadrature_xcheck_step);
            if ((q - acts[0]).norm() > tol.quadrature_xcheck)
                throw Error("cesaro_continuous: quadrature and closed-form paths disagree");
        }
        for (size_t p = 0; p < np; ++p) {
            if (m.D)
                pt.residual.push_back((acts[p] - (*m.D)(probes[p].entries)).norm());
            else
                pt.residual.push_back(std::numeric_limits<double>::quiet_NaN());
            pt.qform.push_back(probes[p].entries.dot(acts[p]).real());
            pt.action_norm.push_back(acts[p].norm());
        }
        if (with_defect) {
            double worst = 0.0;
            for (size_t p = 0; p < np; ++p) {
                StateVector ev{acts[p], "a"};
                worst = std::max(worst, (acts[np + p] - m.evolve_state(1.0, ev).entries).norm());
            }
            pt.defect = worst;
        }
        out.actions.push_back(std::vector<Vec>(acts.begin(), acts.begin() + long(np)));
        out.points.push_back(std::move(pt));
    }
    out.check_monotone_index();
    return out;
}

// Per-index commutation defect ||[D_index, U]|| (or with e^{-iH} at s=1); the
// engines record it per point. The final entry must not exceed the first.
inline std::vector<double> commutation_defect(const CesaroSeries& series,
                                              const models::ModelInstance&) {
    std::vector<double> out;
    for (const auto& p : series.points) out.push_back(p.defect);
    if (!out.empty() && out.back() > out.front() + 1e-12)
        throw Error("commutation_defect: defect grew along the index grid");
    return out;
}

// sup over probes of |<A phi, U phi> - <phi, U A phi>| / ||phi||^2
inline double c1_probe(const LinOp& a, const std::function<Vec(const Vec&)>& apply_u,
                       const std::vector<StateVector>& probes) {
    double worst = 0.0;
    for (const auto& p : probes) {
        cplx lhs = a(p.entries).dot(apply_u(p.entries));
        cplx rhs = p.entries.dot(apply_u(a(p.entries)));
        worst = std::max(worst, std::abs(lhs - rhs) / p.entries.squaredNorm());
    }
    return worst;
}

}  // namespace decaylab
