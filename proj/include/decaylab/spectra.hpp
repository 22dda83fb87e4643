#pragma once

#include "decaylab/cesaro.hpp"

namespace decaylab {

// Orthogonal projections onto eigenvalue clusters.
struct ProjectionFamily {
    std::vector<Mat> projections;
    std::vector<cplx> labels;  // representative eigenvalue per cluster

    static ProjectionFamily from_spectral(const SpectralData& sd, Eigen::Index dense_cap = 1024) {
        if (sd.dim() > dense_cap) throw Error("ProjectionFamily: dimension exceeds the dense cap");
        ProjectionFamily out;
        for (const auto& cluster : sd.clusters) {
            Mat p = Mat::Zero(sd.dim(), sd.dim());
            for (auto i : cluster) {
                Vec col = sd.basis.column(i);
                p += col * col.adjoint();
            }
            out.projections.push_back(std::move(p));
            out.labels.push_back(sd.eigenvalues[cluster.front()]);
        }
        return out;
    }

    struct Check {
        double idempotent = 0, orthogonal = 0, completeness = 0;
    };
    Check verify() const {
        Check c;
        if (projections.empty()) return c;
        const Eigen::Index n = projections.front().rows();
        Mat sum = Mat::Zero(n, n);
        for (size_t a = 0; a < projections.size(); ++a) {
            const Mat& p = projections[a];
            c.idempotent = std::max(c.idempotent, op_norm(Mat(p * p - p)));
            for (size_t b = a + 1; b < projections.size(); ++b)
                c.orthogonal = std::max(c.orthogonal, op_norm(Mat(p * projections[b])));
            sum += p;
        }
        c.completeness = op_norm(Mat(sum - Mat::Identity(n, n)));
        return c;
    }
};

// max over clusters of ||E ([A,U]U^{-1}) E|| (unitary) or ||E [iH,A] E|| (hermitian)
inline double virial_check(const models::ModelInstance& m, Eigen::Index dense_cap = 1024) {
    if (m.dim > dense_cap) throw Error("virial_check: dimension exceeds the dense cap");
    Mat w(m.dim, m.dim);
    std::shared_ptr<SpectralData> sd;
    if (m.discrete) {
        if (!m.generator) throw Error("virial_check: model has no concrete generator");
        sd = std::make_shared<SpectralData>(eig(*m.generator));
        w = densify({[&m](const Vec& v) { return m.commutator_K(v); }, "K"}, m.dim);
    } else {
        sd = m.spec;
        w = densify({[&m](const Vec& v) { return m.commutator_iHA(v); }, "[iH,A]"}, m.dim);
    }
    double worst = 0.0;
    for (const auto& cluster : sd->clusters) {
        Mat cols(m.dim, Eigen::Index(cluster.size()));
        for (size_t j = 0; j < cluster.size(); ++j) cols.col(Eigen::Index(j)) = sd->basis.column(cluster[j]);
        Mat block = cols.adjoint() * w * cols;
        worst = std::max(worst, op_norm(block));
    }
    return worst;
}

// running Cesaro mean of ||K U^{-m} phi||^2 against the exact eigendata limit
// sum_theta ||K E_theta phi||^2; returns |mean_n - limit| at the grid indices.
inline std::vector<double> rage_scalar(const Operator& u, const LinOp& k, const StateVector& phi,
                                       const std::vector<long>& n_grid) {
    SpectralData sd = eig(u);
    double limit = 0.0;
    for (const auto& cluster : sd.clusters) limit += k(sd.project(phi.entries, cluster)).squaredNorm();
    std::vector<double> out;
    Vec w = phi.entries;
    Operator uinv = u.adjoint();
    double acc = 0.0;
    long cur = 0;
    for (long n : n_grid) {
        while (cur < n) {
            acc += k(w).squaredNorm();
            w = uinv.apply(w);
            ++cur;
        }
        out.push_back(std::abs(acc / double(n) - limit));
    }
    return out;
}

struct RageOperatorResult {
    std::vector<long> indices;
    std::vector<double> deviation;   // ||(1/n) sum U^m K U^{-m} - limit||
    std::vector<double> gap_bound;   // 2 ||K|| / (n g)
    double min_gap = 0.0;
    double limit_recon_error = 0.0;  // self-consistency of the eigendata limit
};

namespace detail_rage {

inline double min_cluster_gap(const SpectralData& sd) {
    // smallest eigenphase distance between distinct clusters
    double g = 2 * pi;
    const auto& cl = sd.clusters;
    for (size_t a = 0; a < cl.size(); ++a)
        for (size_t b = a + 1; b < cl.size(); ++b)
            for (auto i : cl[a])
                for (auto j : cl[b]) {
                    double d = std::abs(
                        std::remainder(std::arg(sd.eigenvalues[i]) - std::arg(sd.eigenvalues[j]), 2 * pi));
                    g = std::min(g, d);
                }
    return g;
}

inline Mat cluster_diagonal_part(const SpectralData& sd, const Mat& k) {
    const Eigen::Index n = sd.dim();
    Mat v(n, n);
    for (Eigen::Index j = 0; j < n; ++j) v.col(j) = sd.basis.column(j);
    Mat khat = v.adjoint() * k * v;
    Mat mask = Mat::Zero(n, n);
    for (const auto& cluster : sd.clusters)
        for (auto i : cluster)
            for (auto j : cluster) mask(i, j) = khat(i, j);
    return v * mask * v.adjoint();
}

}  // namespace detail_rage

// ||(1/n) sum_{m<n} U^m K U^{-m} - sum_theta E_theta K E_theta|| for rank-one
// K = a b*; the running sum is accumulated from the evolving pair (U^m a, U^m b).
inline RageOperatorResult rage_operator_rank1(const Operator& u, const Vec& a, const Vec& b,
                                              const std::vector<long>& n_grid) {
    const Eigen::Index dim = u.dim();
    SpectralData sd = eig(u);
    Mat k = a * b.adjoint();
    Mat limit = detail_rage::cluster_diagonal_part(sd, k);

    RageOperatorResult out;
    out.min_gap = detail_rage::min_cluster_gap(sd);
    double knorm = a.norm() * b.norm();

    // reconstruct the limit along the independent route sum_theta E K E,
    // cluster by cluster; the two assemblies must agree
    {
        Mat assembled = Mat::Zero(dim, dim);
        for (const auto& cluster : sd.clusters) {
            Mat vc(dim, Eigen::Index(cluster.size()));
            for (size_t j = 0; j < cluster.size(); ++j)
                vc.col(Eigen::Index(j)) = sd.basis.column(cluster[j]);
            Mat block = vc.adjoint() * k * vc;
            assembled += vc * block * vc.adjoint();
        }
        out.limit_recon_error = op_norm(Mat(assembled - limit));
    }

    Vec ua = a, ub = b;
    Mat acc = Mat::Zero(dim, dim);
    long cur = 0;
    for (long n : n_grid) {
        while (cur < n) {
            acc += ua * ub.adjoint();
            ua = u.apply(ua);
            ub = u.apply(ub);
            ++cur;
        }
        out.indices.push_back(n);
        out.deviation.push_back(op_norm(Mat(acc / double(n) - limit)));
        out.gap_bound.push_back(2.0 * knorm / (double(n) * out.min_gap));
    }
    return out;
}

// dense K variant (kept for cross-checks at modest n)
inline RageOperatorResult rage_operator(const Operator& u, const Mat& k,
                                        const std::vector<long>& n_grid) {
    const Eigen::Index dim = u.dim();
    SpectralData sd = eig(u);
    Mat limit = detail_rage::cluster_diagonal_part(sd, k);
    RageOperatorResult out;
    out.min_gap = detail_rage::min_cluster_gap(sd);
    double knorm = op_norm(k);
    Mat conj = k, acc = Mat::Zero(dim, dim);
    Mat ud = u.to_dense();
    Mat udh = ud.adjoint();
    long cur = 0;
    for (long n : n_grid) {
        while (cur < n) {
            acc += conj;
            conj = ud * conj * udh;
            ++cur;
        }
        out.indices.push_back(n);
        out.deviation.push_back(op_norm(Mat(acc / double(n) - limit)));
        out.gap_bound.push_back(2.0 * knorm / (double(n) * out.min_gap));
    }
    return out;
}

// max over clusters of ||E_theta D (1 - E_theta)||: off-diagonal leakage of D
// across the spectral clusters of the generator.
inline double decomposability_check(const LinOp& d, const SpectralData& sd,
                                    Eigen::Index dense_cap = 1024) {
    if (sd.dim() > dense_cap) throw Error("decomposability_check: dimension exceeds the dense cap");
    const Eigen::Index n = sd.dim();
    Mat v(n, n);
    for (Eigen::Index j = 0; j < n; ++j) v.col(j) = sd.basis.column(j);
    Mat dhat = v.adjoint() * densify(d, n) * v;
    double worst = 0.0;
    for (const auto& cluster : sd.clusters) {
        std::vector<char> in(size_t(n), 0);
        for (auto i : cluster) in[size_t(i)] = 1;
        Mat rows(Eigen::Index(cluster.size()), n);
        Eigen::Index r = 0;
        for (auto i : cluster) rows.row(r++) = dhat.row(i);
        for (Eigen::Index c = 0; c < n; ++c)
            if (in[size_t(c)]) rows.col(c).setZero();
        worst = std::max(worst, op_norm(rows));
    }
    return worst;
}

// Partial sums of ||(D - D_index) phi||^2 along the series grid (trapezoid in the
// index), with the boundedness heuristic: last-decade increment over total.
// Diagnostic only; finite truncations cannot certify absolute continuity.
struct SummabilityDiagnostic {
    std::vector<double> partial_sums;
    double last_decade_fraction = 0.0;
    std::string caveat = "diagnostic, not a proof of absolute continuity";
};

inline SummabilityDiagnostic ac_summability(const CesaroSeries& series, size_t probe = 0) {
    SummabilityDiagnostic out;
    double acc = 0.0;
    const auto& pts = series.points;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (probe >= pts[i].residual.size()) throw Error("ac_summability: probe index out of range");
        double r2 = pts[i].residual[probe] * pts[i].residual[probe];
        if (i > 0) {
            double r2p = pts[i - 1].residual[probe] * pts[i - 1].residual[probe];
            acc += 0.5 * (r2 + r2p) * (pts[i].index - pts[i - 1].index);
        } else {
            acc += r2;  // opening weight
        }
        out.partial_sums.push_back(acc);
    }
    if (!pts.empty() && acc > 0) {
        double t_end = pts.back().index;
        double decade_start = t_end / 10.0;
        double before = 0.0;
        for (size_t i = 0; i < pts.size(); ++i)
            if (pts[i].index <= decade_start) before = out.partial_sums[i];
        out.last_decade_fraction = (acc - before) / acc;
    }
    return out;
}

}  // namespace decaylab
