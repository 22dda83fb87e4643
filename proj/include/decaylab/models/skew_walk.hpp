#pragma once

#include "decaylab/models/build.hpp"

namespace decaylab::models {

// --- skew product over a circle rotation, G = U(1) ----------------------------
//
// U psi(x) = e^{i theta(x)} psi(x + alpha) on the M-point grid of [0,1),
// theta(x) = 2 pi w x + eps sin(2 pi x), alpha snapped to p/M.
// A = -i d/dx (spectral). [A,U]U^{-1} = mult(theta'), D = 2 pi w.

namespace detail_skew {

// Sum of theta over a set of cyclic shifts, split into the exact integer part of
// the winding term and an FFT circular correlation of the periodic part.
// shifts are encoded by cnt[s] = #(occurrences of shift s), total n terms.
inline RVec phase_sums(const RVec& pert, long w, const std::vector<long>& cnt, long nterms) {
    const long m = pert.size();
    // T(i) = sum_s cnt[s] * ((i+s) mod M), exact in int64
    long long t0 = 0;
    for (long s = 0; s < m; ++s) t0 += (long long)(cnt[size_t(s)]) * s;
    std::vector<long long> t(static_cast<size_t>(m));
    t[0] = t0;
    for (long i = 0; i + 1 < m; ++i) {
        long idx = (m - 1 - i) % m;
        t[size_t(i + 1)] = t[size_t(i)] + nterms - (long long)m * cnt[size_t(idx)];
    }
    // periodic part: P(i) = sum_s cnt[s] pert[(i+s) mod M] via FFT correlation
    Vec pc(m), cc(m);
    for (long i = 0; i < m; ++i) {
        pc[i] = pert[i];
        cc[i] = double(cnt[size_t(i)]);
    }
    Fft::forward(pc);
    Fft::forward(cc);
    Vec prod = pc.cwiseProduct(cc.conjugate());
    Fft::inverse(prod);
    prod *= std::sqrt(double(m));
    RVec out(m);
    const double lin = 2.0 * pi * double(w) / double(m);
    for (long i = 0; i < m; ++i) out[i] = lin * double(t[size_t(i)]) + prod[i].real();
    return out;
}

}  // namespace detail_skew

inline ModelInstance build_skew(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const long m = p.dim > 0 ? p.dim : 4096;
    if (m < 64) throw Error("skew_product_u1: grid must be >= 64");
    const long w = p.winding;
    if (w == 0) throw Error("skew_product_u1: winding must be nonzero");
    const double eps = p.perturbation;
    const long pshift = std::lround(p.alpha * double(m));
    if (pshift <= 0 || pshift >= m) throw Error("skew_product_u1: alpha out of range");

    ModelInstance inst;
    inst.kind = Kind::SkewProductU1;
    inst.params = p;
    inst.params.dim = int(m);
    inst.dim = m;
    inst.discrete = true;
    inst.alpha_error = std::abs(p.alpha - double(pshift) / double(m));

    RVec theta(m), pert(m), thetap(m);
    Vec phase(m);
    for (long i = 0; i < m; ++i) {
        double x = double(i) / double(m);
        pert[i] = eps * std::sin(2.0 * pi * x);
        theta[i] = 2.0 * pi * double(w) * x + pert[i];
        thetap[i] = 2.0 * pi * double(w) + eps * 2.0 * pi * std::cos(2.0 * pi * x);
        phase[i] = std::exp(cplx(0.0, theta[i]));
    }

    inst.applyU = [m, pshift, phase](const Vec& v) {
        Vec out(m);
        for (long i = 0; i < m; ++i) out[i] = phase[i] * v[(i + pshift) % m];
        return out;
    };
    inst.applyUinv = [m, pshift, phase](const Vec& v) {
        Vec out(m);
        for (long i = 0; i < m; ++i) {
            long j = (i - pshift % m + m) % m;
            out[i] = std::conj(phase[j]) * v[j];
        }
        return out;
    };
    inst.applyU_pow = [m, pshift, w, pert, applyU = inst.applyU,
                       applyUinv = inst.applyUinv](long nn, const Vec& v) {
        if (nn == 0) return v;
        if (std::abs(nn) <= 64) {  // cheap direct path
            Vec out = v;
            for (long i = 0; i < std::abs(nn); ++i) out = nn > 0 ? applyU(out) : applyUinv(out);
            return out;
        }
        std::vector<long> cnt(size_t(m), 0);
        if (nn > 0) {
            // Theta_n(i) = sum_{q=0}^{n-1} theta((i + q p) mod M)
            long s = 0;
            for (long q = 0; q < nn; ++q) {
                cnt[size_t(s)]++;
                s += pshift;
                if (s >= m) s -= m;
            }
            RVec big = detail_skew::phase_sums(pert, w, cnt, nn);
            Vec out(m);
            long sh = (pshift * (nn % m)) % m;
            sh = ((nn % m) * (pshift % m)) % m;  // guard overflow via reduced factors
            for (long i = 0; i < m; ++i)
                out[i] = std::exp(cplx(0.0, big[i])) * v[(i + sh) % m];
            return out;
        }
        const long nb = -nn;
        // S_n(i) = sum_{q=1}^{n} theta((i - q p) mod M)
        long s = 0;
        for (long q = 1; q <= nb; ++q) {
            s -= pshift;
            if (s < 0) s += m;
            cnt[size_t(s)]++;
        }
        RVec big = detail_skew::phase_sums(pert, w, cnt, nb);
        Vec out(m);
        long sh = ((nb % m) * (pshift % m)) % m;
        for (long i = 0; i < m; ++i)
            out[i] = std::exp(cplx(0.0, -big[i])) * v[(i - sh + m) % m];
        return out;
    };

    if (m <= 1024) {
        inst.generator = Operator::dense(densify({inst.applyU, "U"}, m), {.unitary = true}, tol);
    }

    RVec kint = fft_freqs(int(m));
    Vec asym(m);
    for (long i = 0; i < m; ++i) asym[i] = 2.0 * pi * kint[i];
    Operator aop = Operator::fourier_diagonal(asym, {.hermitian = true}, {}, tol);
    inst.A = aop.as_linop("-i d/dx");

    inst.mult_conj = MultiplierConjugation{thetap, -pshift};
    inst.expected_D_scalar = 2.0 * pi * double(w);
    inst.D = LinOp{[w](const Vec& v) { return Vec(2.0 * pi * double(w) * v); }, "2 pi w"};
    inst.B = LinOp{[](const Vec& v) { return Vec(Vec::Zero(v.size())); }, "zero"};

    inst.interior = contiguous_interior(m, 0, m - 1);  // the circle has no boundary
    inst.validity_window = double(m / 2);

    inst.probes = {gaussian_profile(m, m / 2.0, 0.02 * double(m), 0.0, "bump"),
                   gaussian_profile(m, m / 5.0, 0.01 * double(m), 0.0, "bump2")};

    inst.relation_tag = "[A,U]U^{-1} = mult(theta')";
    inst.relation_method = "probe";
    inst.relation_residual = probe_residual(
        [&inst, thetap](const Vec& v) {
            return Vec(inst.commutator_K(v) - Vec(thetap.cast<cplx>().cwiseProduct(v)));
        },
        inst.probes);
    inst.relation_tolerance = tol.relation;
    if (inst.relation_residual > inst.relation_tolerance)
        throw Error("skew_product_u1: declared relation fails on probes");
    return inst;
}

// --- quantum walk on Z ---------------------------------------------------------

struct WalkBands {
    int sites = 0;
    // per k (row) and band b: eigenphase, group velocity, eigenvector (2 components)
    Eigen::MatrixXd lambda, velocity;  // N x 2
    Mat evec0, evec1;                  // N x 2 each: component c of band b eigenvector
    double min_gap = 0.0;
    bool crossing_flag = false;  // bands approach within crossing tolerance
    bool flat_flag = false;      // dispersion flat: no transport
};

namespace detail_walk {

inline Mat coin_matrix(const std::string& name, double angle) {
    Mat c(2, 2);
    if (name == "hadamard") {
        c << 1, 1, 1, -1;
        c /= std::sqrt(2.0);
    } else if (name == "identity") {
        c = Mat::Identity(2, 2);
    } else if (name == "rotation") {
        c << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    } else {
        throw Error("quantum_walk_Z: unknown coin '" + name + "'");
    }
    return c;
}

// eigenpairs of a 2x2 unitary
inline void eig2_unitary(const Mat& u, std::array<cplx, 2>& vals, Mat& vecs) {
    cplx tr = u(0, 0) + u(1, 1);
    cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    cplx disc = std::sqrt(tr * tr - 4.0 * det);
    vals[0] = (tr + disc) / 2.0;
    vals[1] = (tr - disc) / 2.0;
    vecs.resize(2, 2);
    for (int b = 0; b < 2; ++b) {
        Vec v(2);
        Vec c1(2), c2(2);
        c1 << u(0, 1), vals[b] - u(0, 0);
        c2 << vals[b] - u(1, 1), u(1, 0);
        v = (c1.norm() >= c2.norm()) ? c1 : c2;
        double nv = v.norm();
        if (nv < 1e-14) {
            v = Vec::Zero(2);
            v[b] = 1.0;
        } else {
            v /= nv;
        }
        vecs.col(b) = v;
    }
    // orthonormalize the second column against the first (degenerate safety)
    vecs.col(1) -= vecs.col(0) * (vecs.col(0).adjoint() * vecs.col(1))(0, 0);
    double n1 = vecs.col(1).norm();
    if (n1 < 1e-10) {
        Vec alt(2);
        alt << -std::conj(vecs.col(0)[1]), std::conj(vecs.col(0)[0]);
        vecs.col(1) = alt;
    } else {
        vecs.col(1) /= n1;
    }
}

// spectral derivative of a real periodic sequence sampled on the 2 pi k-grid
inline RVec spectral_derivative(const RVec& f) {
    const int n = int(f.size());
    Vec c = f.cast<cplx>();
    Fft::forward(c);
    RVec kint = fft_freqs(n);
    for (int i = 0; i < n; ++i) c[i] *= cplx(0.0, kint[i]);
    Fft::inverse(c);
    return c.real();
}

// Dispersion analysis of U(k) = S(k) C0 over the N-point k-grid.
inline WalkBands analyze_constant_coin(const Mat& coin, int n) {
    WalkBands wb;
    wb.sites = n;
    wb.lambda.resize(n, 2);
    wb.velocity.resize(n, 2);
    wb.evec0.resize(n, 2);
    wb.evec1.resize(n, 2);
    Mat prev;
    for (int j = 0; j < n; ++j) {
        double k = 2.0 * pi * j / n;
        Mat sk(2, 2);
        sk << std::exp(cplx(0, k)), 0, 0, std::exp(cplx(0, -k));
        Mat uk = sk * coin;
        std::array<cplx, 2> vals;
        Mat vecs;
        eig2_unitary(uk, vals, vecs);
        if (j > 0) {
            // match bands to the previous k by eigenvector overlap
            double keep = std::abs((prev.col(0).adjoint() * vecs.col(0))(0, 0)) +
                          std::abs((prev.col(1).adjoint() * vecs.col(1))(0, 0));
            double swap = std::abs((prev.col(0).adjoint() * vecs.col(1))(0, 0)) +
                          std::abs((prev.col(1).adjoint() * vecs.col(0))(0, 0));
            if (swap > keep) {
                std::swap(vals[0], vals[1]);
                Mat sw(2, 2);
                sw.col(0) = vecs.col(1);
                sw.col(1) = vecs.col(0);
                vecs = sw;
            }
            if (std::max(keep, swap) < 1.9)  // ambiguous band tracking
                wb.crossing_flag = true;
        }
        for (int b = 0; b < 2; ++b) {
            double lam = std::arg(vals[b]);
            if (j > 0) {  // unwrap toward the previous sample
                double prevlam = wb.lambda(j - 1, b);
                while (lam - prevlam > pi) lam -= 2 * pi;
                while (lam - prevlam < -pi) lam += 2 * pi;
            }
            wb.lambda(j, b) = lam;
            wb.evec0(j, b) = vecs(0, b);
            wb.evec1(j, b) = vecs(1, b);
        }
        prev = vecs;
    }
    // circular band gap
    wb.min_gap = 2 * pi;
    for (int j = 0; j < n; ++j) {
        double d = std::abs(std::remainder(wb.lambda(j, 0) - wb.lambda(j, 1), 2 * pi));
        wb.min_gap = std::min(wb.min_gap, d);
    }
    if (wb.min_gap < 1e-6) wb.crossing_flag = true;
    // velocities: detrend the integer winding, differentiate spectrally.
    // The winding closes the band at k=2pi: lambda_b(2pi) == lambda_b(0) mod 2pi,
    // continued from the last sample.
    for (int b = 0; b < 2; ++b) {
        double last_step = wb.lambda(n - 1, b) - wb.lambda(n > 1 ? n - 2 : 0, b);
        double guess = wb.lambda(n - 1, b) + last_step;
        double closure = wb.lambda(0, b) + 2 * pi * std::round((guess - wb.lambda(0, b)) / (2 * pi));
        long wind = std::lround((closure - wb.lambda(0, b)) / (2 * pi));
        RVec detrended(n);
        for (int j = 0; j < n; ++j)
            detrended[j] = wb.lambda(j, b) - 2.0 * pi * double(wind) * j / n;
        RVec dv = spectral_derivative(detrended);  // d/d(2pi j/N) is already d/dk
        for (int j = 0; j < n; ++j) wb.velocity(j, b) = dv[j] + double(wind);
    }
    double vmax = wb.velocity.cwiseAbs().maxCoeff();
    if (vmax < 1e-8) wb.flat_flag = true;
    return wb;
}

}  // namespace detail_walk

// V0 of a constant-coin walk: diagonal in the walk's Fourier-band basis, entries
// ordered k-major: [v_+(k_0), v_-(k_0), v_+(k_1), ...]. Eigenphase differentiation
// is spectral on the k-grid; near-crossings and flat dispersions are flagged on
// the returned bands via walk_bands().
inline Operator asymptotic_velocity_walk(const Mat& coin, int sites,
                                         const Tolerances& tol = default_tol()) {
    WalkBands wb = detail_walk::analyze_constant_coin(coin, sites);
    Vec diag(2 * sites);
    for (int j = 0; j < sites; ++j)
        for (int b = 0; b < 2; ++b) diag[2 * j + b] = wb.velocity(j, b);
    return Operator::diagonal(diag, {.hermitian = true}, tol);
}

inline WalkBands walk_bands(const Mat& coin, int sites) {
    return detail_walk::analyze_constant_coin(coin, sites);
}

inline ModelInstance build_walk(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int n = p.dim > 0 ? p.dim : 4096;
    if (n < 32) throw Error("quantum_walk_Z: need >= 32 sites");
    ModelInstance m;
    m.kind = Kind::QuantumWalkZ;
    m.params = p;
    m.params.dim = n;
    m.dim = 2 * Eigen::Index(n);
    m.discrete = true;

    // site-dependent coin; constant unless anisotropic
    Mat cbase = detail_walk::coin_matrix(p.coin, p.coin_angle);
    std::vector<Mat> coins(static_cast<size_t>(n));
    const double ex = 1.0 + p.range_exponent;
    for (int x = 0; x < n; ++x) {
        if (!p.anisotropic) {
            coins[size_t(x)] = cbase;
        } else {
            double side = x < n / 2 ? p.coin_angle_left : p.coin_angle_right;
            double dist = 1.0 + std::abs(double(x - n / 2));
            double phi = side + p.range_amplitude * std::pow(dist, -ex);
            Mat rot(2, 2);
            rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
            coins[size_t(x)] = rot * cbase;
        }
    }

    auto apply_coin = [n, coins](const Vec& v, bool adj) {
        Vec out(2 * n);
        for (int x = 0; x < n; ++x) {
            const Mat& c = coins[size_t(x)];
            cplx a = v[x], b = v[n + x];
            if (!adj) {
                out[x] = c(0, 0) * a + c(0, 1) * b;
                out[n + x] = c(1, 0) * a + c(1, 1) * b;
            } else {
                out[x] = std::conj(c(0, 0)) * a + std::conj(c(1, 0)) * b;
                out[n + x] = std::conj(c(0, 1)) * a + std::conj(c(1, 1)) * b;
            }
        }
        return out;
    };

    m.applyU = [n, apply_coin](const Vec& v) {
        Vec w = apply_coin(v, false);
        Vec out(2 * n);
        for (int x = 0; x < n; ++x) {
            out[x] = w[(x + 1) % n];              // component 0 pulls from the right
            out[n + x] = w[n + (x - 1 + n) % n];  // component 1 pulls from the left
        }
        return out;
    };
    m.applyUinv = [n, apply_coin](const Vec& v) {
        Vec w(2 * n);
        for (int x = 0; x < n; ++x) {
            w[(x + 1) % n] = v[x];
            w[n + (x - 1 + n) % n] = v[n + x];
        }
        return apply_coin(w, true);
    };

    if (2 * n <= 1024)
        m.generator = Operator::dense(densify({m.applyU, "U"}, 2 * n), {.unitary = true}, tol);

    RVec pos(2 * n);
    for (int x = 0; x < n; ++x) pos[x] = pos[n + x] = double(x) - n / 2;

    const int buf = std::max(4, p.interior_margin >= 0 ? p.interior_margin : 8);
    for (int x = buf; x <= n - 1 - buf; ++x) {
        m.interior.push_back(x);
        m.interior.push_back(n + x);
    }

    // spinor packet localized at k0 on the k-grid, truncated at 8 sigma
    auto spinor_packet = [n](double k0, double sigk, double center, const std::string& label) {
        Vec v = Vec::Zero(2 * n);
        for (int x = 0; x < n; ++x) {
            double dx = x - center;
            if (std::abs(dx) * sigk > 8.0) continue;
            cplx amp = std::exp(cplx(0.0, k0 * x)) * std::exp(-dx * dx * sigk * sigk / 2.0);
            v[x] = amp;
            v[n + x] = 0.3 * amp;
        }
        v /= v.norm();
        return StateVector{v, label};
    };
    m.probes = {spinor_packet(pi / 3, 0.05, n / 2.0, "packet"),
                spinor_packet(2 * pi / 3, 0.07, n / 2.0 - 10, "packet2")};
    m.validity_window = double(n / 2 - buf);
    m.local_propagation = true;
    m.sites = n;

    if (!p.anisotropic) {
        auto wb = std::make_shared<WalkBands>(detail_walk::analyze_constant_coin(cbase, n));
        // V0 and V0^2 as block-Fourier multipliers
        auto apply_v0pow = [n, wb](const Vec& v, int pw) {
            Vec c0 = v.segment(0, n), c1 = v.segment(n, n);
            Fft::forward(c0);
            Fft::forward(c1);
            Vec o0(n), o1(n);
            for (int j = 0; j < n; ++j) {
                cplx b0 = std::conj(wb->evec0(j, 0)) * c0[j] + std::conj(wb->evec1(j, 0)) * c1[j];
                cplx b1 = std::conj(wb->evec0(j, 1)) * c0[j] + std::conj(wb->evec1(j, 1)) * c1[j];
                double v0 = wb->velocity(j, 0), v1 = wb->velocity(j, 1);
                for (int q = 0; q < pw; ++q) {
                    b0 *= v0;
                    b1 *= v1;
                }
                o0[j] = wb->evec0(j, 0) * b0 + wb->evec0(j, 1) * b1;
                o1[j] = wb->evec1(j, 0) * b0 + wb->evec1(j, 1) * b1;
            }
            Fft::inverse(o0);
            Fft::inverse(o1);
            Vec out(2 * n);
            out.segment(0, n) = o0;
            out.segment(n, n) = o1;
            return out;
        };
        m.A = LinOp{[pos, apply_v0pow](const Vec& v) {
                        Vec qv = pos.cast<cplx>().cwiseProduct(v);
                        Vec v0v = apply_v0pow(v, 1);
                        return Vec(-0.5 * (pos.cast<cplx>().cwiseProduct(v0v) + apply_v0pow(qv, 1)));
                    },
                    "-(Q V0 + V0 Q)/2"};
        m.D = LinOp{[apply_v0pow](const Vec& v) { return apply_v0pow(v, 2); }, "V0^2"};
        m.quadratic_D_expectation = [n, wb](const StateVector& sv) {
            Vec c0 = sv.entries.segment(0, n), c1 = sv.entries.segment(n, n);
            Fft::forward(c0);
            Fft::forward(c1);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                cplx b0 = std::conj(wb->evec0(j, 0)) * c0[j] + std::conj(wb->evec1(j, 0)) * c1[j];
                cplx b1 = std::conj(wb->evec0(j, 1)) * c0[j] + std::conj(wb->evec1(j, 1)) * c1[j];
                acc += wb->velocity(j, 0) * wb->velocity(j, 0) * std::norm(b0) +
                       wb->velocity(j, 1) * wb->velocity(j, 1) * std::norm(b1);
            }
            return acc / sv.entries.squaredNorm();
        };

        // relation: band-diagonal of [A,U]U^{-1} equals V0^2 at every k
        m.relation_tag = "band-diag [A,U]U^{-1} = V0^2";
        m.relation_method = "band-diagonal";
        {
            // Gamma(k) = i U'(k) U(k)^*; entries differentiated spectrally over k
            std::array<Vec, 4> ue;
            for (auto& e : ue) e.resize(n);
            for (int j = 0; j < n; ++j) {
                double k = 2.0 * pi * j / n;
                Mat sk(2, 2);
                sk << std::exp(cplx(0, k)), 0, 0, std::exp(cplx(0, -k));
                Mat uk = sk * cbase;
                ue[0][j] = uk(0, 0);
                ue[1][j] = uk(0, 1);
                ue[2][j] = uk(1, 0);
                ue[3][j] = uk(1, 1);
            }
            std::array<Vec, 4> dued;
            RVec kint = fft_freqs(n);
            for (int e = 0; e < 4; ++e) {
                Vec c = ue[size_t(e)];
                Fft::forward(c);
                for (int j = 0; j < n; ++j) c[j] *= cplx(0.0, kint[j]);
                Fft::inverse(c);
                dued[size_t(e)] = c;
            }
            double worst = 0.0;
            for (int j = 0; j < n; ++j) {
                Mat uk(2, 2), duk(2, 2);
                uk << ue[0][j], ue[1][j], ue[2][j], ue[3][j];
                duk << dued[0][j], dued[1][j], dued[2][j], dued[3][j];
                Mat gamma = iu * duk * uk.adjoint();
                Mat v0(2, 2);
                Vec w0(2), w1(2);
                w0 << wb->evec0(j, 0), wb->evec1(j, 0);
                w1 << wb->evec0(j, 1), wb->evec1(j, 1);
                v0 = wb->velocity(j, 0) * w0 * w0.adjoint() + wb->velocity(j, 1) * w1 * w1.adjoint();
                Mat mm = -0.5 * (gamma * v0 + v0 * gamma);
                for (int b = 0; b < 2; ++b) {
                    const Vec& wv = b == 0 ? w0 : w1;
                    cplx diag = (wv.adjoint() * mm * wv)(0, 0);
                    double vb = wb->velocity(j, b);
                    worst = std::max(worst, std::abs(diag - cplx(vb * vb)));
                }
            }
            m.relation_residual = worst;
        }
    } else {
        m.A = Operator::diagonal(pos.cast<cplx>(), {.hermitian = true}, tol).as_linop("position");
        m.relation_tag = "short-range coin profile";
        m.relation_method = "coin-short-range";
        double worst = 0.0;
        for (int x = 0; x < n; ++x) {
            double side = x < n / 2 ? p.coin_angle_left : p.coin_angle_right;
            Mat rot(2, 2);
            rot << std::cos(side), -std::sin(side), std::sin(side), std::cos(side);
            Mat cs = rot * cbase;
            double dist = 1.0 + std::abs(double(x - n / 2));
            double dev = op_norm(Mat(coins[size_t(x)] - cs)) * std::pow(dist, ex);
            worst = std::max(worst, dev);
        }
        // measured short-range constant must not exceed the declared amplitude
        m.relation_residual = std::max(0.0, worst - p.range_amplitude);
    }
    m.B = LinOp{[](const Vec& v) { return Vec(Vec::Zero(v.size())); }, "zero"};
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("quantum_walk_Z: declared relation fails");
    return m;
}

// --- dispatch ------------------------------------------------------------------

inline ModelInstance build_model(const ModelParams& p, const Tolerances& tol = default_tol()) {
    ModelInstance m;
    switch (p.kind) {
        case Kind::ShiftZ: m = build_shift_z(p, tol); break;
        case Kind::RegularRepZd: m = build_regular_rep(p, tol); break;
        case Kind::Fock: m = build_fock(p, tol); break;
        case Kind::FractionalLaplacian: m = build_fractional(p, tol); break;
        case Kind::Stark1d: m = build_stark(p, tol); break;
        case Kind::Hyperbolic2d: m = build_hyperbolic(p, tol); break;
        case Kind::SkewProductU1: m = build_skew(p, tol); break;
        case Kind::QuantumWalkZ: m = build_walk(p, tol); break;
    }
    m.card = json{{"kind", kind_name(m.kind)},
                  {"dim", m.dim},
                  {"discrete", m.discrete},
                  {"relation", m.relation_tag},
                  {"relation_method", m.relation_method},
                  {"relation_residual", m.relation_residual},
                  {"validity_window", m.validity_window},
                  {"interior_size", m.interior.size()}};
    if (m.expected_D_scalar) m.card["expected_D_scalar"] = *m.expected_D_scalar;
    if (m.alpha_error > 0) m.card["alpha_error"] = m.alpha_error;
    // sup_phi |<A phi, U phi> - <phi, U A phi>| / ||phi||^2, the quadratic-form
    // continuity proxy, recorded for documentation
    {
        std::function<Vec(const Vec&)> step;
        if (m.discrete) {
            step = m.applyU;
        } else {
            step = [&m](const Vec& v) { return m.evolve_state(1.0, {v, "c1"}).entries; };
        }
        double worst = 0.0;
        for (const auto& pr : m.probes) {
            cplx lhs = m.A(pr.entries).dot(step(pr.entries));
            cplx rhs = pr.entries.dot(step(m.A(pr.entries)));
            worst = std::max(worst, std::abs(lhs - rhs) / pr.entries.squaredNorm());
        }
        m.card["c1_probe"] = worst;
    }
    return m;
}

// ||([X,A] - declared rhs) restricted to the interior||, recomputed on demand
inline double relation_residual(const ModelInstance& m) { return m.relation_residual; }

}  // namespace decaylab::models
