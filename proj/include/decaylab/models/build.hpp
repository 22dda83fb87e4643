#pragma once

#include <array>

#include "decaylab/models/base.hpp"

namespace decaylab::models {

// --- residual strategies ----------------------------------------------------

// sigma_max of the relation defect restricted to interior columns (exact kinds)
inline double interior_columns_residual(const std::function<Vec(const Vec&)>& defect,
                                        Eigen::Index dim,
                                        const std::vector<Eigen::Index>& interior) {
    Mat cols(dim, Eigen::Index(interior.size()));
    Vec e = Vec::Zero(dim);
    for (size_t j = 0; j < interior.size(); ++j) {
        e[interior[j]] = 1.0;
        cols.col(Eigen::Index(j)) = defect(e);
        e[interior[j]] = 0.0;
    }
    return op_norm(cols);
}

inline double probe_residual(const std::function<Vec(const Vec&)>& defect,
                             const std::vector<StateVector>& probes) {
    double worst = 0.0;
    for (const auto& p : probes) worst = std::max(worst, defect(p.entries).norm() / p.norm());
    return worst;
}

// --- shift_Z -----------------------------------------------------------------

inline ModelInstance build_shift_z(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int n = p.dim > 0 ? p.dim : 64;
    if (n < 8) throw Error("shift_Z: dim must be >= 8");
    ModelInstance m;
    m.kind = Kind::ShiftZ;
    m.params = p;
    m.params.dim = n;
    m.dim = n;
    m.discrete = true;

    Vec usym(n);
    for (int k = 0; k < n; ++k) usym[k] = std::exp(cplx(0.0, -2.0 * pi * k / n));
    m.generator = Operator::fourier_diagonal(usym, {.unitary = true}, {}, tol);

    m.applyU = [n](const Vec& v) {
        Vec out(n);
        for (int i = 0; i < n; ++i) out[(i + 1) % n] = v[i];
        return out;
    };
    m.applyUinv = [n](const Vec& v) {
        Vec out(n);
        for (int i = 0; i < n; ++i) out[i] = v[(i + 1) % n];
        return out;
    };
    m.applyU_pow = [n](long k, const Vec& v) {
        long sh = ((k % n) + n) % n;
        Vec out(n);
        for (int i = 0; i < n; ++i) out[int((i + sh) % n)] = v[i];
        return out;
    };

    Vec apos(n);
    for (int i = 0; i < n; ++i) apos[i] = double(i) - double(n / 2);
    Operator aop = Operator::diagonal(apos, {.hermitian = true}, tol);
    m.A = aop.as_linop("position");

    // K = [A,U]U^{-1} = mult(a_i - a_{i-1}); 1 except across the seam
    RVec kvals(n);
    for (int i = 0; i < n; ++i) kvals[i] = apos[i].real() - apos[(i - 1 + n) % n].real();
    m.mult_conj = MultiplierConjugation{kvals, +1};

    m.D = LinOp{[](const Vec& v) { return v; }, "identity"};
    m.expected_D_scalar = 1.0;
    m.B = LinOp{[](const Vec& v) { return Vec(Vec::Zero(v.size())); }, "zero"};

    const int buf = std::max(2, p.interior_margin >= 0 ? p.interior_margin : n / 16);
    m.interior = contiguous_interior(n, buf, n - 1 - buf);
    m.probes = {gaussian_profile(n, n / 2.0, 1.5, 0.0, "g0"),
                gaussian_profile(n, n / 2.0 - 3, 2.0, 0.7, "g1")};
    m.validity_window = double(n / 2 - buf);
    m.local_propagation = true;
    m.sites = n;

    m.relation_tag = "[A,U] = U";
    m.relation_method = "interior-columns";
    auto uop = *m.generator;
    m.relation_residual = interior_columns_residual(
        [&](const Vec& v) {
            Vec uv = m.applyU(v);
            return Vec(m.A(uv) - m.applyU(m.A(v)) - uv);
        },
        n, m.interior);
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("shift_Z: declared relation fails on interior");
    return m;
}

// --- regular representation of Z^d --------------------------------------------

inline ModelInstance build_regular_rep(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int d = p.reg_dimension;
    if (d != 1 && d != 2) throw Error("regular_rep_Zd: d must be 1 or 2");
    const int L = p.dim > 0 ? p.dim : 200;  // half-width per axis
    const int side = 2 * L + 1;
    const Eigen::Index dim = d == 1 ? side : Eigen::Index(side) * side;

    ModelInstance m;
    m.kind = Kind::RegularRepZd;
    m.params = p;
    m.params.dim = L;
    m.dim = dim;
    m.discrete = true;

    auto coord = [L, side, d](Eigen::Index i) {
        std::array<long, 2> c{0, 0};
        if (d == 1) {
            c[0] = long(i) - L;
        } else {
            c[0] = long(i) % side - L;
            c[1] = long(i) / side - L;
        }
        return c;
    };
    auto word_length = [](std::array<long, 2> c) { return double(std::abs(c[0]) + std::abs(c[1])); };

    // net x_j = j * e1, translations along the first axis (cyclic)
    m.applyU_pow = [side, d, dim](long j, const Vec& v) {
        Vec out(dim);
        long sh = ((j % side) + side) % side;
        if (d == 1) {
            for (long i = 0; i < side; ++i) out[(i + sh) % side] = v[i];
        } else {
            for (Eigen::Index i = 0; i < dim; ++i) {
                long x = long(i) % side, y = long(i) / side;
                out[y * side + (x + sh) % side] = v[i];
            }
        }
        return out;
    };
    m.applyU = [m_pow = m.applyU_pow](const Vec& v) { return m_pow(1, v); };
    m.applyUinv = [m_pow = m.applyU_pow](const Vec& v) { return m_pow(-1, v); };

    if (d == 1) {
        Vec usym(side);
        for (int k = 0; k < side; ++k) usym[k] = std::exp(cplx(0.0, -2.0 * pi * k / side));
        m.generator = Operator::fourier_diagonal(usym, {.unitary = true}, {}, tol);
    }

    Vec ell(dim);
    for (Eigen::Index i = 0; i < dim; ++i) ell[i] = word_length(coord(i));
    Operator aop = Operator::diagonal(ell, {.hermitian = true}, tol);
    m.A = aop.as_linop("word-length");

    RVec kvals(dim);  // ell(n) - ell(n - e1) with cyclic previous site
    for (Eigen::Index i = 0; i < dim; ++i) {
        auto c = coord(i);
        std::array<long, 2> cp = c;
        cp[0] = c[0] == -L ? L : c[0] - 1;
        kvals[i] = word_length(c) - word_length(cp);
    }
    m.mult_conj = MultiplierConjugation{kvals, +1};

    m.D = LinOp{[](const Vec& v) { return Vec(-v); }, "-identity"};
    m.expected_D_scalar = -1.0;
    m.B = LinOp{[](const Vec& v) { return Vec(Vec::Zero(v.size())); }, "zero"};

    const int buf = std::max(2, p.interior_margin >= 0 ? p.interior_margin : side / 16);
    if (d == 1) {
        m.interior = contiguous_interior(dim, buf, dim - 1 - buf);
    } else {
        for (Eigen::Index i = 0; i < dim; ++i) {
            long x = long(i) % side, y = long(i) / side;
            if (x >= buf && x <= side - 1 - buf && y >= buf && y <= side - 1 - buf)
                m.interior.push_back(i);
        }
    }
    if (d == 1) {
        m.probes = {gaussian_profile(dim, L, 2.0, 0.0, "g0"),
                    gaussian_profile(dim, L - 4, 3.0, 0.4, "g1")};
    } else {
        Vec v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            auto c = coord(i);
            v[i] = std::exp(-(double(c[0] * c[0]) + double(c[1] * c[1])) / 8.0);
        }
        v /= v.norm();
        m.probes = {{v, "g2d"}};
    }
    m.validity_window = double(L - buf);
    m.local_propagation = true;
    m.sites = side;  // propagation runs along the first axis

    m.relation_tag = "[A,U(x)]U(x)^{-1} = l(.) - l(x^{-1}.)";
    m.relation_method = "interior-columns";
    m.relation_residual = interior_columns_residual(
        [&](const Vec& v) {
            Vec uv = m.applyU(v);
            Vec lhs = m.A(uv) - m.applyU(m.A(v));
            return Vec(lhs - Vec(kvals.cast<cplx>().cwiseProduct(uv)));
        },
        dim, m.interior);
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("regular_rep_Zd: declared relation fails on interior");
    return m;
}

// --- fock: H = Re(unilateral shift), A = (Im(S)N + N Im(S))/2 -----------------

inline ModelInstance build_fock(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int n = p.dim > 0 ? p.dim : 512;
    if (n < 16) throw Error("fock: dim must be >= 16");
    ModelInstance m;
    m.kind = Kind::Fock;
    m.params = p;
    m.params.dim = n;
    m.dim = n;
    m.discrete = false;

    m.applyH = [n](const Vec& v) {
        Vec out(n);
        for (int i = 0; i < n; ++i) {
            cplx acc = 0.0;
            if (i > 0) acc += v[i - 1];
            if (i + 1 < n) acc += v[i + 1];
            out[i] = 0.5 * acc;
        }
        return out;
    };
    if (n <= 2048) {
        Mat h = Mat::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = 0.5;
        m.generator = Operator::dense(std::move(h), {.hermitian = true}, tol);
    }

    // closed-form sine eigenbasis of the free hopping matrix
    Vec lam(n);
    for (int k = 0; k < n; ++k) lam[k] = std::cos(pi * (k + 1) / (n + 1));
    Eigen::VectorXi perm = detail::sort_perm(lam, true);
    Vec sorted(n);
    for (int i = 0; i < n; ++i) sorted[i] = lam[perm[i]];
    m.spec = std::make_shared<SpectralData>(
        SpectralData{sorted, true, SpectralBasis::sine(perm), tol.cluster, {}});
    m.spec->clusters = detail::cluster_indices(sorted, true, tol.cluster);

    // A = (Im(S) N + N Im(S))/2 with the number operator N = diag(1,2,3,...),
    // the unique N with S N S* = N - 1 on the half line:
    // (Av)_x = ((2x+1) v_{x-1} - (2x+3) v_{x+1}) / (4i)
    m.A = LinOp{[n](const Vec& v) {
                    Vec out(n);
                    const cplx c = 1.0 / (4.0 * iu);
                    for (int i = 0; i < n; ++i) {
                        cplx acc = 0.0;
                        if (i > 0) acc += double(2 * i + 1) * v[i - 1];
                        if (i + 1 < n) acc -= double(2 * i + 3) * v[i + 1];
                        out[i] = c * acc;
                    }
                    return out;
                },
                "(Im(S)N + N Im(S))/2"};

    m.f_map = [](double x) { return 1.0 - x * x; };
    m.g_map = [](double x) { return (1.0 - x * x) / (1.0 + x * x); };
    m.gprime_map = [](double x) {
        double b = 1.0 + x * x;
        return -4.0 * x / (b * b);
    };

    auto spec = m.spec;
    m.Atilde = LinOp{[spec, A = m.A](const Vec& v) {
                         Vec w = apply_function(*spec, [](cplx z) { return 1.0 / (z - iu); }, v);
                         w = A(w);
                         return apply_function(*spec, [](cplx z) { return 1.0 / (z + iu); }, w);
                     },
                     "(H+i)^{-1} A (H-i)^{-1}"};
    m.B = LinOp{[spec, gp = m.gprime_map](const Vec& v) {
                    return apply_function(*spec, [gp](cplx z) { return iu * gp(z.real()); }, v);
                },
                "i g'(H)"};
    m.D = LinOp{[spec, g = m.g_map](const Vec& v) {
                    return apply_function(*spec, [g](cplx z) { return cplx(g(z.real()), 0.0); }, v);
                },
                "g(H)"};

    const int buf = std::max(4, p.interior_margin >= 0 ? p.interior_margin : 6);
    m.interior = contiguous_interior(n, 0, n - 1 - buf);  // site 0 boundary is physical
    m.validity_window = double(n - 1 - buf);
    m.local_propagation = true;
    m.sites = n;
    // beyond-light-cone (Airy) tails and the resolvent kernel reach ~70 sites
    // before they drop under 1e-9; identity checks must keep that margin
    m.probe_margin_extra = 70.0;

    m.probes = {gaussian_profile(n, n / 2.0, 1.5, 0.0, "g0"),
                gaussian_profile(n, n / 2.0 + 5, 2.5, 0.0, "g1")};

    m.relation_tag = "[iH,A] = 1 - H^2";
    m.relation_method = "interior-columns";
    auto defect = [&m](const Vec& v) {
        Vec lhs = m.commutator_iHA(v);
        Vec rhs = v - m.applyH(m.applyH(v));
        return Vec(lhs - rhs);
    };
    if (n <= 1024)
        m.relation_residual = interior_columns_residual(defect, n, m.interior);
    else
        m.relation_residual = probe_residual(defect, m.probes);
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("fock: declared relation fails on interior");
    return m;
}

// --- fractional laplacian: fourier symbol |kappa|^s, dilation conjugate -------

inline ModelInstance build_fractional(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int n = p.dim > 0 ? p.dim : 4096;
    const double len = p.length > 0 ? p.length : 256.0;
    const double s = p.s;
    if (!(s > 0.0 && s < 2.0)) throw Error("fractional_laplacian: s must lie in (0,2)");
    ModelInstance m;
    m.kind = Kind::FractionalLaplacian;
    m.params = p;
    m.params.dim = n;
    m.params.length = len;
    m.dim = n;
    m.discrete = false;

    const double h = len / n;
    RVec kint = fft_freqs(n);
    Vec hsym(n), ksym(n);
    for (int i = 0; i < n; ++i) {
        double kappa = 2.0 * pi * kint[i] / len;
        hsym[i] = std::pow(std::abs(kappa), s);
        ksym[i] = kappa;
    }
    m.generator = Operator::fourier_diagonal(hsym, {.hermitian = true}, {}, tol);
    Operator hop = *m.generator;
    m.applyH = [hop](const Vec& v) { return hop.apply(v); };
    m.spec = std::make_shared<SpectralData>(eig(hop, tol.cluster));

    Vec xvals(n);
    for (int i = 0; i < n; ++i) xvals[i] = (double(i) - n / 2) * h;
    Operator pop = Operator::fourier_diagonal(ksym, {.hermitian = true}, {}, tol);
    m.A = LinOp{[pop, xvals](const Vec& v) {
                    Vec qv = xvals.cwiseProduct(v);
                    Vec pv = pop.apply(v);
                    return Vec(0.5 * (xvals.cwiseProduct(pv) + pop.apply(qv)));
                },
                "(QP+PQ)/2"};

    m.f_map = [s](double x) { return s * x; };
    m.g_map = [s](double x) { return s * x / (1.0 + x * x); };
    m.gprime_map = [s](double x) {
        double b = 1.0 + x * x;
        return s * (1.0 - x * x) / (b * b);
    };

    Vec rm(n), rp(n), bsym(n), gsym(n);
    for (int i = 0; i < n; ++i) {
        double lv = hsym[i].real();
        rm[i] = 1.0 / (cplx(lv) - iu);
        rp[i] = 1.0 / (cplx(lv) + iu);
        bsym[i] = iu * m.gprime_map(lv);
        gsym[i] = m.g_map(lv);
    }
    Operator rmop = Operator::fourier_diagonal(rm, {}, {}, tol);
    Operator rpop = Operator::fourier_diagonal(rp, {}, {}, tol);
    m.Atilde = LinOp{[rmop, rpop, A = m.A](const Vec& v) { return rpop.apply(A(rmop.apply(v))); },
                     "(H+i)^{-1} A (H-i)^{-1}"};
    Operator bop = Operator::fourier_diagonal(bsym, {}, {}, tol);
    m.B = bop.as_linop("i g'(H)");
    Operator dop = Operator::fourier_diagonal(gsym, {.hermitian = true}, {}, tol);
    m.D = dop.as_linop("g(H)");

    const int buf = std::max(8, p.interior_margin >= 0 ? p.interior_margin : n / 8);
    m.interior = contiguous_interior(n, buf, n - 1 - buf);

    const double k0 = 2.0, sig_k = 0.2;  // canonical probe: right-moving packet
    m.probes = {gaussian_profile(n, n / 2.0, 1.0 / (sig_k * h), k0 * h, "packet"),
                gaussian_profile(n, n / 2.0 - 16, 0.7 / (sig_k * h), 1.4 * k0 * h, "packet2")};
    const double vmax = s * std::pow(std::abs(k0) + 6 * sig_k, s - 1.0);
    m.validity_window = 0.4 * len / std::max(vmax, 1e-6);

    m.relation_tag = "[iH,A] = sH";
    m.relation_method = "symbol-homogeneity";
    double worst = 0.0, scale = hsym.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        double kappa = ksym[i].real();
        double euler = kappa == 0.0 ? 0.0 : kappa * s * std::pow(std::abs(kappa), s - 1.0) *
                                                (kappa > 0 ? 1.0 : -1.0);
        worst = std::max(worst, std::abs(euler - s * hsym[i].real()));
    }
    m.relation_residual = worst / std::max(scale, 1.0);
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("fractional_laplacian: symbol homogeneity fails");
    return m;
}

// --- stark: spectral-grid representation of the pair [iH,A]=1 -----------------

inline ModelInstance build_stark(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int n = p.dim > 0 ? p.dim : 2048;
    const double len = p.length > 0 ? p.length : 40.0;  // spectral-window width
    ModelInstance m;
    m.kind = Kind::Stark1d;
    m.params = p;
    m.params.dim = n;
    m.params.length = len;
    m.dim = n;
    m.discrete = false;

    Vec lam(n);
    for (int i = 0; i < n; ++i) lam[i] = (double(i) - n / 2) * (len / n);
    m.generator = Operator::diagonal(lam, {.hermitian = true}, tol);
    Operator hop = *m.generator;
    m.applyH = [hop](const Vec& v) { return hop.apply(v); };
    m.spec = std::make_shared<SpectralData>(eig(hop, tol.cluster));

    // A = i d/dlambda, spectral derivative on the periodic lambda-grid
    RVec kint = fft_freqs(n);
    Vec asym(n);
    for (int i = 0; i < n; ++i) asym[i] = -2.0 * pi * kint[i] / len;
    Operator aop = Operator::fourier_diagonal(asym, {.hermitian = true}, {}, tol);
    m.A = aop.as_linop("i d/dH");

    m.f_map = [](double) { return 1.0; };
    m.g_map = [](double x) { return 1.0 / (1.0 + x * x); };
    m.gprime_map = [](double x) {
        double b = 1.0 + x * x;
        return -2.0 * x / (b * b);
    };

    Vec rm(n), rp(n), bdiag(n), gdiag(n);
    for (int i = 0; i < n; ++i) {
        double lv = lam[i].real();
        rm[i] = 1.0 / (cplx(lv) - iu);
        rp[i] = 1.0 / (cplx(lv) + iu);
        bdiag[i] = iu * m.gprime_map(lv);
        gdiag[i] = m.g_map(lv);
    }
    Operator rmop = Operator::diagonal(rm, {}, tol), rpop = Operator::diagonal(rp, {}, tol);
    m.Atilde = LinOp{[rmop, rpop, A = m.A](const Vec& v) { return rpop.apply(A(rmop.apply(v))); },
                     "(H+i)^{-1} A (H-i)^{-1}"};
    m.B = Operator::diagonal(bdiag, {}, tol).as_linop("i g'(H)");
    m.D = Operator::diagonal(gdiag, {.hermitian = true}, tol).as_linop("g(H)");

    const int buf = std::max(8, p.interior_margin >= 0 ? p.interior_margin : n / 8);
    m.interior = contiguous_interior(n, buf, n - 1 - buf);
    // the derivative operator resolves e^{i tau H} only up to the grid Nyquist
    m.validity_window = 0.75 * pi * n / len;

    const double dl = len / n;
    m.probes = {gaussian_profile(n, n / 2.0, 1.0 / dl, 0.0, "g0"),
                gaussian_profile(n, n / 2.0 + 2.0 / dl, 0.7 / dl, 0.5 * dl, "g1")};

    m.relation_tag = "[iH,A] = 1";
    m.relation_method = "probe";
    m.relation_residual = probe_residual(
        [&m](const Vec& v) { return Vec(m.commutator_iHA(v) - v); }, m.probes);
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("stark_1d: declared relation fails on probes");
    return m;
}

// --- hyperbolic operator on the 2-torus: symbol kx^2 - ky^2 -------------------

inline ModelInstance build_hyperbolic(const ModelParams& p, const Tolerances& tol = default_tol()) {
    const int n = p.dim > 0 ? p.dim : 64;  // per axis
    ModelInstance m;
    m.kind = Kind::Hyperbolic2d;
    m.params = p;
    m.params.dim = n;
    m.dim = Eigen::Index(n) * n;
    m.discrete = false;

    RVec kint = fft_freqs(n);
    Vec hsym(m.dim);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) hsym[Eigen::Index(a) * n + b] = kint[a] * kint[a] - kint[b] * kint[b];
    m.generator = Operator::fourier_diagonal(hsym, {.hermitian = true}, {n, n}, tol);
    Operator hop = *m.generator;
    m.applyH = [hop](const Vec& v) { return hop.apply(v); };
    m.spec = std::make_shared<SpectralData>(eig(hop, tol.cluster));

    Vec px(m.dim), py(m.dim), xs(m.dim), ys(m.dim);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Eigen::Index i = Eigen::Index(a) * n + b;
            px[i] = kint[a];
            py[i] = kint[b];
            xs[i] = 2.0 * pi * (a - n / 2) / n;
            ys[i] = 2.0 * pi * (b - n / 2) / n;
        }
    Operator pxop = Operator::fourier_diagonal(px, {.hermitian = true}, {n, n}, tol);
    Operator pyop = Operator::fourier_diagonal(py, {.hermitian = true}, {n, n}, tol);
    m.A = LinOp{[pxop, pyop, xs, ys](const Vec& v) {
                    Vec out = 0.5 * (xs.cwiseProduct(pxop.apply(v)) + pxop.apply(Vec(xs.cwiseProduct(v))));
                    out += 0.5 * (ys.cwiseProduct(pyop.apply(v)) + pyop.apply(Vec(ys.cwiseProduct(v))));
                    return out;
                },
                "(Q.P+P.Q)/2"};

    m.f_map = [](double x) { return 2.0 * x; };
    m.g_map = [](double x) { return 2.0 * x / (1.0 + x * x); };
    m.gprime_map = [](double x) {
        double b = 1.0 + x * x;
        return 2.0 * (1.0 - x * x) / (b * b);
    };

    Vec rm(m.dim), rp(m.dim), bsym(m.dim), gsym(m.dim);
    for (Eigen::Index i = 0; i < m.dim; ++i) {
        double lv = hsym[i].real();
        rm[i] = 1.0 / (cplx(lv) - iu);
        rp[i] = 1.0 / (cplx(lv) + iu);
        bsym[i] = iu * m.gprime_map(lv);
        gsym[i] = m.g_map(lv);
    }
    Operator rmop = Operator::fourier_diagonal(rm, {}, {n, n}, tol);
    Operator rpop = Operator::fourier_diagonal(rp, {}, {n, n}, tol);
    m.Atilde = LinOp{[rmop, rpop, A = m.A](const Vec& v) { return rpop.apply(A(rmop.apply(v))); },
                     "(H+i)^{-1} A (H-i)^{-1}"};
    m.B = Operator::fourier_diagonal(bsym, {}, {n, n}, tol).as_linop("i g'(H)");
    m.D = Operator::fourier_diagonal(gsym, {.hermitian = true}, {n, n}, tol).as_linop("g(H)");

    const int buf = std::max(4, p.interior_margin >= 0 ? p.interior_margin : n / 8);
    for (int a = buf; a <= n - 1 - buf; ++a)
        for (int b = buf; b <= n - 1 - buf; ++b) m.interior.push_back(Eigen::Index(a) * n + b);
    m.validity_window = 0.3 * pi / std::max(1.0, 2.0 * 5.0);  // modest horizon, x-seam limited

    // 2D modulated product gaussian, modes near (3,1)
    {
        Vec v(m.dim);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double dx = a - n / 2.0, dy = b - n / 2.0;
                double sig = n / 12.0;
                v[Eigen::Index(a) * n + b] =
                    std::exp(cplx(0.0, 2.0 * pi * (3.0 * a + 1.0 * b) / n)) *
                    std::exp(-(dx * dx + dy * dy) / (2 * sig * sig));
            }
        v /= v.norm();
        m.probes = {{v, "packet31"}};
    }

    m.relation_tag = "[iH,A] = 2H";
    m.relation_method = "symbol-homogeneity";
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.dim; ++i) {
        double euler = px[i].real() * (2.0 * px[i].real()) + py[i].real() * (-2.0 * py[i].real());
        worst = std::max(worst, std::abs(euler - 2.0 * hsym[i].real()));
    }
    m.relation_residual = worst / std::max(hsym.cwiseAbs().maxCoeff(), 1.0);
    m.relation_tolerance = tol.relation;
    if (m.relation_residual > m.relation_tolerance)
        throw Error("hyperbolic_2d: symbol homogeneity fails");
    return m;
}

}  // namespace decaylab::models
