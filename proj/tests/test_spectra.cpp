#include <catch2/catch_amalgamated.hpp>

#include "decaylab/spectra.hpp"
#include "oracles.hpp"

using namespace decaylab;
using namespace decaylab::models;
using Catch::Approx;

namespace {

Operator haar_unitary(Eigen::Index n, unsigned seed) {
    Mat a(n, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return Operator::dense(q, {.unitary = true});
}

Vec random_vec(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
    return v;
}

}  // namespace

TEST_CASE("projection family: idempotent, orthogonal, complete") {
    Operator u = haar_unitary(48, 3);
    SpectralData sd = eig(u);
    ProjectionFamily pf = ProjectionFamily::from_spectral(sd);
    auto chk = pf.verify();
    REQUIRE(chk.idempotent < 1e-10);
    REQUIRE(chk.orthogonal < 1e-10);
    REQUIRE(chk.completeness < 1e-9);
}

TEST_CASE("virial: diagonal entries of [iH,A] vanish in the eigenbasis") {
    // algebraic identity: <v,(HA-AH)v> = lam<v,Av> - lam<v,Av> = 0
    const int n = 64;
    Mat a = Mat::Random(n, n);
    Mat h0 = Mat::Random(n, n);
    Mat h = 0.5 * (h0 + h0.adjoint());
    HermEig he = eig_hermitian_dense(h);
    Mat comm = iu * (h * a - a * h);
    Mat diag = he.vectors.adjoint() * comm * he.vectors;
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(diag(i, i)) < 1e-12 * op_norm(comm));
}

TEST_CASE("virial_check on zoo models") {
    ModelParams pf;
    pf.kind = Kind::Fock;
    pf.dim = 512;
    REQUIRE(virial_check(build_fock(pf)) < 1e-9);

    ModelParams pw;
    pw.kind = Kind::QuantumWalkZ;
    pw.dim = 256;
    REQUIRE(virial_check(build_walk(pw)) < 1e-9);

    ModelParams ps;
    ps.kind = Kind::ShiftZ;
    ps.dim = 256;
    REQUIRE(virial_check(build_shift_z(ps)) < 1e-9);
}

TEST_CASE("rage scalar: constant and alternating toy cases") {
    Operator id = Operator::identity(4);
    Mat x = Mat::Zero(4, 4);
    x(0, 1) = x(1, 0) = 1.0;
    LinOp k{[x](const Vec& v) { return Vec(x * v); }, "K"};
    StateVector phi{random_vec(4, 9), "phi"};
    auto dev = rage_scalar(id, k, phi, {1, 10, 100});
    for (double d : dev) REQUIRE(d < 1e-12);

    Vec d2(2);
    d2 << 1.0, -1.0;
    Operator u2 = Operator::diagonal(d2, {.hermitian = true, .unitary = true});
    Mat px(2, 2);
    px << 0, 1, 1, 0;
    LinOp k2{[px](const Vec& v) { return Vec(px * v); }, "X"};
    Vec e0(2);
    e0 << 1.0, 0.0;
    auto dev2 = rage_scalar(u2, k2, {e0, "e0"}, {1, 7, 50});
    for (double d : dev2) REQUIRE(d < 1e-12);  // ||X U^{-m} e0|| = 1 for all m
}

TEST_CASE("rage scalar: gap-controlled decay for a random unitary") {
    Operator u = haar_unitary(64, 17);
    Vec a = random_vec(64, 21).normalized();
    Mat k = a * a.adjoint();
    LinOp kop{[k](const Vec& v) { return Vec(k * v); }, "K"};
    StateVector phi{random_vec(64, 23).normalized(), "phi"};
    auto dev = rage_scalar(u, kop, phi, {10, 100, 1000, 10000});
    REQUIRE(dev[3] < dev[0]);
    REQUIRE(dev[3] < 0.05);
}

TEST_CASE("rage operator: diag(1,-1) with pauli-x has limit zero and 1/n parity") {
    Vec d2(2);
    d2 << 1.0, -1.0;
    Operator u2 = Operator::diagonal(d2, {.hermitian = true, .unitary = true});
    Mat px(2, 2);
    px << 0, 1, 1, 0;
    auto res = rage_operator(u2, px, {7, 8, 101, 1000});
    // sum of (-1)^m X over m<n: zero at even n, X/n at odd n
    REQUIRE(res.deviation[0] == Approx(1.0 / 7).margin(1e-12));
    REQUIRE(res.deviation[1] < 1e-12);
    REQUIRE(res.deviation[2] == Approx(1.0 / 101).margin(1e-12));
    REQUIRE(res.deviation[3] < 1e-12);
}

TEST_CASE("rage operator: rank-1 bound 2||K||/(n g) for seeded unitaries") {
    for (unsigned seed : {1u, 2u, 3u}) {
        Operator u = haar_unitary(128, seed);
        Vec a = random_vec(128, 100 + seed).normalized();
        Vec b = random_vec(128, 200 + seed).normalized();
        auto res = rage_operator_rank1(u, a, b, {100, 1000});
        REQUIRE(res.limit_recon_error < 1e-9);
        for (size_t i = 0; i < res.indices.size(); ++i)
            REQUIRE(res.deviation[i] <= res.gap_bound[i]);
    }
}

TEST_CASE("rage operator matches the cesaro engine on the shift commutator") {
    ModelParams p;
    p.kind = Kind::ShiftZ;
    p.dim = 128;
    ModelInstance m = build_shift_z(p);
    Mat k = densify({[&m](const Vec& v) { return m.commutator_K(v); }, "K"}, m.dim);
    Operator u = Operator::dense(m.generator->to_dense(), {.unitary = true});

    StateVector probe = m.probes[0];
    auto grid = std::vector<long>{4, 9, 17};
    CesaroSeries s = cesaro_discrete(m, grid, {probe});

    Mat ud = u.to_dense(), udh = ud.adjoint();
    Mat acc = Mat::Zero(128, 128), conj = k;
    long cur = 0;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        while (cur < grid[gi]) {
            acc += conj;
            conj = ud * conj * udh;
            ++cur;
        }
        Vec mean_action = (acc / double(grid[gi])) * probe.entries;
        REQUIRE((mean_action - s.actions[gi][0]).norm() < 1e-9);
    }
}

TEST_CASE("decomposability: functions of H do not leak, generic matrices do") {
    const int n = 96;
    Mat a = Mat::Random(n, n);
    Operator h = Operator::dense(0.5 * (a + a.adjoint()), {.hermitian = true});
    SpectralData sd = eig(h);
    Operator g = func_calculus(sd, real_map([](double x) { return x / (1 + x * x); }));
    REQUIRE(decomposability_check(g.as_linop(), sd) < 1e-10);

    Mat r = Mat::Random(n, n);
    LinOp rop{[r](const Vec& v) { return Vec(r * v); }, "R"};
    REQUIRE(decomposability_check(rop, sd) > 0.1);
}

TEST_CASE("decomposability: skew D_n leakage shrinks with n") {
    ModelParams p;
    p.kind = Kind::SkewProductU1;
    p.dim = 512;
    p.perturbation = 0.3;
    ModelInstance m = build_skew(p);
    SpectralData sd = eig(*m.generator);
    auto grid = std::vector<long>{100, 250};
    CesaroSeries s = cesaro_discrete(m, grid, {m.probes[0]});
    // rebuild the multiplier D_n densely from the engine's conjugation data
    auto dn_linop = [&](size_t gi) {
        const auto& mc = *m.mult_conj;
        RVec sums = RVec::Zero(m.dim);
        long cursor = 0;
        for (long q = 0; q < grid[gi]; ++q) {
            for (Eigen::Index i = 0; i < m.dim; ++i)
                sums[i] += mc.values[((i + cursor) % m.dim + m.dim) % m.dim];
            cursor -= mc.step;
        }
        RVec dn = sums / double(grid[gi]);
        return LinOp{[dn](const Vec& v) { return Vec(dn.cast<cplx>().cwiseProduct(v)); }, "D_n"};
    };
    double l0 = decomposability_check(dn_linop(0), sd);
    double l1 = decomposability_check(dn_linop(1), sd);
    REQUIRE(l1 < l0);
}

TEST_CASE("ac summability: exact models vanish; diagnostic fields populated") {
    ModelParams p;
    p.kind = Kind::ShiftZ;
    p.dim = 256;
    ModelInstance m = build_shift_z(p);
    CesaroSeries s = cesaro_discrete(m, log_int_grid(1, 50, 20), m.probes);
    auto diag = ac_summability(s, 0);
    REQUIRE(diag.partial_sums.back() < 1e-18);
    REQUIRE(diag.caveat.find("not a proof") != std::string::npos);

    ModelParams q;
    q.kind = Kind::SkewProductU1;
    q.dim = 8192;
    q.perturbation = 0.3;
    ModelInstance ms = build_skew(q);
    CesaroSeries ss = cesaro_discrete(ms, log_int_grid(1, 4000, 40), {ms.probes[0]});
    auto d2 = ac_summability(ss, 0);
    REQUIRE(d2.partial_sums.back() > 0);
    REQUIRE(d2.last_decade_fraction <= 0.05);
}

TEST_CASE("pure point kill: D_n annihilates eigenvectors at the gap rate") {
    // <v, D_n v> = <v, [A,U]U^{-1} v> = 0 exactly on eigenvectors (virial),
    // and ||D_n v|| shrinks like 1/(n gap).
    const int n = 48;
    Operator u = haar_unitary(n, 31);
    SpectralData sd = eig(u);
    Mat arand = Mat::Random(n, n);
    Mat a = 0.5 * (arand + arand.adjoint());
    Mat ud = u.to_dense();
    Mat k = a - ud * a * ud.adjoint();  // [A,U]U^{-1}

    Vec v = sd.basis.column(7);
    REQUIRE(std::abs((v.adjoint() * k * v)(0, 0)) < 1e-12 * op_norm(a));

    auto dn_norm = [&](long steps) {
        Mat acc = Mat::Zero(n, n), conj = k;
        for (long q = 0; q < steps; ++q) {
            acc += conj;
            conj = ud * conj * ud.adjoint();
        }
        return ((acc / double(steps)) * v).norm();
    };
    double d64 = dn_norm(64), d512 = dn_norm(512);
    REQUIRE(d512 < d64);
    REQUIRE(d512 < 0.2 * op_norm(a));
}
