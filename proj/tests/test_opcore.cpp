#include <catch2/catch_amalgamated.hpp>

#include "decaylab/calculus.hpp"
#include "decaylab/serialize.hpp"
#include "oracles.hpp"

using namespace decaylab;
using Catch::Approx;

namespace {

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Vec delta(Eigen::Index dim, Eigen::Index i) {
    Vec v = Vec::Zero(dim);
    v[i] = 1.0;
    return v;
}

Vec random_vec(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
    return v;
}

Operator random_unitary(Eigen::Index n, unsigned seed) {
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

}  // namespace

TEST_CASE("make_dense validates flags") {
    Operator id = Operator::dense(Mat::Identity(2, 2), {.hermitian = true, .unitary = true});
    REQUIRE(id.dim() == 2);
    REQUIRE(id.unitary_flag());

    Operator px = Operator::dense(pauli_x(), {.hermitian = true, .unitary = true});
    REQUIRE(px.hermitian_flag());

    Mat nil(2, 2);
    nil << 0, 1, 0, 0;
    REQUIRE_THROWS_AS(Operator::dense(nil, {.unitary = true}), Error);
    REQUIRE_THROWS_AS(Operator::dense(nil, {.hermitian = true}), Error);
    REQUIRE_THROWS_AS(Operator::dense(Mat::Ones(2, 3), {}), Error);
}

TEST_CASE("fourier_diagonal: identity symbol acts as identity") {
    Operator op = Operator::fourier_diagonal(Vec::Ones(16), {.hermitian = true, .unitary = true});
    Vec v = random_vec(16, 1);
    REQUIRE((op.apply(v) - v).norm() < 1e-13 * v.norm());
}

TEST_CASE("fourier_diagonal: discrete fractional laplacian symbol matches dense circulant eig") {
    // symbol_k = (2 sin(pi k/N))^s for N=8, s=1; the circulant laplacian
    // 2I - S - S* has eigenvalues 4 sin^2(pi k / N)
    const int n = 8;
    Vec sym(n);
    for (int k = 0; k < n; ++k) sym[k] = 2.0 * std::sin(pi * k / n);
    Operator frac = Operator::fourier_diagonal(sym, {.hermitian = true});

    Mat shift = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) shift((i + 1) % n, i) = 1.0;
    Mat lap = 2.0 * Mat::Identity(n, n) - shift - shift.adjoint();
    HermEig he = eig_hermitian_dense(lap);
    RVec expect = he.values.cwiseMax(0.0).cwiseSqrt();

    RVec got = frac.symbol().real();
    std::sort(got.data(), got.data() + n);
    for (int i = 0; i < n; ++i) REQUIRE(got[i] == Approx(expect[i]).margin(1e-12));
}

TEST_CASE("fourier_diagonal: shift symbol moves delta_0 to delta_1") {
    const int n = 16;
    Vec sym(n);
    for (int k = 0; k < n; ++k) sym[k] = std::exp(cplx(0.0, -2.0 * pi * k / n));
    Operator shift = Operator::fourier_diagonal(sym, {.unitary = true});
    Vec got = shift.apply(delta(n, 0));
    REQUIRE((got - delta(n, 1)).norm() < 1e-12);

    // dense-matrix oracle
    Mat dense = oracles::circulant_from_symbol(sym);
    Vec got2 = dense * delta(n, 0);
    REQUIRE((got - got2).norm() < 1e-12);
}

TEST_CASE("eig: diagonal example sorted ascending with permutation eigenvectors") {
    Vec d(3);
    d << 3.0, 1.0, 2.0;
    SpectralData sd = eig(Operator::diagonal(d, {.hermitian = true}));
    REQUIRE(sd.eigenvalues[0].real() == Approx(1.0));
    REQUIRE(sd.eigenvalues[1].real() == Approx(2.0));
    REQUIRE(sd.eigenvalues[2].real() == Approx(3.0));
    REQUIRE((sd.basis.column(0) - delta(3, 1)).norm() < 1e-14);
    REQUIRE((sd.basis.column(2) - delta(3, 0)).norm() < 1e-14);
}

TEST_CASE("eig: pauli-x eigenpairs") {
    SpectralData sd = eig(Operator::dense(pauli_x(), {.hermitian = true, .unitary = true}));
    REQUIRE(sd.eigenvalues[0].real() == Approx(-1.0));
    REQUIRE(sd.eigenvalues[1].real() == Approx(1.0));
    Vec minus(2), plus(2);
    minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(minus.dot(sd.basis.column(0))) == Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(plus.dot(sd.basis.column(1))) == Approx(1.0).margin(1e-12));
}

TEST_CASE("eig: dense cyclic shift eigenvalues match the fourier symbol") {
    const int n = 256;
    Mat shift = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) shift((i + 1) % n, i) = 1.0;
    SpectralData sd = eig(Operator::dense(shift, {.unitary = true}));
    std::vector<double> args(n);
    for (int i = 0; i < n; ++i) args[i] = std::arg(sd.eigenvalues[i]);
    std::vector<double> expect;
    for (int k = 0; k < n; ++k) expect.push_back(std::arg(std::exp(cplx(0.0, -2.0 * pi * k / n))));
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < n; ++i) {
        REQUIRE(args[i] == Approx(expect[i]).margin(1e-10));
        REQUIRE(std::abs(sd.eigenvalues[i]) == Approx(1.0).margin(1e-12));
    }
    SpectralCheck chk = verify(sd, Operator::dense(shift, {.unitary = true}));
    REQUIRE(chk.reconstruction < 1e-9);
    REQUIRE(chk.orthonormality < 1e-10);
}

TEST_CASE("func_calculus: identity map reconstructs") {
    Mat h = pauli_x() * 0.7;
    h(0, 0) = 0.3;
    h(1, 1) = -0.2;
    Operator op = Operator::dense(h, {.hermitian = true});
    SpectralData sd = eig(op);
    Operator rec = func_calculus(sd, [](cplx z) { return z; });
    REQUIRE(op_norm(Mat(rec.matrix() - h)) < 1e-9 * op_norm(h));
}

TEST_CASE("func_calculus: f(x)=x<x>^-2 on diag(-1,0,1)") {
    Vec d(3);
    d << -1.0, 0.0, 1.0;
    SpectralData sd = eig(Operator::diagonal(d, {.hermitian = true}));
    Operator g = func_calculus(sd, real_map([](double x) { return x / (1.0 + x * x); }));
    REQUIRE(g.symbol()[0].real() == Approx(-0.5));
    REQUIRE(g.symbol()[1].real() == Approx(0.0));
    REQUIRE(g.symbol()[2].real() == Approx(0.5));
}

TEST_CASE("func_calculus: exp(-i pi X) = -I against the 2x2 oracle") {
    Operator px = Operator::dense(pauli_x(), {.hermitian = true});
    SpectralData sd = eig(px);
    Operator u = func_calculus(sd, [](cplx z) { return std::exp(cplx(0, -pi) * z); });
    Mat expect = oracles::exp2x2(pauli_x(), pi);
    REQUIRE(op_norm(Mat(u.matrix() - expect)) < 1e-12);
    REQUIRE(op_norm(Mat(u.matrix() + Mat::Identity(2, 2))) < 1e-12);
    REQUIRE(u.unitary_flag());
}

TEST_CASE("func_calculus rejects maps undefined on the spectrum") {
    Vec d(2);
    d << 0.0, 1.0;
    SpectralData sd = eig(Operator::diagonal(d, {.hermitian = true}));
    REQUIRE_THROWS_AS(func_calculus(sd, real_map([](double x) { return 1.0 / x; })), Error);
}

TEST_CASE("evolve: fixed points and phases") {
    Vec d(2);
    d << 1.0, 2.0;
    SpectralData sd = eig(Operator::diagonal(d, {.hermitian = true}));
    StateVector v{delta(2, 0), "e0"};
    StateVector same = evolve(sd, 0.0, v);
    REQUIRE((same.entries - v.entries).norm() == 0.0);
    StateVector moved = evolve(sd, pi, v);
    REQUIRE(std::abs(moved.entries[0] - std::exp(cplx(0, -pi))) < 1e-14);
    REQUIRE(std::abs(moved.entries[1]) == 0.0);
}

TEST_CASE("evolve: semicircle autocorrelation of the truncated half-line hopping matrix") {
    // H = Re(unilateral shift) at N=2048; <delta_0, e^{-itH} delta_0> ~ 2 J_1(t)/t.
    // Closed-form sine eigenbasis; a dense cross-check runs in the model tests.
    const int n = 2048;
    Vec lam(n);
    for (int m = 0; m < n; ++m) lam[m] = std::cos(pi * (m + 1) / (n + 1));
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return lam[a].real() < lam[b].real(); });
    Vec sorted(n);
    Eigen::VectorXi perm(n);
    for (int i = 0; i < n; ++i) {
        sorted[i] = lam[idx[i]];
        perm[i] = idx[i];
    }
    SpectralData sd{sorted, true, SpectralBasis::sine(perm), 1e-8, {}};

    StateVector d0{delta(n, 0), "delta0"};
    for (double t : {1.0, 5.0, 12.5, 30.0}) {
        StateVector vt = evolve(sd, t, d0);
        cplx got = d0.entries.dot(vt.entries);
        cplx expect = oracles::semicircle_transform(t);
        REQUIRE(std::abs(got - expect) < 1e-6);
    }
    // oracle self-check against the standard Bessel routine
    // (the std Bessel routine itself is only ~1e-9 accurate)
    REQUIRE(std::abs(oracles::semicircle_transform(1.0).real() - 2.0 * std::cyl_bessel_j(1, 1.0)) <
            1e-8);
    REQUIRE(std::abs(oracles::semicircle_transform(30.0).real() -
                     2.0 * std::cyl_bessel_j(1, 30.0) / 30.0) < 1e-8);
}

TEST_CASE("property: unitarity preservation") {
    Operator u = random_unitary(128, 7);
    for (unsigned s = 0; s < 4; ++s) {
        Vec v = random_vec(128, 100 + s);
        REQUIRE(std::abs(u.apply(v).norm() - v.norm()) <= 1e-10 * v.norm());
    }
    Vec sym(64);
    for (int k = 0; k < 64; ++k) sym[k] = std::exp(cplx(0.0, 0.3 * k));
    Operator uf = Operator::fourier_diagonal(sym, {.unitary = true});
    Vec v = random_vec(64, 3);
    REQUIRE(std::abs(uf.apply(v).norm() - v.norm()) <= 1e-10 * v.norm());
}

TEST_CASE("property: functional-calculus homomorphism f*g") {
    const int n = 96;
    Mat a = Mat::Random(n, n);
    Mat h = 0.5 * (a + a.adjoint());
    Operator op = Operator::dense(h, {.hermitian = true});
    SpectralData sd = eig(op);
    auto f = [](cplx z) { return std::exp(cplx(0, -0.7) * z); };
    auto g = [](cplx z) { return 1.0 / (1.0 + z * z.real()); };
    Operator fg = func_calculus(sd, [&](cplx z) { return f(z) * g(z); });
    Mat composed = func_calculus(sd, f).to_dense() * func_calculus(sd, g).to_dense();
    REQUIRE(op_norm(Mat(fg.to_dense() - composed)) < 1e-9);
}

TEST_CASE("property: fourier densify/re-diagonalize reproduces symbol") {
    const int n = 64;
    Vec sym(n);
    for (int k = 0; k < n; ++k) sym[k] = 1.0 + 0.25 * std::cos(2 * pi * k / n);
    Operator op = Operator::fourier_diagonal(sym, {.hermitian = true});
    Mat dense = op.to_dense();
    SpectralData sd = eig(Operator::dense(0.5 * (dense + Mat(dense.adjoint())), {.hermitian = true}));
    RVec got = sd.eigenvalues.real();
    RVec expect = sym.real();
    std::sort(expect.data(), expect.data() + n);
    REQUIRE((got - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("property: evolution group law") {
    const int n = 48;
    Mat a = Mat::Random(n, n);
    Operator op = Operator::dense(0.5 * (a + a.adjoint()), {.hermitian = true});
    SpectralData sd = eig(op);
    StateVector v{random_vec(n, 11), "probe"};
    v = v.normalized();
    StateVector via = evolve(sd, 0.9, evolve(sd, 1.7, v));
    StateVector direct = evolve(sd, 2.6, v);
    REQUIRE((via.entries - direct.entries).norm() < 1e-9);
}

TEST_CASE("serialization round-trips bit for bit") {
    Mat a = Mat::Random(6, 6);
    Operator op = Operator::dense(0.5 * (a + a.adjoint()), {.hermitian = true});
    json j = to_json(op);
    Operator back = operator_from_json(json::parse(j.dump()));
    REQUIRE(back.rep() == Rep::Dense);
    REQUIRE((back.matrix().array() == op.matrix().array()).all());

    Vec sym(8);
    for (int k = 0; k < 8; ++k) sym[k] = std::exp(cplx(0.0, 0.1 * k + 1.0 / 3.0));
    Operator uf = Operator::fourier_diagonal(sym, {.unitary = true});
    Operator uf2 = operator_from_json(json::parse(to_json(uf).dump()));
    REQUIRE((uf2.symbol().array() == uf.symbol().array()).all());

    StateVector sv{random_vec(5, 2), "probe"};
    StateVector sv2 = statevector_from_json(json::parse(to_json(sv).dump()));
    REQUIRE((sv2.entries.array() == sv.entries.array()).all());
    REQUIRE(sv2.label == sv.label);
}

TEST_CASE("eig rejects unflagged input") {
    Mat a = Mat::Random(4, 4);
    REQUIRE_THROWS_AS(eig(Operator::dense(a, {})), Error);
}
