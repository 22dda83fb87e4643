// Acceptance suite: one test per criterion, one printed pass/fail line each.
// Every tolerance is pinned here, in code.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decaylab/runner.hpp"
#include "oracles.hpp"

using namespace decaylab;
using namespace decaylab::models;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[ACCEPTANCE] %02d %-34s %s  (%s)\n", criterion, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

ModelParams mk(Kind k, int dim = 0) {
    ModelParams p;
    p.kind = k;
    p.dim = dim;
    return p;
}

Vec delta(Eigen::Index dim, Eigen::Index i) {
    Vec v = Vec::Zero(dim);
    v[i] = 1.0;
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: exact relation residuals under 60 s") {
    Stopwatch sw;
    double worst = 0.0;
    {
        ModelInstance m = build_shift_z(mk(Kind::ShiftZ, 64));
        worst = std::max(worst, m.relation_residual);
    }
    {
        ModelInstance m = build_fock(mk(Kind::Fock, 512));
        worst = std::max(worst, m.relation_residual);
    }
    {
        ModelInstance m = build_hyperbolic(mk(Kind::Hyperbolic2d, 64));
        worst = std::max(worst, m.relation_residual);
    }
    {
        ModelParams p = mk(Kind::FractionalLaplacian, 4096);
        p.s = 1.0;
        ModelInstance m = build_fractional(p);
        worst = std::max(worst, m.relation_residual);
    }
    double el = sw.seconds();
    bool pass = worst <= 1e-8 && el <= 60.0;
    report(1, "exact relation residuals", pass,
           "max residual " + fmt17(worst) + ", " + fmt17(el) + " s");
    REQUIRE(worst <= 1e-8);
    REQUIRE(el <= 60.0);
}

TEST_CASE("criterion 2: order-1 bound for shift and fock; semicircle oracle") {
    // shift_Z, prepared order-1 vectors, bound at every grid index
    ModelInstance shift = build_shift_z(mk(Kind::ShiftZ, 64));
    PreparedVectors pvs = prepare_vectors(shift, 1);
    double cs = bound_constant(shift, 1, pvs.chi, pvs.psi);
    long hs = long(shift.probe_horizon({pvs.phi, pvs.psi}));
    auto gs = log_int_grid(1, hs, 200);
    auto ss = coefficient_series(shift, pvs.phi, pvs.psi, gs);
    DecayReport rs = verify_bound(shift, pvs, cs, std::vector<double>(gs.begin(), gs.end()), ss);

    // fock, prepared order-1 vectors on t in [1,100]
    ModelInstance fock = build_fock(mk(Kind::Fock, 1024));
    PreparedVectors pvf = prepare_vectors(fock, 1);
    double cf = bound_constant(fock, 1, pvf.chi, pvf.psi);
    auto gf = log_grid(1.0, 100.0, 200);
    auto sf = coefficient_series(fock, pvf.phi, pvf.psi, gf);
    DecayReport rf = verify_bound(fock, pvf, cf, gf, sf);

    // fock autocorrelation against the quadrature oracle at N=4096
    ModelInstance big = build_fock(mk(Kind::Fock, 4096));
    StateVector d0{delta(4096, 0), "delta0"};
    auto gt = log_grid(1.0, 50.0, 60);
    auto st = coefficient_series(big, d0, d0, gt);
    double worst_osc = 0.0;
    for (size_t i = 0; i < gt.size(); ++i)
        worst_osc = std::max(worst_osc, std::abs(st[i] - std::abs(oracles::semicircle_transform(gt[i]))));

    bool pass = rs.all_pass && rf.all_pass && worst_osc <= 1e-6;
    report(2, "order-1 bound + semicircle", pass,
           "semicircle dev " + fmt17(worst_osc));
    REQUIRE(rs.all_pass);
    REQUIRE(rf.all_pass);
    REQUIRE(worst_osc <= 1e-6);
}

TEST_CASE("criterion 3: higher-order bounds and envelope slopes") {
    struct Case {
        ModelParams params;
        const char* name;
    };
    std::vector<Case> cases;
    cases.push_back({mk(Kind::Fock, 1024), "fock"});
    cases.push_back({mk(Kind::Stark1d, 2048), "stark_1d"});
    {
        ModelParams p = mk(Kind::FractionalLaplacian, 4096);
        p.s = 1.0;
        cases.push_back({p, "fractional_laplacian"});
    }
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        Stopwatch sw;
        ModelInstance m = build_model(c.params);
        for (int order : {1, 2, 3}) {
            PreparedVectors pv = prepare_vectors(m, order);
            double cc = bound_constant(m, order, pv.chi, pv.psi);
            double hi = std::min({100.0, m.validity_window,
                                  m.probe_horizon({pv.phi, pv.psi}) + m.probe_margin_extra});
            auto grid = log_grid(1.0, hi, 200);
            auto series = coefficient_series(m, pv.phi, pv.psi, grid);
            DecayReport rep = verify_bound(m, pv, cc, grid, series);
            DecayFit fit = fit_decay_order(grid, series, 5.0, 100.0);
            bool order_ok = rep.all_pass && fit.slope <= -double(order) + 0.25;
            INFO(c.name << " order " << order << " slope " << fit.slope);
            REQUIRE(rep.all_pass);
            REQUIRE(fit.slope <= -double(order) + 0.25);
            pass = pass && order_ok;
        }
        double el = sw.seconds();
        detail += std::string(c.name) + " " + fmt17(el) + "s ";
        REQUIRE(el <= 300.0);
        pass = pass && el <= 300.0;
    }
    report(3, "higher-order bounds + slopes", pass, detail);
}

TEST_CASE("criterion 4: virial identity across the zoo") {
    struct Case {
        ModelParams params;
        const char* name;
    };
    std::vector<Case> cases;
    cases.push_back({mk(Kind::ShiftZ, 256), "shift_Z"});
    {
        ModelParams p = mk(Kind::RegularRepZd, 200);
        cases.push_back({p, "regular_rep_Zd"});
    }
    cases.push_back({mk(Kind::Fock, 512), "fock"});
    {
        ModelParams p = mk(Kind::FractionalLaplacian, 512);
        p.length = 64.0;
        cases.push_back({p, "fractional_laplacian"});
    }
    cases.push_back({mk(Kind::Stark1d, 512), "stark_1d"});
    cases.push_back({mk(Kind::Hyperbolic2d, 22), "hyperbolic_2d"});
    cases.push_back({mk(Kind::SkewProductU1, 512), "skew_product_u1"});
    cases.push_back({mk(Kind::QuantumWalkZ, 256), "quantum_walk_Z"});

    bool pass = true;
    double worst_simple = 0.0;
    std::string skipped;
    for (const auto& c : cases) {
        ModelInstance m = build_model(c.params);
        SpectralData sd = m.discrete ? eig(*m.generator) : *m.spec;
        bool simple = true;
        for (const auto& cl : sd.clusters) simple = simple && cl.size() == 1;
        double v = virial_check(m);
        INFO(c.name << " virial " << v << (simple ? " (simple)" : " (clustered)"));
        if (simple) {
            worst_simple = std::max(worst_simple, v);
            REQUIRE(v <= 1e-9);
            pass = pass && v <= 1e-9;
        } else {
            // degenerate clusters: exact degeneracies still cancel exactly
            skipped += std::string(c.name) + " ";
            REQUIRE(v <= 1e-7);
        }
    }
    report(4, "virial identity", pass,
           "max (simple spectra) " + fmt17(worst_simple) +
               (skipped.empty() ? "" : "; clustered: " + skipped));
}

TEST_CASE("criterion 5: RAGE mean-ergodic bound, ten seeded unitaries") {
    bool pass = true;
    double worst_margin = 0.0, worst_recon = 0.0;
    for (unsigned seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        Mat a(128, 128);
        for (Eigen::Index i = 0; i < 128; ++i)
            for (Eigen::Index j = 0; j < 128; ++j) a(i, j) = cplx(g(rng), g(rng));
        Eigen::HouseholderQR<Mat> qr(a);
        Mat q = qr.householderQ();
        Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index j = 0; j < 128; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
        Operator u = Operator::dense(q, {.unitary = true});
        Vec va(128), vb(128);
        for (Eigen::Index i = 0; i < 128; ++i) {
            va[i] = cplx(g(rng), g(rng));
            vb[i] = cplx(g(rng), g(rng));
        }
        va /= va.norm();
        vb /= vb.norm();
        auto res = rage_operator_rank1(u, va, vb, {100, 1000, 10000});
        worst_recon = std::max(worst_recon, res.limit_recon_error);
        for (size_t i = 0; i < res.indices.size(); ++i) {
            REQUIRE(res.deviation[i] <= res.gap_bound[i]);
            pass = pass && res.deviation[i] <= res.gap_bound[i];
            worst_margin = std::max(worst_margin, res.deviation[i] / res.gap_bound[i]);
        }
        REQUIRE(res.limit_recon_error <= 1e-9);
        pass = pass && res.limit_recon_error <= 1e-9;
    }
    report(5, "RAGE gap bound (10 seeds)", pass,
           "worst dev/bound " + fmt17(worst_margin) + ", recon " + fmt17(worst_recon));
}

TEST_CASE("criterion 6: commutation defect, exact models and perturbed skew") {
    // exact-D models: defect identically zero
    double worst_exact = 0.0;
    {
        ModelInstance m = build_shift_z(mk(Kind::ShiftZ, 128));
        auto grid = log_int_grid(1, long(m.probe_horizon(m.probes)), 24);
        CesaroSeries s = cesaro_discrete(m, grid, m.probes);
        for (const auto& pt : s.points) worst_exact = std::max(worst_exact, pt.defect);
    }
    {
        ModelInstance m = build_fock(mk(Kind::Fock, 512));
        CesaroSeries s = cesaro_continuous(m, {1.0, 10.0, 100.0}, {m.probes[0]});
        for (const auto& pt : s.points) worst_exact = std::max(worst_exact, pt.defect);
    }
    {
        ModelInstance m = build_stark(mk(Kind::Stark1d, 1024));
        CesaroSeries s = cesaro_continuous(m, {1.0, 10.0, 30.0}, {m.probes[0]});
        for (const auto& pt : s.points) worst_exact = std::max(worst_exact, pt.defect);
    }
    REQUIRE(worst_exact <= 1e-10);

    // perturbed skew product on the pinned grid
    ModelParams p = mk(Kind::SkewProductU1, 2048 * 100);
    p.perturbation = 0.3;
    ModelInstance m = build_skew(p);
    StateVector probe = gaussian_profile(m.dim, m.dim / 2.0, 0.01 * double(m.dim), 0.0, "bump");
    CesaroSeries s = cesaro_discrete(m, {100, 10000}, {probe});
    double d100 = s.points[0].defect, d10000 = s.points[1].defect;
    bool pass = worst_exact <= 1e-10 && d10000 <= 1e-2 && d10000 <= d100;
    report(6, "commutation defects", pass,
           "exact " + fmt17(worst_exact) + ", skew defect(1e4) " + fmt17(d10000));
    REQUIRE(d10000 <= 1e-2);
    REQUIRE(d10000 <= d100);
}

TEST_CASE("criterion 7: skew-product degree for windings 1..3") {
    bool pass = true;
    std::string detail;
    for (int w : {1, 2, 3}) {
        ModelParams p = mk(Kind::SkewProductU1, 2048 * 100);
        p.winding = w;
        p.perturbation = 0.3;
        ModelInstance m = build_skew(p);
        StateVector probe = gaussian_profile(m.dim, m.dim / 2.0, 30.0, 0.0, "bump");
        CesaroSeries s = cesaro_discrete(m, {100, 10000, 100000}, {probe}, false);
        double qn = s.points.back().qform[0];
        double dev = std::abs(qn - 2.0 * pi * w);

        // independent scalar oracle over the probe support
        const long mm = m.dim;
        const long pshift = std::lround(m.params.alpha * double(mm));
        double oracle = 0.0;
        for (Eigen::Index i = 0; i < mm; ++i) {
            double wgt = std::norm(probe.entries[i]);
            if (wgt == 0.0) continue;
            long idx = i;
            double acc = 0.0;
            for (long q = 0; q < 100000; ++q) {
                double x = double(idx) / double(mm);
                acc += 2.0 * pi * w + 0.3 * 2.0 * pi * std::cos(2.0 * pi * x);
                idx += pshift;
                if (idx >= mm) idx -= mm;
            }
            oracle += wgt * acc / 100000.0;
        }
        double routes = std::abs(qn - oracle);
        INFO("winding " << w << " dev " << dev << " routes " << routes);
        REQUIRE(dev <= 1e-3);
        REQUIRE(routes <= 1e-9);
        pass = pass && dev <= 1e-3 && routes <= 1e-9;
        detail += "w=" + std::to_string(w) + " dev " + fmt17(dev) + " ";
    }
    report(7, "skew-product degree", pass, detail);
}

TEST_CASE("criterion 8: regular representation improved bound") {
    ModelParams p = mk(Kind::RegularRepZd, 200);
    ModelInstance m = build_regular_rep(p);
    StateVector chi = default_chi(m);
    double nl = m.A(chi.entries).norm();
    double c = nl + nl;  // ||A phi|| ||psi|| + ||phi|| ||A psi|| with unit norms
    double c_improved = 2.0 * nl + c;
    std::vector<long> grid;
    for (long j = 1; j <= 100; ++j) grid.push_back(j);
    auto series = coefficient_series(m, chi, chi, grid);
    bool pass = true;
    for (size_t i = 0; i < grid.size(); ++i)
        pass = pass && series[i] <= c_improved / double(grid[i]) + 1e-12;
    report(8, "regular representation bound", pass, "c~ " + fmt17(c_improved));
    REQUIRE(pass);
}

TEST_CASE("criterion 9: constant-coin walk converges to V0^2") {
    ModelInstance m = build_walk(mk(Kind::QuantumWalkZ, 4096));
    StateVector phi = m.probes[0];  // Fourier-localized spinor packet
    CesaroSeries s = cesaro_discrete(m, {10, 100, 1000}, {phi}, false);
    double qn = s.points.back().qform[0];

    // closed-form Hadamard dispersion oracle: V0^2 acts as cos^2 k/(2-sin^2 k)
    const int n = 4096;
    Vec c0 = phi.entries.segment(0, n), c1 = phi.entries.segment(n, n);
    Fft::forward(c0);
    Fft::forward(c1);
    double target = 0.0;
    for (int j = 0; j < n; ++j) {
        double k = 2.0 * pi * j / n;
        target += oracles::hadamard_v2(k) * (std::norm(c0[j]) + std::norm(c1[j]));
    }
    double dev = std::abs(qn - target);
    bool pass = dev < 1e-2;
    report(9, "walk asymptotic velocity", pass,
           "<D_n> " + fmt17(qn) + " vs " + fmt17(target) + ", dev " + fmt17(dev));
    REQUIRE(dev < 1e-2);
}

TEST_CASE("criterion 10: byte-identical reruns") {
    auto run_into = [](const std::string& kind, int dim, const std::string& dir) {
        std::string conf = "[model]\nkind = " + kind + "\ndim = " + std::to_string(dim) +
                           "\n[experiment]\ntype = all\n[grids]\nn_max = 200\nn_points = 40\n"
                           "[output]\ndir = " + dir + "\nseed = 11\n";
        ExperimentConfig cfg = parse_config(conf);
        RunResult rr = run_experiments(cfg);
        REQUIRE(rr.exit_code == 0);
        return rr.directory;
    };
    bool pass = true;
    for (const auto& [kind, dim] : std::vector<std::pair<std::string, int>>{
             {"fock", 512}, {"quantum_walk_Z", 512}}) {
        auto d1 = run_into(kind, dim, "out/acc_det_a_" + kind);
        auto d2 = run_into(kind, dim, "out/acc_det_b_" + kind);
        for (const char* name :
             {"decay.csv", "cesaro.csv", "rage.csv", "bounds.json", "virial.json", "summary.txt"}) {
            bool same = slurp(d1 / name) == slurp(d2 / name);
            REQUIRE(same);
            pass = pass && same;
        }
    }
    report(10, "determinism", pass, "fock + quantum_walk_Z, full recipe set");
}
