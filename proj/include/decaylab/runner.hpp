#pragma once

#include <cstdlib>

#include "decaylab/config.hpp"
#include "decaylab/decay.hpp"
#include "decaylab/report.hpp"
#include "decaylab/spectra.hpp"

namespace decaylab {

struct RunResult {
    int exit_code = 0;
    std::vector<std::pair<std::string, bool>> verdicts;  // (name, pass)
    std::filesystem::path directory;
};

namespace detail_run {

inline StateVector shaped_vector(const models::ModelInstance& m, const ExperimentConfig& cfg,
                                 bool psi) {
    if (cfg.shape == "auto") return psi ? default_psi(m) : default_chi(m);
    double center = cfg.center >= 0 ? cfg.center : double(m.dim) / 2;
    if (psi) center += cfg.psi_offset >= 0 ? cfg.psi_offset : 3.0;
    const char* label = psi ? "psi" : "chi";
    if (cfg.shape == "gaussian") {
        double width = cfg.width > 0 ? cfg.width : 2.0;
        return models::gaussian_profile(m.dim, center, width, cfg.modulation, label);
    }
    if (cfg.shape == "indicator") {
        long half = cfg.width > 0 ? long(cfg.width) : 5;
        Vec v = Vec::Zero(m.dim);
        for (long i = -half; i <= half; ++i) {
            long idx = long(center) + i;
            if (idx >= 0 && idx < m.dim) v[idx] = 1.0;
        }
        v /= v.norm();
        return {v, label};
    }
    // delta
    Vec v = Vec::Zero(m.dim);
    v[long(center)] = 1.0;
    return {v, label};
}

inline std::string verdict_str(bool ok) { return ok ? "pass" : "FAIL"; }

struct BoundRun {
    DecayReport report;
    std::optional<DecayFit> fit;
};

// one bound verification at the given order; mode picked per model kind
inline BoundRun run_bound_order(const models::ModelInstance& m, const ExperimentConfig& cfg,
                                int order) {
    using models::Kind;
    BoundRun out;
    StateVector chi = shaped_vector(m, cfg, false);
    StateVector psi = shaped_vector(m, cfg, true);

    if (m.kind == Kind::RegularRepZd) {
        // compactly supported pair: improved constant 2||l phi|| ||psi|| + c
        double nl_chi = m.A(chi.entries).norm(), nl_psi = m.A(psi.entries).norm();
        double c = nl_chi * psi.norm() + chi.norm() * nl_psi;
        double c_improved = 2.0 * nl_chi * psi.norm() + c;
        long hi = std::min<long>({cfg.n_max, long(m.validity_window),
                                  long(m.probe_horizon({chi, psi}))});
        auto grid = log_int_grid(std::max(1L, cfg.n_min), std::max(hi, cfg.n_min + 1), cfg.n_points);
        auto series = coefficient_series(m, chi, psi, grid);
        std::vector<double> dgrid(grid.begin(), grid.end());
        PreparedVectors pv{chi, psi, chi, 1.0, false, 1};
        out.report = verify_bound(m, pv, c_improved, dgrid, series, cfg.tol);
        out.report.mode = "improved";
        return out;
    }

    const bool exact_d = m.kind == Kind::ShiftZ || m.kind == Kind::Fock ||
                         m.kind == Kind::Stark1d || m.kind == Kind::FractionalLaplacian ||
                         m.kind == Kind::Hyperbolic2d;
    if (exact_d) {
        PreparedVectors pv = prepare_vectors(m, order, chi, psi);
        double c = bound_constant(m, order, pv.chi, pv.psi, cfg.tol);
        std::vector<double> dgrid;
        std::vector<double> series;
        if (m.discrete) {
            long hi = std::min<long>({cfg.n_max, long(m.validity_window),
                                      long(m.probe_horizon({pv.phi, pv.psi}))});
            auto grid = log_int_grid(std::max(1L, cfg.n_min), std::max(hi, cfg.n_min + 1), cfg.n_points);
            series = coefficient_series(m, pv.phi, pv.psi, grid);
            dgrid.assign(grid.begin(), grid.end());
        } else {
            double hi = std::min({cfg.t_max, m.validity_window,
                                  m.probe_horizon({pv.phi, pv.psi}) + m.probe_margin_extra});
            dgrid = log_grid(cfg.t_min, std::max(hi, cfg.t_min * 1.01), cfg.t_points);
            series = coefficient_series(m, pv.phi, pv.psi, dgrid);
        }
        out.report = verify_bound(m, pv, c, dgrid, series, cfg.tol);
        try {
            out.fit = fit_decay_order(dgrid, series, std::max(5.0, dgrid.front()), dgrid.back(),
                                      cfg.tol.noise_floor);
            out.report.fit = out.fit;
        } catch (const Error&) {
            // series below the noise floor everywhere in the window: no fit
        }
        return out;
    }

    // part-(a) mode: both sides measured from the same run
    StateVector phi_tilde = chi;
    long hi = std::min<long>({cfg.n_max, long(m.validity_window),
                              long(m.probe_horizon({phi_tilde, psi}))});
    auto grid = log_int_grid(std::max(1L, cfg.n_min), std::max(hi, cfg.n_min + 1), cfg.n_points);
    CesaroSeries cs = cesaro_discrete(m, grid, {phi_tilde}, false);

    Vec dphi;
    if (m.D) {
        dphi = (*m.D)(phi_tilde.entries);
    } else {
        if (cs.actions.size() < 2) throw Error("part-a bound: not enough data for a reference");
        size_t last = cs.actions.size() - 1;
        double n2 = cs.points[last].index, n1 = cs.points[last - 1].index;
        dphi = (n2 * cs.actions[last][0] - n1 * cs.actions[last - 1][0]) / (n2 - n1);
    }
    double raw = dphi.norm();
    if (raw < 1e-12) throw Error("part-a bound: reference D annihilates the probe");
    StateVector phi{dphi / raw, "D " + phi_tilde.label};
    double c = bound_constant(m, 1, phi_tilde, psi, cfg.tol);

    // D phi-tilde has a wider effective support than phi-tilde; re-clamp the grid
    long hi2 = long(m.probe_horizon({phi, psi}));
    size_t keep = 0;
    while (keep < grid.size() && grid[keep] <= hi2) ++keep;
    if (keep < 2) throw Error("part-a bound: horizon too short for the prepared vectors");
    grid.resize(keep);

    auto series = coefficient_series(m, phi, psi, grid);
    std::vector<double> dgrid(grid.begin(), grid.end());
    std::vector<double> residuals;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (m.D) {
            residuals.push_back(cs.points[i].residual[0]);
        } else {
            residuals.push_back((cs.actions[i][0] - dphi).norm());
        }
    }
    out.report = verify_bound_part_a(m, phi_tilde, psi, c, raw, dgrid, series, residuals, cfg.tol);
    return out;
}

}  // namespace detail_run

inline std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("DECAYLAB_OUTPUT_DIR"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::path(cfg.output_dir);
}

// Build the model, run the enabled experiments, emit report files.
// Exit status: 0 all verdicts pass, 1 verdict failure, 3 model construction failure.
// (Schema violations surface as SchemaError from parse_config -> exit 2 in the CLI.)
inline RunResult run_experiments(const ExperimentConfig& cfg) {
    using models::Kind;
    RunResult rr;
    rr.directory = resolve_output_dir(cfg);
    std::filesystem::create_directories(rr.directory);

    std::optional<models::ModelInstance> model;
    try {
        model = models::build_model(cfg.model, cfg.tol);
    } catch (const Error& e) {
        write_text(rr.directory / "summary.txt", std::string("model construction failed: ") + e.what() + "\n");
        rr.exit_code = 3;
        return rr;
    }
    models::ModelInstance& m = *model;
    write_json(rr.directory / "model_card.json", m.card);

    const bool all = cfg.experiment == "all";
    auto enabled = [&](const char* name) { return all || cfg.experiment == name; };
    std::string summary;
    summary += "model " + std::string(models::kind_name(m.kind)) + " dim " + std::to_string(m.dim) +
               "  relation_residual " + fmt17(m.relation_residual) + "\n";

    if (enabled("decay")) {
        detail_run::BoundRun br = detail_run::run_bound_order(m, cfg, 1);
        CsvWriter csv({"index", "series", "bound", "verdict"});
        for (size_t i = 0; i < br.report.index.size(); ++i)
            csv.row({fmt17(br.report.index[i]), fmt17(br.report.series[i]),
                     fmt17(br.report.bound[i]), br.report.verdict[i] ? "1" : "0"});
        csv.write(rr.directory / "decay.csv");
        write_curve(rr.directory / "decay_curve.dat",
                    "index |<phi,U psi>| ; model " + std::string(models::kind_name(m.kind)),
                    br.report.index, br.report.series);
        json j{{"model", br.report.model},
               {"mode", br.report.mode},
               {"order", br.report.order},
               {"constant", br.report.constant},
               {"phi_raw_norm", br.report.phi_raw_norm},
               {"all_pass", br.report.all_pass}};
        if (br.fit) {
            j["slope"] = br.fit->slope;
            j["slope_half_width"] = br.fit->half_width;
            j["envelope_mode"] = br.fit->envelope_mode;
        }
        write_json(rr.directory / "decay.json", j);
        rr.verdicts.emplace_back("decay.bound", br.report.all_pass);
        summary += "decay: mode " + br.report.mode + " constant " + fmt17(br.report.constant) +
                   " -> " + detail_run::verdict_str(br.report.all_pass) + "\n";
    }

    if (enabled("bounds")) {
        json orders = json::array();
        bool pass = true;
        const bool exact_d = m.kind == Kind::ShiftZ || m.kind == Kind::Fock ||
                             m.kind == Kind::Stark1d || m.kind == Kind::FractionalLaplacian ||
                             m.kind == Kind::Hyperbolic2d;
        int top = exact_d ? cfg.order_max : 1;
        for (int order = 1; order <= top; ++order) {
            detail_run::BoundRun br = detail_run::run_bound_order(m, cfg, order);
            json jo{{"order", order},
                    {"mode", br.report.mode},
                    {"constant", br.report.constant},
                    {"phi_raw_norm", br.report.phi_raw_norm},
                    {"all_pass", br.report.all_pass}};
            bool order_ok = br.report.all_pass;
            if (br.fit) {
                jo["slope"] = br.fit->slope;
                jo["slope_half_width"] = br.fit->half_width;
                bool slope_ok = br.fit->slope <= -double(order) + 0.25;
                jo["slope_pass"] = slope_ok;
                if (exact_d) order_ok = order_ok && slope_ok;
            }
            orders.push_back(jo);
            pass = pass && order_ok;
        }
        write_json(rr.directory / "bounds.json", json{{"model", models::kind_name(m.kind)},
                                                      {"orders", orders},
                                                      {"all_pass", pass}});
        rr.verdicts.emplace_back("bounds.orders", pass);
        summary += "bounds: orders 1.." + std::to_string(top) + " -> " +
                   detail_run::verdict_str(pass) + "\n";
    }

    if (enabled("cesaro")) {
        bool ok = true;
        std::string note;
        CsvWriter csv({"index", "probe_label", "residual", "defect"});
        if (!m.discrete && m.dim > 2048) {
            note = "skipped: dimension exceeds the dense eigenbasis cap";
        } else {
            CesaroSeries s;
            if (m.discrete) {
                long hi = std::min<long>({cfg.n_max, long(m.validity_window),
                                          long(m.probe_horizon(m.probes))});
                auto grid = log_int_grid(std::max(1L, cfg.n_min), std::max(hi, cfg.n_min + 1),
                                         std::min(cfg.n_points, 60));
                s = cesaro_discrete(m, grid, m.probes);
            } else {
                double hi = std::min({cfg.t_max, m.validity_window,
                                      m.probe_horizon(m.probes)});
                auto grid = log_grid(cfg.t_min, std::max(hi, cfg.t_min * 1.01),
                                     std::min(cfg.t_points, 24));
                s = cesaro_continuous(m, grid, m.probes);
            }
            for (const auto& pt : s.points)
                for (size_t p = 0; p < s.probe_labels.size(); ++p)
                    csv.row({fmt17(pt.index), s.probe_labels[p], fmt17(pt.residual[p]),
                             fmt17(pt.defect)});
            ok = s.points.back().defect <= s.points.front().defect + 1e-12;
            auto diag = ac_summability(s, 0);
            write_curve(rr.directory / "cesaro_summability.dat",
                        "index, partial sums of ||(D - D_index) phi||^2 ; " + diag.caveat,
                        [&] {
                            std::vector<double> xs;
                            for (const auto& pt : s.points) xs.push_back(pt.index);
                            return xs;
                        }(),
                        diag.partial_sums);
        }
        csv.write(rr.directory / "cesaro.csv");
        rr.verdicts.emplace_back("cesaro.defect_trend", ok);
        summary += "cesaro: " + (note.empty() ? "defect trend -> " + detail_run::verdict_str(ok)
                                              : note) + "\n";
    }

    if (enabled("rage")) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> g;
        auto rand_vec = [&](Eigen::Index n) {
            Vec v(n);
            for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
            return Vec(v / v.norm());
        };
        bool ok = true;
        std::string note;
        CsvWriter csv({"n", "deviation", "gap_bound"});
        json jr{{"model", models::kind_name(m.kind)}};
        if (m.dim > 512 || (m.discrete && !m.generator)) {
            note = "skipped: no dense generator at this dimension";
        } else {
            Operator u = m.discrete ? *m.generator
                                    : func_calculus(*m.spec, [](cplx z) {
                                          return std::exp(cplx(0, -1.0) * z.real());
                                      });
            Vec a = rand_vec(m.dim), b = rand_vec(m.dim);
            auto res = rage_operator_rank1(u, a, b, log_int_grid(10, std::min(cfg.n_max, 2000L), 4));
            for (size_t i = 0; i < res.indices.size(); ++i) {
                csv.row({std::to_string(res.indices[i]), fmt17(res.deviation[i]),
                         fmt17(res.gap_bound[i])});
                ok = ok && res.deviation[i] <= res.gap_bound[i];
            }
            ok = ok && res.limit_recon_error <= 1e-9;
            jr["min_gap"] = res.min_gap;
            jr["limit_recon_error"] = res.limit_recon_error;
            jr["bound_pass"] = ok;
        }
        csv.write(rr.directory / "rage.csv");
        rr.verdicts.emplace_back("rage.gap_bound", ok);
        summary += "rage: " + (note.empty() ? "deviation within 2||K||/(n g) -> " +
                                                  detail_run::verdict_str(ok)
                                            : note) + "\n";
        if (!note.empty()) jr["note"] = note;
        write_json(rr.directory / "rage.json", jr);
    }

    if (enabled("virial")) {
        json jv{{"model", models::kind_name(m.kind)}};
        bool ok = true;
        std::string note;
        if (m.dim > 512 || (m.discrete && !m.generator)) {
            note = "skipped: dimension exceeds the dense cap";
        } else {
            double v = virial_check(m);
            jv["virial_max"] = v;
            ok = v <= 1e-9;
            if (m.D && !m.discrete && m.spec) {
                double leak = decomposability_check(*m.D, *m.spec);
                jv["decomposability_leakage"] = leak;
                ok = ok && leak <= 1e-8;
            }
        }
        jv["pass"] = ok;
        if (!note.empty()) jv["note"] = note;
        write_json(rr.directory / "virial.json", jv);
        rr.verdicts.emplace_back("virial.identity", ok);
        summary += "virial: " + (note.empty() ? "-> " + detail_run::verdict_str(ok) : note) + "\n";
    }

    bool all_ok = true;
    for (const auto& [name, pass] : rr.verdicts) all_ok = all_ok && pass;
    summary += all_ok ? "overall: pass\n" : "overall: FAIL\n";
    write_text(rr.directory / "summary.txt", summary);
    rr.exit_code = all_ok ? 0 : 1;
    return rr;
}

inline std::string list_models_table() {
    struct Row {
        const char* kind;
        const char* params;
        const char* relation;
        const char* family;
    };
    static const Row rows[] = {
        {"shift_Z", "dim", "[A,U] = U (eta = 1, D = 1)", "discrete gamma(U)"},
        {"regular_rep_Zd", "dim(=L), d, net_max", "[A,U(x)]U(x)^-1 = l(.)-l(x^-1 .), D = -1",
         "representation"},
        {"fock", "dim", "[iH,A] = 1 - H^2", "continuous f(H)"},
        {"fractional_laplacian", "dim, length, s", "[iH,A] = sH", "continuous f(H)"},
        {"stark_1d", "dim, length", "[iH,A] = 1", "continuous f(H)"},
        {"hyperbolic_2d", "dim(per axis)", "[iH,A] = 2H", "continuous f(H)"},
        {"skew_product_u1", "dim(=M), alpha, winding, perturbation",
         "[A,U]U^-1 = theta', D = 2 pi w", "discrete cocycle"},
        {"quantum_walk_Z", "dim(sites), coin, anisotropic...", "band-diag [A,U]U^-1 = V0^2",
         "discrete walk"},
    };
    std::string out = "kind | parameters | declared relation | family\n";
    for (const auto& r : rows)
        out += std::string(r.kind) + " | " + r.params + " | " + r.relation + " | " + r.family + "\n";
    return out;
}

}  // namespace decaylab
