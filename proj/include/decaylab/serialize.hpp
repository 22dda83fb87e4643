#pragma once

#include <nlohmann/json.hpp>

#include "decaylab/operator.hpp"

namespace decaylab {

using json = nlohmann::json;

// JSON schema (documented in the README):
//   Operator:    { "dim": N, "representation": "dense"|"fourier_diagonal"|"diagonal",
//                  "hermitian": bool, "unitary": bool,
//                  "grid": [..] (fourier only),
//                  "entries": [[re,im],...] }        row-major for dense
//   StateVector: { "dim": N, "label": str, "entries": [[re,im],...] }
// Numbers are emitted with shortest round-trip formatting, so a load of a dump
// reproduces every double bit for bit.

inline json pack_complex_seq(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
    return a;
}

inline Vec unpack_complex_seq(const json& a) {
    Vec v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[Eigen::Index(i)] = cplx(a[i][0].get<double>(), a[i][1].get<double>());
    return v;
}

inline json to_json(const Operator& op) {
    json j;
    j["dim"] = op.dim();
    j["hermitian"] = op.hermitian_flag();
    j["unitary"] = op.unitary_flag();
    switch (op.rep()) {
        case Rep::Dense: {
            j["representation"] = "dense";
            json rows = json::array();
            const Mat& m = op.matrix();
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
                rows.push_back(std::move(row));
            }
            j["entries"] = std::move(rows);
            break;
        }
        case Rep::FourierDiagonal:
            j["representation"] = "fourier_diagonal";
            j["grid"] = op.grid();
            j["entries"] = pack_complex_seq(op.symbol());
            break;
        case Rep::Diagonal:
            j["representation"] = "diagonal";
            j["entries"] = pack_complex_seq(op.symbol());
            break;
    }
    return j;
}

inline Operator operator_from_json(const json& j, const Tolerances& tol = default_tol()) {
    const auto rep = j.at("representation").get<std::string>();
    Flags flags{.hermitian = j.at("hermitian").get<bool>(), .unitary = j.at("unitary").get<bool>()};
    const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
    if (rep == "dense") {
        const json& rows = j.at("entries");
        Mat m(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c)
                m(r, c) = cplx(rows[r][c][0].get<double>(), rows[r][c][1].get<double>());
        return Operator::dense(std::move(m), flags, tol);
    }
    if (rep == "fourier_diagonal") {
        std::vector<int> grid = j.value("grid", std::vector<int>{});
        return Operator::fourier_diagonal(unpack_complex_seq(j.at("entries")), flags, grid, tol);
    }
    if (rep == "diagonal") return Operator::diagonal(unpack_complex_seq(j.at("entries")), flags, tol);
    throw Error("operator_from_json: unknown representation '" + rep + "'");
}

inline json to_json(const StateVector& v) {
    return json{{"dim", v.dim()}, {"label", v.label}, {"entries", pack_complex_seq(v.entries)}};
}

inline StateVector statevector_from_json(const json& j) {
    StateVector v{unpack_complex_seq(j.at("entries")), j.at("label").get<std::string>()};
    if (v.dim() != j.at("dim").get<Eigen::Index>()) throw Error("statevector_from_json: dim mismatch");
    return v;
}

}  // namespace decaylab
