#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace decaylab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

// <x> = sqrt(1+x^2)
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Default tolerances; every experiment may override via config.
struct Tolerances {
    double hermitian_rel  = 1e-12;  // max|M-M*| <= tol * max|M|
    double unitary        = 1e-10;  // ||MM*-I||
    double recon_rel      = 1e-9;   // ||V diag V* - M|| <= tol * ||M||
    double orthonormal    = 1e-10;  // ||V*V - I||
    double cluster        = 1e-8;   // eigenvalue cluster width
    double norm_preserve  = 1e-10;  // unitary application, evolution
    double func_calc      = 1e-9;
    double relation       = 1e-8;   // declared commutation relation on interior
    double bound_slack    = 1e-10;  // decay-bound verdict slack
    double noise_floor    = 1e-13;  // coefficient magnitudes below this are noise
    double commutant_gate = 1e-6;   // [A,D]-DB and [D,B] gate for orders >= 2
    double quadrature_xcheck = 1e-6;
};

inline Tolerances& default_tol() {
    static Tolerances t;
    return t;
}

// A linear map given by its action; `matrix` is set when a concrete form exists.
struct LinOp {
    std::function<Vec(const Vec&)> apply;
    std::string label;

    Vec operator()(const Vec& v) const { return apply(v); }
};

inline Mat densify(const LinOp& op, Eigen::Index dim) {
    Mat m(dim, dim);
    Vec e = Vec::Zero(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        e[j] = 1.0;
        m.col(j) = op(e);
        e[j] = 0.0;
    }
    return m;
}

// Log-spaced grid of distinct integers in [lo, hi] (inclusive), at most `points` of them.
inline std::vector<long> log_int_grid(long lo, long hi, int points) {
    if (lo < 1 || hi < lo || points < 1) throw Error("log_int_grid: bad range");
    std::vector<long> out;
    for (int i = 0; i < points; ++i) {
        double f = points == 1 ? 0.0 : double(i) / (points - 1);
        long n = std::lround(std::exp(std::log(double(lo)) + f * (std::log(double(hi)) - std::log(double(lo)))));
        n = std::min(std::max(n, lo), hi);
        if (out.empty() || n != out.back()) out.push_back(n);
    }
    return out;
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0) || hi < lo || points < 1) throw Error("log_grid: bad range");
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) {
        double f = points == 1 ? 0.0 : double(i) / (points - 1);
        out[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    }
    return out;
}

}  // namespace decaylab
