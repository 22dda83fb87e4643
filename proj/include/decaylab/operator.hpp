#pragma once

#include <random>
#include <utility>

#include "decaylab/core.hpp"
#include "decaylab/fft.hpp"
#include "decaylab/linalg.hpp"

namespace decaylab {

enum class Rep { Dense, FourierDiagonal, Diagonal };

struct Flags {
    bool hermitian = false;
    bool unitary = false;
};

// Finite-dimensional linear operator. Three storage forms:
//   Dense           - full matrix
//   FourierDiagonal - multiplication by `symbol` in the discrete Fourier basis
//                     (grid = {N} or {Nx,Ny}); applied with the FFT
//   Diagonal        - multiplication in the standard basis
// Values are immutable after construction; flags are validated on entry.
class Operator {
public:
    static Operator dense(Mat entries, Flags flags = {}, const Tolerances& tol = default_tol()) {
        if (entries.rows() != entries.cols()) throw Error("make_dense: matrix is not square");
        Operator op;
        op.rep_ = Rep::Dense;
        op.dim_ = entries.rows();
        op.dense_ = std::move(entries);
        op.flags_ = flags;
        op.validate(tol);
        return op;
    }

    static Operator fourier_diagonal(Vec symbol, Flags flags = {},
                                     std::vector<int> grid = {},
                                     const Tolerances& tol = default_tol()) {
        if (symbol.size() < 1) throw Error("make_fourier_diagonal: empty symbol");
        Operator op;
        op.rep_ = Rep::FourierDiagonal;
        op.dim_ = symbol.size();
        op.symbol_ = std::move(symbol);
        op.grid_ = grid.empty() ? std::vector<int>{int(op.dim_)} : std::move(grid);
        Eigen::Index prod = 1;
        for (int g : op.grid_) prod *= g;
        if (prod != op.dim_) throw Error("make_fourier_diagonal: grid does not match symbol length");
        op.flags_ = flags;
        op.validate(tol);
        return op;
    }

    static Operator diagonal(Vec entries, Flags flags = {}, const Tolerances& tol = default_tol()) {
        if (entries.size() < 1) throw Error("diagonal: empty");
        Operator op;
        op.rep_ = Rep::Diagonal;
        op.dim_ = entries.size();
        op.symbol_ = std::move(entries);
        op.flags_ = flags;
        op.validate(tol);
        return op;
    }

    static Operator identity(Eigen::Index dim) {
        return diagonal(Vec::Ones(dim), {.hermitian = true, .unitary = true});
    }

    Rep rep() const { return rep_; }
    Eigen::Index dim() const { return dim_; }
    bool hermitian_flag() const { return flags_.hermitian; }
    bool unitary_flag() const { return flags_.unitary; }
    const std::vector<int>& grid() const { return grid_; }

    // symbol (FourierDiagonal) or diagonal entries (Diagonal)
    const Vec& symbol() const {
        if (rep_ == Rep::Dense) throw Error("Operator: dense form has no symbol");
        return symbol_;
    }

    const Mat& matrix() const {
        if (rep_ != Rep::Dense) throw Error("Operator: not stored densely (use to_dense)");
        return dense_;
    }

    Vec apply(const Vec& v) const {
        if (v.size() != dim_) throw Error("Operator::apply: dimension mismatch");
        switch (rep_) {
            case Rep::Dense:
                return dense_ * v;
            case Rep::Diagonal:
                return symbol_.cwiseProduct(v);
            case Rep::FourierDiagonal: {
                Vec w = v;
                if (grid_.size() == 2)
                    Fft::forward2(w, grid_[0], grid_[1]);
                else
                    Fft::forward(w);
                w = symbol_.cwiseProduct(w);
                if (grid_.size() == 2)
                    Fft::inverse2(w, grid_[0], grid_[1]);
                else
                    Fft::inverse(w);
                return w;
            }
        }
        throw Error("unreachable");
    }

    Vec operator*(const Vec& v) const { return apply(v); }

    Operator adjoint() const {
        Operator out = *this;
        if (rep_ == Rep::Dense)
            out.dense_ = dense_.adjoint();
        else
            out.symbol_ = symbol_.conjugate();
        return out;
    }

    Mat to_dense() const {
        switch (rep_) {
            case Rep::Dense:
                return dense_;
            case Rep::Diagonal:
                return Mat(symbol_.asDiagonal());
            case Rep::FourierDiagonal: {
                Mat m(dim_, dim_);
                Vec e = Vec::Zero(dim_);
                for (Eigen::Index j = 0; j < dim_; ++j) {
                    e[j] = 1.0;
                    m.col(j) = apply(e);
                    e[j] = 0.0;
                }
                return m;
            }
        }
        throw Error("unreachable");
    }

    LinOp as_linop(std::string label = "") const {
        Operator self = *this;
        return {.apply = [self](const Vec& v) { return self.apply(v); }, .label = std::move(label)};
    }

private:
    Operator() = default;

    void validate(const Tolerances& tol) {
        if (flags_.hermitian) {
            if (rep_ == Rep::Dense) {
                double scale = dense_.cwiseAbs().maxCoeff();
                double dev = (dense_ - dense_.adjoint()).cwiseAbs().maxCoeff();
                if (dev > tol.hermitian_rel * std::max(scale, 1e-300))
                    throw Error("hermitian_flag violated: max|M-M*| = " + std::to_string(dev));
            } else {
                double dev = symbol_.imag().cwiseAbs().maxCoeff();
                double scale = std::max(symbol_.cwiseAbs().maxCoeff(), 1e-300);
                if (dev > tol.hermitian_rel * scale)
                    throw Error("hermitian_flag violated: symbol not real");
            }
        }
        if (flags_.unitary) {
            if (rep_ != Rep::Dense) {
                double dev = (symbol_.cwiseAbs().array() - 1.0).abs().maxCoeff();
                if (dev > tol.unitary)
                    throw Error("unitary_flag violated: max||symbol|-1| = " + std::to_string(dev));
            } else if (dim_ <= 1024) {
                RVec s = singular_values(dense_);
                double dev = (s.array().square() - 1.0).abs().maxCoeff();
                if (dev > tol.unitary)
                    throw Error("unitary_flag violated: ||MM*-I|| = " + std::to_string(dev));
            } else {
                // spot check on seeded probes at large dimension
                std::mt19937_64 rng(0x5eed);
                std::normal_distribution<double> g;
                for (int rep = 0; rep < 4; ++rep) {
                    Vec v(dim_);
                    for (Eigen::Index i = 0; i < dim_; ++i) v[i] = cplx(g(rng), g(rng));
                    v /= v.norm();
                    Vec w = dense_.adjoint() * (dense_ * v);
                    if ((w - v).norm() > 32 * tol.unitary)
                        throw Error("unitary_flag violated on probe vector");
                }
            }
        }
    }

    Rep rep_{Rep::Dense};
    Eigen::Index dim_{0};
    Mat dense_;
    Vec symbol_;
    std::vector<int> grid_;
    Flags flags_;
};

// Complex coefficient vector with a label. Norm metadata is computed on demand.
struct StateVector {
    Vec entries;
    std::string label;

    Eigen::Index dim() const { return entries.size(); }
    double norm() const { return entries.norm(); }

    StateVector normalized() const {
        double n = norm();
        if (!(n > 0)) throw Error("StateVector: cannot normalize the zero vector");
        return {entries / n, label};
    }
};

}  // namespace decaylab
