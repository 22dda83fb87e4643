#pragma once

#include "decaylab/spectral.hpp"

namespace decaylab {

using ScalarMap = std::function<cplx(cplx)>;

inline ScalarMap real_map(std::function<double(double)> f) {
    return [f = std::move(f)](cplx z) { return cplx(f(z.real()), 0.0); };
}

inline Vec map_eigenvalues(const SpectralData& sd, const ScalarMap& f) {
    Vec fv(sd.dim());
    for (Eigen::Index i = 0; i < sd.dim(); ++i) {
        cplx lam = sd.hermitian ? cplx(sd.eigenvalues[i].real(), 0.0) : sd.eigenvalues[i];
        cplx y = f(lam);
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
            throw Error("func_calculus: map not finite at an eigenvalue");
        fv[i] = y;
    }
    return fv;
}

// f applied to a vector through the spectral data, without materializing f(op).
inline Vec apply_function(const SpectralData& sd, const ScalarMap& f, const Vec& v) {
    Vec fv = map_eigenvalues(sd, f);
    return sd.basis.from_eigen(Vec(fv.cwiseProduct(sd.basis.to_eigen(v))));
}

// Operator V f(diag) V*. Exact symbol map for fourier_diagonal/diagonal input.
inline Operator func_calculus(const SpectralData& sd, const ScalarMap& f,
                              const Tolerances& tol = default_tol()) {
    Vec fv = map_eigenvalues(sd, f);
    double scale = std::max(fv.cwiseAbs().maxCoeff(), 1e-300);
    Flags flags;
    flags.hermitian = fv.imag().cwiseAbs().maxCoeff() <= tol.hermitian_rel * scale;
    flags.unitary = (fv.cwiseAbs().array() - 1.0).abs().maxCoeff() <= tol.unitary;

    switch (sd.basis.kind()) {
        case SpectralBasis::Kind::Identity:
            return Operator::diagonal(sd.basis.scatter_to_storage(fv), flags, tol);
        case SpectralBasis::Kind::Fourier:
            return Operator::fourier_diagonal(sd.basis.scatter_to_storage(fv), flags,
                                              sd.basis.fourier_grid(), tol);
        case SpectralBasis::Kind::Sine: {
            if (sd.dim() > 4096) throw Error("func_calculus: sine-basis result too large to store");
            Mat m(sd.dim(), sd.dim());
            Vec e = Vec::Zero(sd.dim());
            for (Eigen::Index j = 0; j < sd.dim(); ++j) {
                e[j] = 1.0;
                m.col(j) = sd.basis.from_eigen(Vec(fv.cwiseProduct(sd.basis.to_eigen(e))));
                e[j] = 0.0;
            }
            if (flags.hermitian) m = 0.5 * (m + Mat(m.adjoint()));
            return Operator::dense(std::move(m), flags, tol);
        }
        case SpectralBasis::Kind::DenseC: {
            const Mat& v = sd.basis.matrix();
            Mat m = v * fv.asDiagonal() * v.adjoint();
            if (flags.hermitian) m = 0.5 * (m + Mat(m.adjoint()));
            return Operator::dense(std::move(m), flags, tol);
        }
    }
    throw Error("unreachable");
}

// e^{-itH} v through the eigenbasis of a hermitian SpectralData.
inline StateVector evolve(const SpectralData& sd, double t, const StateVector& v,
                          const Tolerances& tol = default_tol()) {
    if (v.dim() != sd.dim()) throw Error("evolve: dimension mismatch");
    if (!sd.hermitian) throw Error("evolve: spectral data is not hermitian");
    Vec c = sd.basis.to_eigen(v.entries);
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c[i] *= std::exp(cplx(0.0, -t * sd.eigenvalues[i].real()));
    StateVector out{sd.basis.from_eigen(c), v.label};
    double n0 = v.norm();
    if (n0 > 0 && std::abs(out.norm() - n0) > tol.norm_preserve * n0)
        throw Error("evolve: norm not preserved");
    return out;
}

}  // namespace decaylab
