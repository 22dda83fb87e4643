#pragma once

#include <lapacke.h>

#include <algorithm>
#include <numeric>

#include "decaylab/core.hpp"

namespace decaylab {

struct HermEig {
    RVec values;  // ascending
    Mat vectors;  // columns
};

// Dense Hermitian eigendecomposition (LAPACK zheevd), ascending eigenvalues.
inline HermEig eig_hermitian_dense(Mat m) {
    const lapack_int n = lapack_int(m.rows());
    RVec w(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                     reinterpret_cast<lapack_complex_double*>(m.data()), n, w.data());
    if (info != 0) throw Error("zheevd failed, info=" + std::to_string(info));
    return {std::move(w), std::move(m)};
}

struct UnitaryEig {
    Vec values;   // unimodular, sorted by principal argument
    Mat vectors;  // orthonormal columns
};

// Schur decomposition of a unitary (normal) matrix. For normal input the Schur
// form is diagonal up to rounding, so Q's columns are eigenvectors.
inline UnitaryEig eig_unitary_dense(Mat m) {
    const lapack_int n = lapack_int(m.rows());
    Vec w(n);
    Mat vs(n, n);
    lapack_int sdim = 0;
    lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n,
                                    reinterpret_cast<lapack_complex_double*>(m.data()), n, &sdim,
                                    reinterpret_cast<lapack_complex_double*>(w.data()),
                                    reinterpret_cast<lapack_complex_double*>(vs.data()), n);
    if (info != 0) throw Error("zgees failed, info=" + std::to_string(info));
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::arg(w[a]) < std::arg(w[b]);
    });
    UnitaryEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (lapack_int j = 0; j < n; ++j) {
        out.values[j] = w[idx[j]];
        out.vectors.col(j) = vs.col(idx[j]);
    }
    return out;
}

// Largest singular value.
inline double op_norm(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Mat a = m;
    const lapack_int rows = lapack_int(a.rows()), cols = lapack_int(a.cols());
    RVec s(std::min(rows, cols));
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), rows,
                                     s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw Error("zgesdd failed, info=" + std::to_string(info));
    return s[0];
}

inline RVec singular_values(Mat a) {
    const lapack_int rows = lapack_int(a.rows()), cols = lapack_int(a.cols());
    RVec s(std::min(rows, cols));
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), rows,
                                     s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw Error("zgesdd failed, info=" + std::to_string(info));
    return s;
}

}  // namespace decaylab
