#pragma once

#include <algorithm>
#include <numeric>

#include "decaylab/operator.hpp"

namespace decaylab {

// Change of basis to the eigenbasis. Dense (explicit eigenvector matrix),
// Fourier (the DFT diagonalizes fourier_diagonal operators) or Identity
// (diagonal operators). `perm[i]` is the storage index of the i-th sorted
// eigenvalue.
class SpectralBasis {
public:
    enum class Kind { DenseC, Fourier, Sine, Identity };

    static SpectralBasis dense(Mat v) {
        SpectralBasis b;
        b.kind_ = Kind::DenseC;
        b.v_ = std::move(v);
        b.dim_ = b.v_.rows();
        return b;
    }
    static SpectralBasis fourier(std::vector<int> grid, Eigen::VectorXi perm) {
        SpectralBasis b;
        b.kind_ = Kind::Fourier;
        b.grid_ = std::move(grid);
        b.perm_ = std::move(perm);
        b.dim_ = b.perm_.size();
        return b;
    }
    static SpectralBasis identity(Eigen::VectorXi perm) {
        SpectralBasis b;
        b.kind_ = Kind::Identity;
        b.perm_ = std::move(perm);
        b.dim_ = b.perm_.size();
        return b;
    }
    // orthonormal sine basis v_m(x) = sqrt(2/(N+1)) sin(pi(m+1)(x+1)/(N+1))
    static SpectralBasis sine(Eigen::VectorXi perm) {
        SpectralBasis b;
        b.kind_ = Kind::Sine;
        b.perm_ = std::move(perm);
        b.dim_ = b.perm_.size();
        return b;
    }

    Kind kind() const { return kind_; }
    Eigen::Index dim() const { return dim_; }

    // coefficients in sorted-eigenvalue order
    Vec to_eigen(const Vec& v) const {
        switch (kind_) {
            case Kind::DenseC:
                return v_.adjoint() * v;
            case Kind::Fourier: {
                Vec w = v;
                if (grid_.size() == 2)
                    Fft::forward2(w, grid_[0], grid_[1]);
                else
                    Fft::forward(w);
                return gather(w);
            }
            case Kind::Sine: {
                Vec w = v;
                Fft::dst1(w);
                return gather(w);
            }
            case Kind::Identity:
                return gather(v);
        }
        throw Error("unreachable");
    }

    Vec from_eigen(const Vec& c) const {
        switch (kind_) {
            case Kind::DenseC:
                return v_ * c;
            case Kind::Fourier: {
                Vec w = scatter(c);
                if (grid_.size() == 2)
                    Fft::inverse2(w, grid_[0], grid_[1]);
                else
                    Fft::inverse(w);
                return w;
            }
            case Kind::Sine: {
                Vec w = scatter(c);
                Fft::dst1(w);
                return w;
            }
            case Kind::Identity:
                return scatter(c);
        }
        throw Error("unreachable");
    }

    // i-th eigenvector (sorted order)
    Vec column(Eigen::Index i) const {
        if (kind_ == Kind::DenseC) return v_.col(i);
        Vec c = Vec::Zero(dim_);
        c[i] = 1.0;
        return from_eigen(c);
    }

    const Mat& matrix() const {
        if (kind_ != Kind::DenseC) throw Error("SpectralBasis: no explicit matrix");
        return v_;
    }

    // storage index of the i-th sorted eigenvalue (empty = identity order)
    const Eigen::VectorXi& perm() const { return perm_; }
    const std::vector<int>& fourier_grid() const { return grid_; }

    // scatter sorted-order values back to storage order
    Vec scatter_to_storage(const Vec& c) const { return scatter(c); }

private:
    Vec gather(const Vec& w) const {
        if (perm_.size() == 0) return w;
        Vec out(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) out[i] = w[perm_[i]];
        return out;
    }
    Vec scatter(const Vec& c) const {
        if (perm_.size() == 0) return c;
        Vec out(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) out[perm_[i]] = c[i];
        return out;
    }

    Kind kind_{Kind::Identity};
    Eigen::Index dim_{0};
    Mat v_;
    std::vector<int> grid_;
    Eigen::VectorXi perm_;
};

struct SpectralData {
    Vec eigenvalues;  // sorted; real parts only meaningful when hermitian
    bool hermitian = false;
    SpectralBasis basis;
    double cluster_tolerance = 1e-8;
    std::vector<std::vector<Eigen::Index>> clusters;

    Eigen::Index dim() const { return eigenvalues.size(); }
    RVec real_eigenvalues() const { return eigenvalues.real(); }

    // orthogonal projection of v onto cluster c
    Vec project(const Vec& v, const std::vector<Eigen::Index>& cluster) const {
        Vec c = basis.to_eigen(v);
        Vec masked = Vec::Zero(dim());
        for (auto i : cluster) masked[i] = c[i];
        return basis.from_eigen(masked);
    }
};

namespace detail {

inline std::vector<std::vector<Eigen::Index>> cluster_indices(const Vec& vals, bool hermitian,
                                                              double tol) {
    const Eigen::Index n = vals.size();
    std::vector<std::vector<Eigen::Index>> out;
    auto gap = [&](Eigen::Index a, Eigen::Index b) {
        if (hermitian) return std::abs(vals[b].real() - vals[a].real());
        return std::abs(vals[b] - vals[a]);
    };
    std::vector<Eigen::Index> cur{0};
    for (Eigen::Index i = 1; i < n; ++i) {
        if (gap(cur.back(), i) <= tol) {
            cur.push_back(i);
        } else {
            out.push_back(std::move(cur));
            cur = {i};
        }
    }
    out.push_back(std::move(cur));
    // unimodular eigenvalues wrap around the circle
    if (!hermitian && out.size() > 1 && gap(out.back().back(), out.front().front()) <= tol) {
        for (auto i : out.front()) out.back().push_back(i);
        out.erase(out.begin());
    }
    return out;
}

inline Eigen::VectorXi sort_perm(const Vec& vals, bool hermitian) {
    std::vector<Eigen::Index> idx(vals.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (hermitian)
        std::sort(idx.begin(), idx.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return vals[a].real() < vals[b].real(); });
    else
        std::sort(idx.begin(), idx.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return std::arg(vals[a]) < std::arg(vals[b]); });
    Eigen::VectorXi perm(vals.size());
    for (Eigen::Index i = 0; i < perm.size(); ++i) perm[i] = int(idx[i]);
    return perm;
}

}  // namespace detail

// Eigendecomposition of a normal operator (hermitian or unitary flag required).
// Hermitian path: real eigenvalues ascending. Unitary path: unimodular
// eigenvalues sorted by principal argument.
inline SpectralData eig(const Operator& op, double cluster_tolerance = default_tol().cluster) {
    if (!op.hermitian_flag() && !op.unitary_flag())
        throw Error("eig: operator carries neither hermitian nor unitary flag");
    SpectralData sd;
    sd.hermitian = op.hermitian_flag();
    sd.cluster_tolerance = cluster_tolerance;

    if (op.rep() == Rep::Dense) {
        if (sd.hermitian) {
            HermEig he = eig_hermitian_dense(op.matrix());
            sd.eigenvalues = he.values.cast<cplx>();
            sd.basis = SpectralBasis::dense(std::move(he.vectors));
        } else {
            UnitaryEig ue = eig_unitary_dense(op.matrix());
            sd.eigenvalues = std::move(ue.values);
            sd.basis = SpectralBasis::dense(std::move(ue.vectors));
        }
    } else {
        Vec vals = op.symbol();
        if (sd.hermitian) vals = vals.real().cast<cplx>();
        Eigen::VectorXi perm = detail::sort_perm(vals, sd.hermitian);
        Vec sorted(vals.size());
        for (Eigen::Index i = 0; i < vals.size(); ++i) sorted[i] = vals[perm[i]];
        sd.eigenvalues = std::move(sorted);
        sd.basis = (op.rep() == Rep::FourierDiagonal)
                       ? SpectralBasis::fourier(op.grid(), perm)
                       : SpectralBasis::identity(perm);
    }
    sd.clusters = detail::cluster_indices(sd.eigenvalues, sd.hermitian, cluster_tolerance);
    return sd;
}

struct SpectralCheck {
    double reconstruction = 0;  // ||V diag V* - M|| / ||M||
    double orthonormality = 0;  // ||V*V - I||
};

// Invariant check; dense verification up to `dense_cap`, probe-based above.
inline SpectralCheck verify(const SpectralData& sd, const Operator& op,
                            Eigen::Index dense_cap = 1024) {
    SpectralCheck out;
    const Eigen::Index n = sd.dim();
    if (n <= dense_cap) {
        Mat v(n, n);
        for (Eigen::Index j = 0; j < n; ++j) v.col(j) = sd.basis.column(j);
        Mat m = op.to_dense();
        out.reconstruction =
            op_norm(Mat(v * sd.eigenvalues.asDiagonal() * v.adjoint() - m)) / std::max(op_norm(m), 1e-300);
        out.orthonormality = op_norm(Mat(v.adjoint() * v - Mat::Identity(n, n)));
    } else {
        std::mt19937_64 rng(0xab5u);
        std::normal_distribution<double> g;
        for (int r = 0; r < 6; ++r) {
            Vec x(n);
            for (Eigen::Index i = 0; i < n; ++i) x[i] = cplx(g(rng), g(rng));
            x /= x.norm();
            Vec c = sd.basis.to_eigen(x);
            Vec rec = sd.basis.from_eigen(Vec(sd.eigenvalues.cwiseProduct(c)));
            out.reconstruction = std::max(out.reconstruction,
                                          (rec - op.apply(x)).norm() /
                                              std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff()));
            out.orthonormality =
                std::max(out.orthonormality, std::abs(c.norm() - 1.0));
        }
    }
    return out;
}

}  // namespace decaylab
