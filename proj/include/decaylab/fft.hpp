#pragma once

#include <fftw3.h>

#include <map>
#include <memory>

#include "decaylab/core.hpp"

namespace decaylab {

// Unitary DFT wrappers around FFTW (1/sqrt(N) both directions).
// Plans use FFTW_ESTIMATE so results are reproducible run to run.
class Fft {
public:
    static void forward(Vec& v) { run(v, FFTW_FORWARD); }
    static void inverse(Vec& v) { run(v, FFTW_BACKWARD); }

    static Vec forward_copy(Vec v) { forward(v); return v; }
    static Vec inverse_copy(Vec v) { inverse(v); return v; }

    // 2D transform of a row-major (ny fast axis) flattened grid.
    static void forward2(Vec& v, int nx, int ny) { run2(v, nx, ny, FFTW_FORWARD); }
    static void inverse2(Vec& v, int nx, int ny) { run2(v, nx, ny, FFTW_BACKWARD); }

    // Orthonormal DST-I: (Sv)_k = sqrt(2/(N+1)) sum_j sin(pi(j+1)(k+1)/(N+1)) v_j.
    // Involution: S(Sv) = v.
    static void dst1(Vec& v) {
        const int n = int(v.size());
        RPlan& plan = rcache(n);
        const double scale = 1.0 / std::sqrt(2.0 * (n + 1));
        for (int part = 0; part < 2; ++part) {
            for (int i = 0; i < n; ++i)
                plan.buf[i] = part == 0 ? v[i].real() : v[i].imag();
            fftw_execute(plan.p);
            for (int i = 0; i < n; ++i) {
                double y = plan.buf[i] * scale;
                v[i] = part == 0 ? cplx(y, v[i].imag()) : cplx(v[i].real(), y);
            }
        }
    }

private:
    struct Plan {
        fftw_plan p{};
        fftw_complex* buf{};
        int n{};
        ~Plan() {
            if (p) fftw_destroy_plan(p);
            if (buf) fftw_free(buf);
        }
    };

    struct RPlan {
        fftw_plan p{};
        double* buf{};
        ~RPlan() {
            if (p) fftw_destroy_plan(p);
            if (buf) fftw_free(buf);
        }
    };

    static RPlan& rcache(int n) {
        static std::map<int, std::unique_ptr<RPlan>> plans;
        auto it = plans.find(n);
        if (it == plans.end()) {
            auto plan = std::make_unique<RPlan>();
            plan->buf = fftw_alloc_real(n);
            plan->p = fftw_plan_r2r_1d(n, plan->buf, plan->buf, FFTW_RODFT00, FFTW_ESTIMATE);
            it = plans.emplace(n, std::move(plan)).first;
        }
        return *it->second;
    }

    static void run(Vec& v, int sign) {
        const int n = int(v.size());
        Plan& plan = cache(n, sign, 0);
        std::copy_n(reinterpret_cast<const double*>(v.data()), 2 * n,
                    reinterpret_cast<double*>(plan.buf));
        fftw_execute(plan.p);
        std::copy_n(reinterpret_cast<const double*>(plan.buf), 2 * n,
                    reinterpret_cast<double*>(v.data()));
        v *= 1.0 / std::sqrt(double(n));
    }

    static void run2(Vec& v, int nx, int ny, int sign) {
        if (v.size() != Eigen::Index(nx) * ny) throw Error("Fft: 2D size mismatch");
        Plan& plan = cache(nx * ny, sign, ny);
        std::copy_n(reinterpret_cast<const double*>(v.data()), 2 * nx * ny,
                    reinterpret_cast<double*>(plan.buf));
        fftw_execute(plan.p);
        std::copy_n(reinterpret_cast<const double*>(plan.buf), 2 * nx * ny,
                    reinterpret_cast<double*>(v.data()));
        v *= 1.0 / std::sqrt(double(nx) * ny);
    }

    // key: (n, sign, ny) with ny=0 for 1D, else 2D plan of shape (n/ny, ny)
    static Plan& cache(int n, int sign, int ny) {
        static std::map<std::tuple<int, int, int>, std::unique_ptr<Plan>> plans;
        auto key = std::make_tuple(n, sign, ny);
        auto it = plans.find(key);
        if (it == plans.end()) {
            auto plan = std::make_unique<Plan>();
            plan->n = n;
            plan->buf = fftw_alloc_complex(n);
            if (ny == 0)
                plan->p = fftw_plan_dft_1d(n, plan->buf, plan->buf, sign, FFTW_ESTIMATE);
            else
                plan->p = fftw_plan_dft_2d(n / ny, ny, plan->buf, plan->buf, sign, FFTW_ESTIMATE);
            it = plans.emplace(key, std::move(plan)).first;
        }
        return *it->second;
    }
};

// Integer DFT frequencies in FFT storage order: 0,1,...,N/2-1,-N/2,...,-1.
inline RVec fft_freqs(int n) {
    RVec k(n);
    for (int i = 0; i < n; ++i) k[i] = (i <= (n - 1) / 2) ? double(i) : double(i - n);
    return k;
}

}  // namespace decaylab
