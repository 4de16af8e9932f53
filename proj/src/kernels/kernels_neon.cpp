#if defined(__aarch64__)

#include "rdd/kernels.hpp"

#include <arm_neon.h>
#include <cstring>

// NEON variants; Advanced SIMD is mandatory on aarch64 so there is no runtime
// feature check beyond the architecture itself.

namespace rdd::kern::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double r = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sq_dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t av = vld1q_f64(a + i);
        acc = vfmaq_f64(acc, vmulq_f64(av, av), vld1q_f64(b + i));
    }
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += a[i] * a[i] * b[i];
    return r;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t av = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double vmax(const double* a, std::size_t n) {
    std::size_t i = 0;
    double m;
    if (n >= 2) {
        float64x2_t mv = vld1q_f64(a);
        for (i = 2; i + 2 <= n; i += 2) mv = vmaxq_f64(mv, vld1q_f64(a + i));
        m = vmaxvq_f64(mv);
    } else {
        m = a[0];
        i = 1;
    }
    for (; i < n; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

double vsum(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

void vscale(double* a, double s, std::size_t n) {
    const float64x2_t sv = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(a + i, vmulq_f64(sv, vld1q_f64(a + i)));
    for (; i < n; ++i) a[i] *= s;
}

void matmul(std::size_t m, std::size_t k, std::size_t n,
            const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        std::memset(crow, 0, n * sizeof(double));
        const double* arow = a + i * k;
        std::size_t kk = 0;
        for (; kk + 2 <= k; kk += 2) {
            const float64x2_t a0 = vdupq_n_f64(arow[kk]);
            const float64x2_t a1 = vdupq_n_f64(arow[kk + 1]);
            const double* b0 = b + kk * n;
            const double* b1 = b0 + n;
            std::size_t j = 0;
            for (; j + 2 <= n; j += 2) {
                float64x2_t cv = vld1q_f64(crow + j);
                cv = vfmaq_f64(cv, a0, vld1q_f64(b0 + j));
                cv = vfmaq_f64(cv, a1, vld1q_f64(b1 + j));
                vst1q_f64(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += arow[kk] * b0[j] + arow[kk + 1] * b1[j];
        }
        for (; kk < k; ++kk) {
            const float64x2_t av = vdupq_n_f64(arow[kk]);
            const double* brow = b + kk * n;
            std::size_t j = 0;
            for (; j + 2 <= n; j += 2)
                vst1q_f64(crow + j, vfmaq_f64(vld1q_f64(crow + j), av, vld1q_f64(brow + j)));
            for (; j < n; ++j) crow[j] += arow[kk] * brow[j];
        }
    }
}

}  // namespace rdd::kern::neon

#endif  // __aarch64__
