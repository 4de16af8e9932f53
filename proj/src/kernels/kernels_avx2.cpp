#if defined(__x86_64__) || defined(_M_X64)

#include "rdd/kernels.hpp"

#include <cstring>
#include <immintrin.h>

// AVX2+FMA variants. Built with per-function target attributes so this
// translation unit needs no special compile flags; the dispatcher only
// installs these after __builtin_cpu_supports confirms avx2 and fma.

#define RDD_AVX2 __attribute__((target("avx2,fma")))

namespace rdd::kern::avx2 {

namespace {

RDD_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

RDD_AVX2 double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double r = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

RDD_AVX2 double sq_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d a0 = _mm256_loadu_pd(a + i);
        __m256d a1 = _mm256_loadu_pd(a + i + 4);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(a0, a0), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_mul_pd(a1, a1), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        __m256d a0 = _mm256_loadu_pd(a + i);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(a0, a0), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double r = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) r += a[i] * a[i] * b[i];
    return r;
}

RDD_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4),
                                                    _mm256_loadu_pd(y + i + 4)));
    }
    if (i + 4 <= n) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
        i += 4;
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

RDD_AVX2 double vmax(const double* a, std::size_t n) {
    std::size_t i = 0;
    double m;
    if (n >= 4) {
        __m256d mv = _mm256_loadu_pd(a);
        for (i = 4; i + 4 <= n; i += 4) mv = _mm256_max_pd(mv, _mm256_loadu_pd(a + i));
        __m128d lo = _mm256_castpd256_pd128(mv);
        __m128d hi = _mm256_extractf128_pd(mv, 1);
        __m128d m2 = _mm_max_pd(lo, hi);
        m = _mm_cvtsd_f64(_mm_max_sd(m2, _mm_unpackhi_pd(m2, m2)));
    } else {
        m = a[0];
        i = 1;
    }
    for (; i < n; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

RDD_AVX2 double vsum(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    if (i + 4 <= n) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        i += 4;
    }
    double r = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) r += a[i];
    return r;
}

RDD_AVX2 void vscale(double* a, double s, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(a + i, _mm256_mul_pd(sv, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) a[i] *= s;
}

// i-k-j product with a 4-way k panel: each pass over a C row folds in four
// rows of B, so C traffic is amortized and the j loop runs on FMA.
RDD_AVX2 void matmul(std::size_t m, std::size_t k, std::size_t n,
                     const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        std::memset(crow, 0, n * sizeof(double));
        const double* arow = a + i * k;
        std::size_t kk = 0;
        for (; kk + 4 <= k; kk += 4) {
            const __m256d a0 = _mm256_set1_pd(arow[kk]);
            const __m256d a1 = _mm256_set1_pd(arow[kk + 1]);
            const __m256d a2 = _mm256_set1_pd(arow[kk + 2]);
            const __m256d a3 = _mm256_set1_pd(arow[kk + 3]);
            const double* b0 = b + kk * n;
            const double* b1 = b0 + n;
            const double* b2 = b1 + n;
            const double* b3 = b2 + n;
            std::size_t j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256d c0 = _mm256_loadu_pd(crow + j);
                __m256d c1 = _mm256_loadu_pd(crow + j + 4);
                c0 = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + j), c0);
                c1 = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + j + 4), c1);
                c0 = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + j), c0);
                c1 = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + j + 4), c1);
                c0 = _mm256_fmadd_pd(a2, _mm256_loadu_pd(b2 + j), c0);
                c1 = _mm256_fmadd_pd(a2, _mm256_loadu_pd(b2 + j + 4), c1);
                c0 = _mm256_fmadd_pd(a3, _mm256_loadu_pd(b3 + j), c0);
                c1 = _mm256_fmadd_pd(a3, _mm256_loadu_pd(b3 + j + 4), c1);
                _mm256_storeu_pd(crow + j, c0);
                _mm256_storeu_pd(crow + j + 4, c1);
            }
            for (; j + 4 <= n; j += 4) {
                __m256d c0 = _mm256_loadu_pd(crow + j);
                c0 = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + j), c0);
                c0 = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + j), c0);
                c0 = _mm256_fmadd_pd(a2, _mm256_loadu_pd(b2 + j), c0);
                c0 = _mm256_fmadd_pd(a3, _mm256_loadu_pd(b3 + j), c0);
                _mm256_storeu_pd(crow + j, c0);
            }
            for (; j < n; ++j) {
                crow[j] += arow[kk] * b0[j] + arow[kk + 1] * b1[j] +
                           arow[kk + 2] * b2[j] + arow[kk + 3] * b3[j];
            }
        }
        for (; kk < k; ++kk) {
            const __m256d av = _mm256_set1_pd(arow[kk]);
            const double* brow = b + kk * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                _mm256_storeu_pd(crow + j,
                                 _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j),
                                                 _mm256_loadu_pd(crow + j)));
            }
            for (; j < n; ++j) crow[j] += arow[kk] * brow[j];
        }
    }
}

}  // namespace rdd::kern::avx2

#endif  // __x86_64__
