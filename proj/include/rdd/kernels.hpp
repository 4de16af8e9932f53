#pragma once

#include <cstddef>

// Arithmetic primitives behind the solver's inner loops. Every primitive has
// a scalar reference implementation and, where the build target supports it,
// a SIMD variant (AVX2+FMA on x86-64, NEON on aarch64). The active variant is
// selected once at startup from CPU capabilities; RDD_KERNELS=scalar|avx2|neon
// overrides the choice, and tests pin backends explicitly to compare them.
//
// Accumulation order differs between backends (SIMD variants keep several
// partial sums), so reductions agree with the scalar reference only up to
// floating-point reassociation. NaN inputs are not handled specially; callers
// detect non-finite state downstream.

namespace rdd::kern {

enum class Backend { scalar, avx2, neon };

Backend active();
const char* name(Backend b);
bool available(Backend b);

/// Pin the dispatch table to one backend. Throws std::invalid_argument if the
/// backend is not available on this machine. Not thread safe; intended for
/// tests and startup code.
void force(Backend b);

// --- dispatched primitives -------------------------------------------------

/// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

/// sum_i a[i]^2 * b[i]
double sq_dot(const double* a, const double* b, std::size_t n);

/// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// max_i a[i]; requires n >= 1
double vmax(const double* a, std::size_t n);

/// sum_i a[i]
double vsum(const double* a, std::size_t n);

/// a[i] *= s
void vscale(double* a, double s, std::size_t n);

/// C = A * B with A m-by-k, B k-by-n, C m-by-n, all dense row-major.
/// C is overwritten and must not alias A or B.
void matmul(std::size_t m, std::size_t k, std::size_t n,
            const double* a, const double* b, double* c);

// --- per-backend entry points (for equivalence tests) ----------------------

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sq_dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double vmax(const double* a, std::size_t n);
double vsum(const double* a, std::size_t n);
void vscale(double* a, double s, std::size_t n);
void matmul(std::size_t m, std::size_t k, std::size_t n,
            const double* a, const double* b, double* c);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sq_dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double vmax(const double* a, std::size_t n);
double vsum(const double* a, std::size_t n);
void vscale(double* a, double s, std::size_t n);
void matmul(std::size_t m, std::size_t k, std::size_t n,
            const double* a, const double* b, double* c);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sq_dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double vmax(const double* a, std::size_t n);
double vsum(const double* a, std::size_t n);
void vscale(double* a, double s, std::size_t n);
void matmul(std::size_t m, std::size_t k, std::size_t n,
            const double* a, const double* b, double* c);
}  // namespace neon
#endif

}  // namespace rdd::kern
