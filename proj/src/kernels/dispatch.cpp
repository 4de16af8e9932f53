#include "rdd/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace rdd::kern {

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sq_dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*vmax)(const double*, std::size_t);
    double (*vsum)(const double*, std::size_t);
    void (*vscale)(double*, double, std::size_t);
    void (*matmul)(std::size_t, std::size_t, std::size_t,
                   const double*, const double*, double*);
    Backend backend;
};

constexpr Table kScalar = {scalar::dot,  scalar::sq_dot, scalar::axpy,
                           scalar::vmax, scalar::vsum,   scalar::vscale,
                           scalar::matmul, Backend::scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2 = {avx2::dot,  avx2::sq_dot, avx2::axpy,  avx2::vmax,
                         avx2::vsum, avx2::vscale, avx2::matmul, Backend::avx2};
#endif
#if defined(__aarch64__)
constexpr Table kNeon = {neon::dot,  neon::sq_dot, neon::axpy,  neon::vmax,
                         neon::vsum, neon::vscale, neon::matmul, Backend::neon};
#endif

bool cpu_supports(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const Table& table_for(Backend b) {
    switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
        return kAvx2;
#endif
#if defined(__aarch64__)
    case Backend::neon:
        return kNeon;
#endif
    default:
        return kScalar;
    }
}

Backend detect() {
    if (const char* env = std::getenv("RDD_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_supports(Backend::avx2))
            return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && cpu_supports(Backend::neon))
            return Backend::neon;
        // unknown or unsupported value: fall through to auto detection
    }
    if (cpu_supports(Backend::avx2)) return Backend::avx2;
    if (cpu_supports(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

const Table* g_table = nullptr;

const Table& active_table() {
    if (!g_table) g_table = &table_for(detect());
    return *g_table;
}

}  // namespace

Backend active() { return active_table().backend; }

const char* name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2:   return "avx2";
    case Backend::neon:   return "neon";
    }
    return "?";
}

bool available(Backend b) { return cpu_supports(b); }

void force(Backend b) {
    if (!cpu_supports(b))
        throw std::invalid_argument(std::string("kernel backend not available: ") + name(b));
    g_table = &table_for(b);
}

double dot(const double* a, const double* b, std::size_t n) {
    return active_table().dot(a, b, n);
}
double sq_dot(const double* a, const double* b, std::size_t n) {
    return active_table().sq_dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active_table().axpy(alpha, x, y, n);
}
double vmax(const double* a, std::size_t n) { return active_table().vmax(a, n); }
double vsum(const double* a, std::size_t n) { return active_table().vsum(a, n); }
void vscale(double* a, double s, std::size_t n) { active_table().vscale(a, s, n); }
void matmul(std::size_t m, std::size_t k, std::size_t n,
            const double* a, const double* b, double* c) {
    active_table().matmul(m, k, n, a, b, c);
}

}  // namespace rdd::kern
