#include "rdd/distortion.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rdd/kernels.hpp"
#include "neumaier.hpp"

namespace rdd {

namespace {

void check_shapes(const Matrix& dx, const Matrix& dy, const Coupling& coupling,
                  const std::vector<double>& p) {
    const std::size_t m = coupling.w.rows();
    const std::size_t n = coupling.w.cols();
    if (dx.rows() != m || dx.cols() != m)
        throw std::invalid_argument("distortion: dx must be MxM with M = coupling rows");
    if (dy.rows() != n || dy.cols() != n)
        throw std::invalid_argument("distortion: dy must be NxN with N = coupling cols");
    if (p.size() != m) throw std::invalid_argument("distortion: p length must equal M");
}

}  // namespace

double gromov_distortion_bruteforce(const Matrix& dx, const Matrix& dy, const Coupling& coupling,
                                    const std::vector<double>& p, std::size_t oracle_cap) {
    check_shapes(dx, dy, coupling, p);
    const std::size_t m = coupling.w.rows();
    const std::size_t n = coupling.w.cols();
    if (m * n > oracle_cap)
        throw std::invalid_argument("gromov_distortion_bruteforce: M*N = " + std::to_string(m * n) +
                                    " exceeds the oracle cap of " + std::to_string(oracle_cap) +
                                    "; use gromov_distortion_decomposed");

    const Matrix& w = coupling.w;
    NeumaierSum acc;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t ip = 0; ip < m; ++ip) {
            const double pp = p[i] * p[ip];
            if (pp == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t jp = 0; jp < n; ++jp) {
                    const double diff = dx(i, ip) - dy(j, jp);
                    acc.add(diff * diff * w(i, j) * w(ip, jp) * pp);
                }
        }
    return acc.value();
}

DistortionBreakdown gromov_distortion_decomposed(const Matrix& dx, const Matrix& dy,
                                                 const Coupling& coupling,
                                                 const std::vector<double>& p) {
    check_shapes(dx, dy, coupling, p);
    const std::size_t m = coupling.w.rows();
    const std::size_t n = coupling.w.cols();
    const Matrix& w = coupling.w;

    DistortionBreakdown out;

    // c1 = p^T (dx∘dx) p
    NeumaierSum c1;
    for (std::size_t i = 0; i < m; ++i)
        if (p[i] != 0.0) c1.add(p[i] * kern::sq_dot(dx.row(i), p.data(), m));
    out.c1 = c1.value();

    // wtp = W^T p, then c2 = wtp^T (dy∘dy) wtp
    std::vector<double> wtp(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (p[i] != 0.0) kern::axpy(p[i], w.row(i), wtp.data(), n);
    NeumaierSum c2;
    for (std::size_t j = 0; j < n; ++j)
        if (wtp[j] != 0.0) c2.add(wtp[j] * kern::sq_dot(dy.row(j), wtp.data(), n));
    out.c2 = c2.value();

    // cross = <C W dy, W> with C_ij = dx_ij p_j p_i. Since
    // (C W)_ij = p_i (dx · diag(p) W)_ij, materialize PW = diag(p) W (MxN)
    // instead of the MxM matrix C, then take two MxN products.
    Matrix pw(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* wr = w.row(i);
        double* pr = pw.row(i);
        for (std::size_t j = 0; j < n; ++j) pr[j] = p[i] * wr[j];
    }
    Matrix t1(m, n);  // dx · PW
    kern::matmul(m, m, n, dx.data(), pw.data(), t1.data());
    Matrix t2(m, n);  // (dx · PW) · dy
    kern::matmul(m, n, n, t1.data(), dy.data(), t2.data());
    NeumaierSum cross;
    for (std::size_t i = 0; i < m; ++i)
        if (p[i] != 0.0) cross.add(p[i] * kern::dot(t2.row(i), w.row(i), n));
    out.cross = cross.value();

    out.total = out.c1 + out.c2 - 2.0 * out.cross;
    return out;
}

double expected_classical_distortion(const Matrix& d_cross, const Coupling& coupling,
                                     const std::vector<double>& p) {
    const std::size_t m = coupling.w.rows();
    const std::size_t n = coupling.w.cols();
    if (d_cross.rows() != m || d_cross.cols() != n)
        throw std::invalid_argument("expected_classical_distortion: d_cross must be MxN");
    if (p.size() != m)
        throw std::invalid_argument("expected_classical_distortion: p length must equal M");
    NeumaierSum acc;
    for (std::size_t i = 0; i < m; ++i)
        if (p[i] != 0.0) acc.add(p[i] * kern::dot(d_cross.row(i), coupling.w.row(i), n));
    return acc.value();
}

double fused_distortion(const Matrix& dx, const Matrix& dy, const Matrix* d_cross,
                        const Coupling& coupling, const std::vector<double>& p, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("fused_distortion: theta must lie in [0,1]");
    if (theta < 1.0 && d_cross == nullptr)
        throw std::invalid_argument("fused_distortion: d_cross required when theta < 1");
    if (theta == 1.0) return gromov_distortion_decomposed(dx, dy, coupling, p).total;
    if (theta == 0.0) return expected_classical_distortion(*d_cross, coupling, p);
    const double gromov = gromov_distortion_decomposed(dx, dy, coupling, p).total;
    const double classical = expected_classical_distortion(*d_cross, coupling, p);
    return theta * gromov + (1.0 - theta) * classical;
}

DmaxResult compute_dmax(const Matrix& dx, const Matrix& dy, const std::vector<double>& p,
                        int restarts, std::uint64_t seed) {
    const std::size_t m = dx.rows();
    const std::size_t n = dy.rows();
    if (dx.cols() != m) throw std::invalid_argument("compute_dmax: dx must be square");
    if (dy.cols() != n) throw std::invalid_argument("compute_dmax: dy must be square");
    if (p.size() != m) throw std::invalid_argument("compute_dmax: p length must equal M");
    if (restarts < 1) throw std::invalid_argument("compute_dmax: restarts must be >= 1");

    // constant part and the mean source distance feeding Q
    NeumaierSum c1_acc, mx_acc;
    for (std::size_t i = 0; i < m; ++i) {
        if (p[i] == 0.0) continue;
        c1_acc.add(p[i] * kern::sq_dot(dx.row(i), p.data(), m));
        mx_acc.add(p[i] * kern::dot(dx.row(i), p.data(), m));
    }
    const double c1 = c1_acc.value();
    const double m_x = mx_acc.value();

    Matrix q(n, n);
    double q_norm = 0.0;  // induced infinity norm: max absolute row sum
    for (std::size_t j = 0; j < n; ++j) {
        double row_abs = 0.0;
        for (std::size_t jp = 0; jp < n; ++jp) {
            const double d = dy(j, jp);
            q(j, jp) = d * d - 2.0 * m_x * d;
            row_abs += std::fabs(q(j, jp));
        }
        q_norm = std::fmax(q_norm, row_abs);
    }

    const int iters = 5000;
    DmaxResult result;
    result.iterations_per_restart = iters;
    result.restart_values.reserve(static_cast<std::size_t>(restarts));

    auto quad = [&](const std::vector<double>& r) {
        NeumaierSum acc;
        for (std::size_t j = 0; j < n; ++j)
            if (r[j] != 0.0) acc.add(r[j] * kern::dot(q.row(j), r.data(), n));
        return acc.value();
    };

    if (q_norm == 0.0) {
        // Q vanishes (e.g. N = 1): the objective is constant in r.
        result.value = c1;
        result.r.assign(n, 1.0 / static_cast<double>(n));
        result.restart_values.assign(static_cast<std::size_t>(restarts), c1);
        result.iterations_per_restart = 0;
        return result;
    }

    const double eta = 1.0 / (2.0 * q_norm);
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> exp1(1.0);

    double best_quad = 0.0;
    std::vector<double> best_r;
    std::vector<double> r(n), grad(n), next(n);

    for (int s = 0; s < restarts; ++s) {
        if (s == 0) {
            std::fill(r.begin(), r.end(), 1.0 / static_cast<double>(n));
        } else {
            // Dirichlet(1,...,1) draw: normalized unit exponentials
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                r[j] = exp1(rng);
                total += r[j];
            }
            for (std::size_t j = 0; j < n; ++j) r[j] /= total;
        }

        for (int it = 0; it < iters; ++it) {
            for (std::size_t j = 0; j < n; ++j)
                grad[j] = 2.0 * kern::dot(q.row(j), r.data(), n);
            // |eta * grad_j| <= eta * 2 * q_norm = 1, so exp never overflows
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                next[j] = r[j] * std::exp(-eta * grad[j]);
                total += next[j];
            }
            const double inv = 1.0 / total;
            for (std::size_t j = 0; j < n; ++j) r[j] = next[j] * inv;
        }

        const double value = quad(r);
        result.restart_values.push_back(c1 + value);
        if (best_r.empty() || value < best_quad) {
            best_quad = value;
            best_r = r;
        }
    }

    result.value = c1 + best_quad;
    result.r = std::move(best_r);
    return result;
}

}  // namespace rdd
