#pragma once

#include <cstdint>
#include <vector>

#include "rdd/types.hpp"

namespace rdd {

/// Terms of the Gromov-type distortion split into constant, marginal-quadratic
/// and inner-product parts: total = c1 + c2 - 2*cross.
struct DistortionBreakdown {
    double c1 = 0.0;
    double c2 = 0.0;
    double cross = 0.0;
    double total = 0.0;
};

inline constexpr std::size_t kBruteForceCap = 256;  // max M*N for the quartic oracle

/// Exact quadruple sum sum_{i,i',j,j'} (dx[i][i'] - dy[j][j'])^2 w_ij w_i'j' p_i p_i'.
/// O(M^2 N^2); exists as a test oracle. Rejects M*N above `oracle_cap`.
double gromov_distortion_bruteforce(const Matrix& dx, const Matrix& dy, const Coupling& coupling,
                                    const std::vector<double>& p,
                                    std::size_t oracle_cap = kBruteForceCap);

/// Same value in O(M^2 N + M N^2) via the three-term decomposition. Requires
/// row-stochastic w (the constant term folds the row sums into 1).
DistortionBreakdown gromov_distortion_decomposed(const Matrix& dx, const Matrix& dy,
                                                 const Coupling& coupling,
                                                 const std::vector<double>& p);

/// sum_ij d_cross[i][j] w_ij p_i — the classical expected distortion.
double expected_classical_distortion(const Matrix& d_cross, const Coupling& coupling,
                                     const std::vector<double>& p);

/// theta * (Gromov total) + (1 - theta) * (classical). `d_cross` may be null
/// only when theta == 1.
double fused_distortion(const Matrix& dx, const Matrix& dy, const Matrix* d_cross,
                        const Coupling& coupling, const std::vector<double>& p, double theta);

/// Outcome of the D_max search: the smallest distortion achievable by any
/// product coupling, the marginal attaining it, and per-restart diagnostics.
struct DmaxResult {
    double value = 0.0;
    std::vector<double> r;
    std::vector<double> restart_values;  // best value found by each restart
    int iterations_per_restart = 0;
};

/// Minimizes D(r) = c1 + r^T Q r over the simplex, where
/// Q[j][j'] = dy[j][j']^2 - 2 * m_X * dy[j][j'] and m_X = p^T dx p.
/// Multiplicative mirror descent with `restarts` starts (first uniform, the
/// rest Dirichlet-random from `seed`). Q can be indefinite, so the result is
/// the best local minimum found, not a certificate.
DmaxResult compute_dmax(const Matrix& dx, const Matrix& dy, const std::vector<double>& p,
                        int restarts = 16, std::uint64_t seed = 0);

}  // namespace rdd
