#pragma once

#include <cstdint>
#include <vector>

#include "rdd/types.hpp"

namespace rdd {

/// Knobs for one solve at a fixed multiplier. `lambda` prices distortion,
/// `theta` mixes Gromov-type (1) against classical (0) distortion. `w_tol`
/// enables early stopping on max|w-change| when positive; 0 runs the full
/// `max_iter` iterations. `support_floor` clamps the marginal at 1e-300 before
/// logs instead of letting emptied columns stay empty.
struct SolverConfig {
    double lambda = 0.0;
    double theta = 1.0;
    int max_iter = 100;
    double w_tol = 0.0;
    std::uint64_t seed = 0;
    bool support_floor = false;
    bool trace_objective = false;
};

struct SolverResult {
    Coupling coupling;
    double rate_nats = 0.0;
    double gromov_distortion = 0.0;
    double classical_distortion = 0.0;  // 0 when theta == 1
    double fused_distortion = 0.0;      // theta*gromov + (1-theta)*classical
    int iterations_run = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // rate + lambda*fused per iteration, when traced
};

/// r_j = sum_i w[i][j] p_i, accumulated row by row. The solver assigns its
/// marginal from this exact routine, so stored and recomputed marginals agree
/// bitwise.
std::vector<double> column_marginal(const Matrix& w, const std::vector<double>& p);

/// I(X;Y) = sum_ij p_i w_ij (ln w_ij - ln r_j) in nats, with r recomputed from
/// w and p (the stored r is not trusted). 0*ln 0 terms are skipped; the result
/// is clamped to [0, inf) after a -1e-10 sanity check.
double mutual_information(const Coupling& coupling, const std::vector<double>& p);

/// Same sum evaluated against a caller-supplied marginal.
double mutual_information_with_marginal(const Matrix& w, const std::vector<double>& r,
                                        const std::vector<double>& p);

/// One mirror-descent update: per-row softmax over logits
///   ln r_j + 4*lambda*theta*[E W dy]_ij - 2*lambda*theta*[(dy∘dy)(W^T p)]_j
///   - lambda*(1-theta)*d_cross_ij,      E_ij = dx_ij p_j,
/// evaluated in log domain (row max subtracted), followed by the marginal
/// update r <- W^T p. `d_cross` may be null only when theta == 1. Throws
/// NumericalFailure if a row's logits are no longer finite.
Coupling amd_step(const Coupling& state, const Matrix& dx, const Matrix& dy,
                  const std::vector<double>& p, const Matrix* d_cross,
                  const SolverConfig& config);

/// Full solve from the uniform initialization W = 1/N, r = 1/N: up to
/// max_iter steps, optional early stop, then rate and distortion reporting.
SolverResult solve(const DiscreteSource& source, const MetricSpace& y_space,
                   const SolverConfig& config, const Matrix* d_cross = nullptr);

/// Blahut–Arimoto baseline for the classical RD problem: w_ij ∝ r_j
/// exp(-lambda d_ij). Kept as a separate code path so the theta = 0
/// degeneration of amd_step can be tested against it. `y_dist_q` is used only
/// to report the Gromov distortion of the final coupling as a diagnostic.
SolverResult ba_solve(const DiscreteSource& source, const Matrix& y_dist_q,
                      const Matrix& d_cross, double lambda, int max_iter = 100);

}  // namespace rdd
