#pragma once

#include <string>
#include <vector>

#include "rdd/solver.hpp"
#include "rdd/types.hpp"

namespace rdd {

/// One solved grid point. `distortion` is the constraint-side value: the
/// Gromov total when theta = 1, the fused mix when theta < 1 (which reduces
/// to the classical expectation at theta = 0).
struct CurvePoint {
    double lambda = 0.0;
    double theta = 1.0;
    double distortion = 0.0;
    double rate_nats = 0.0;
    double rate_bits = 0.0;
    int iterations_run = 0;
    bool converged = false;
};

/// Grid description: an arithmetic lambda sequence crossed with a list of
/// theta values. `solver` is the per-point config template; its lambda and
/// theta are overwritten by the grid values.
struct SweepPlan {
    double lambda_start = 0.0;
    double lambda_end = 50.0;
    int lambda_count = 100;
    std::vector<double> theta_values = {1.0};
    SolverConfig solver;
};

/// The arithmetic sequence start + k*(end-start)/(count-1), k = 0..count-1;
/// count = 1 yields [start].
std::vector<double> lambda_grid(const SweepPlan& plan);

/// A grid point whose solve threw a numerical failure. The point is also
/// present in `points` with NaN value fields.
struct FailedPoint {
    std::size_t index = 0;
    double lambda = 0.0;
    double theta = 1.0;
    std::string message;
};

struct SweepOptions {
    int jobs = 1;                 // <= 0 selects hardware concurrency
    bool keep_couplings = false;  // retain each point's coupling (audit, dumps)
};

struct SweepResult {
    std::vector<CurvePoint> points;
    std::vector<Coupling> couplings;  // parallel to points when kept; else empty
    std::vector<FailedPoint> failures;
};

/// One rate–distortion curve: a single theta, one solve per lambda, each from
/// uniform initialization (no warm starting), ordered by lambda ascending.
/// Numerical failures are recorded per point, never fatal.
SweepResult trace_curve(const DiscreteSource& source, const MetricSpace& y_space,
                        const SweepPlan& plan, const Matrix* d_cross = nullptr,
                        const SweepOptions& options = {});

/// Full (theta, lambda) product, ordered by (theta, lambda). d_cross is
/// required whenever any theta < 1 appears in the plan.
SweepResult trace_surface(const DiscreteSource& source, const MetricSpace& y_space,
                          const SweepPlan& plan, const Matrix* d_cross,
                          const SweepOptions& options = {});

/// Presentation post-pass: the lower monotone envelope of a point cloud in the
/// (distortion, rate) plane. Points are ordered by distortion ascending and a
/// point is kept only when its rate is strictly below every rate already kept,
/// so the result is a staircase of Pareto-minimal points (kept points carry
/// their original lambda/theta). Points with NaN fields are dropped. The raw
/// curve is the scientific record; the envelope exists for plotting, because
/// the per-lambda solves carry no optimality guarantee and can land on
/// dominated fixed points.
std::vector<CurvePoint> monotone_envelope(const std::vector<CurvePoint>& points);

}  // namespace rdd
