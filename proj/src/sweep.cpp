#include "rdd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rdd/log.hpp"

namespace rdd {

namespace {

void check_plan(const SweepPlan& plan) {
    if (plan.lambda_count < 1)
        throw std::invalid_argument("sweep: lambda_count must be >= 1");
    if (!(plan.lambda_start >= 0.0))
        throw std::invalid_argument("sweep: lambda_start must be >= 0");
    if (!(plan.lambda_end > plan.lambda_start))
        throw std::invalid_argument("sweep: lambda_end must exceed lambda_start");
    if (plan.theta_values.empty())
        throw std::invalid_argument("sweep: theta_values must be nonempty");
    for (double t : plan.theta_values)
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("sweep: theta values must lie in [0,1]");
}

SweepResult run_grid(const DiscreteSource& source, const MetricSpace& y_space,
                     const SweepPlan& plan, const std::vector<double>& thetas,
                     const Matrix* d_cross, const SweepOptions& options) {
    const std::vector<double> lambdas = lambda_grid(plan);
    const std::size_t total = thetas.size() * lambdas.size();

    SweepResult result;
    result.points.resize(total);
    if (options.keep_couplings) result.couplings.resize(total);

    std::atomic<std::size_t> cursor{0};
    std::mutex failure_mutex;
    std::exception_ptr fatal = nullptr;

    auto worker = [&]() {
        for (;;) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= total) return;
            const double theta = thetas[k / lambdas.size()];
            const double lambda = lambdas[k % lambdas.size()];

            CurvePoint& point = result.points[k];
            point.lambda = lambda;
            point.theta = theta;

            SolverConfig config = plan.solver;
            config.lambda = lambda;
            config.theta = theta;
            try {
                SolverResult solved = solve(source, y_space, config, d_cross);
                point.distortion = solved.fused_distortion;
                point.rate_nats = solved.rate_nats;
                point.rate_bits = solved.rate_nats / M_LN2;
                point.iterations_run = solved.iterations_run;
                point.converged = solved.converged;
                if (options.keep_couplings) result.couplings[k] = std::move(solved.coupling);
            } catch (const NumericalFailure& failure) {
                point.distortion = std::numeric_limits<double>::quiet_NaN();
                point.rate_nats = std::numeric_limits<double>::quiet_NaN();
                point.rate_bits = std::numeric_limits<double>::quiet_NaN();
                point.iterations_run = 0;
                point.converged = false;
                std::lock_guard<std::mutex> lock(failure_mutex);
                result.failures.push_back({k, lambda, theta, failure.what()});
                log::warn(std::string("sweep: point failed: ") + failure.what());
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };

    int jobs = options.jobs;
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), total));

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    std::sort(result.failures.begin(), result.failures.end(),
              [](const FailedPoint& a, const FailedPoint& b) { return a.index < b.index; });
    return result;
}

}  // namespace

std::vector<double> lambda_grid(const SweepPlan& plan) {
    check_plan(plan);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(plan.lambda_count));
    if (plan.lambda_count == 1) {
        grid.push_back(plan.lambda_start);
        return grid;
    }
    const double step =
        (plan.lambda_end - plan.lambda_start) / static_cast<double>(plan.lambda_count - 1);
    for (int k = 0; k < plan.lambda_count; ++k)
        grid.push_back(plan.lambda_start + static_cast<double>(k) * step);
    return grid;
}

SweepResult trace_curve(const DiscreteSource& source, const MetricSpace& y_space,
                        const SweepPlan& plan, const Matrix* d_cross,
                        const SweepOptions& options) {
    check_plan(plan);
    if (plan.theta_values.size() != 1)
        throw std::invalid_argument("trace_curve: plan must carry exactly one theta");
    if (plan.theta_values[0] < 1.0 && d_cross == nullptr)
        throw std::invalid_argument("trace_curve: d_cross required when theta < 1");
    return run_grid(source, y_space, plan, plan.theta_values, d_cross, options);
}

SweepResult trace_surface(const DiscreteSource& source, const MetricSpace& y_space,
                          const SweepPlan& plan, const Matrix* d_cross,
                          const SweepOptions& options) {
    check_plan(plan);
    std::vector<double> thetas = plan.theta_values;
    std::stable_sort(thetas.begin(), thetas.end());
    if (thetas.front() < 1.0 && d_cross == nullptr)
        throw std::invalid_argument("trace_surface: d_cross required when any theta < 1");
    return run_grid(source, y_space, plan, thetas, d_cross, options);
}

std::vector<CurvePoint> monotone_envelope(const std::vector<CurvePoint>& points) {
    std::vector<CurvePoint> sorted;
    sorted.reserve(points.size());
    for (const CurvePoint& point : points)
        if (std::isfinite(point.distortion) && std::isfinite(point.rate_nats))
            sorted.push_back(point);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CurvePoint& a, const CurvePoint& b) {
                         if (a.distortion != b.distortion) return a.distortion < b.distortion;
                         return a.rate_nats < b.rate_nats;
                     });
    std::vector<CurvePoint> envelope;
    for (const CurvePoint& point : sorted)
        if (envelope.empty() || point.rate_nats < envelope.back().rate_nats)
            envelope.push_back(point);
    return envelope;
}

}  // namespace rdd
