// Command-line front end: curve/surface sweeps, the D_max threshold, and a
// built-in self check. Runs are described by a strict JSON config document;
// flags override individual fields. Exit codes: 0 success, 1 config or usage
// error, 2 partial numerical failure during a sweep, 3 self-check failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rdd/config.hpp"
#include "rdd/distortion.hpp"
#include "rdd/kernels.hpp"
#include "rdd/log.hpp"
#include "rdd/output.hpp"
#include "rdd/solver.hpp"
#include "rdd/spaces.hpp"
#include "rdd/sweep.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    double lambda_start = 0.0;
    double lambda_end = 0.0;
    int lambda_count = 0;
    std::vector<double> thetas;
    int max_iter = 0;
    double w_tol = 0.0;
    long long seed = 0;
    bool support_floor = false;
    std::string output_path;
    std::string format;
    bool emit_coupling = false;
    bool audit = false;
    int jobs = 0;
    double q = 0.0;
    int point_cap = 0;
    int restarts = 16;

    CLI::Option* o_lambda_start = nullptr;
    CLI::Option* o_lambda_end = nullptr;
    CLI::Option* o_lambda_count = nullptr;
    CLI::Option* o_theta = nullptr;
    CLI::Option* o_max_iter = nullptr;
    CLI::Option* o_w_tol = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_support_floor = nullptr;
    CLI::Option* o_output = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_emit_coupling = nullptr;
    CLI::Option* o_audit = nullptr;
    CLI::Option* o_q = nullptr;
    CLI::Option* o_point_cap = nullptr;
};

void add_config_flag(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("-c,--config", opts.config_path, "JSON config document")
        ->required()
        ->check(CLI::ExistingFile);
}

void add_solver_flags(CLI::App* sub, CommonOpts& opts) {
    opts.o_max_iter = sub->add_option("--max-iter", opts.max_iter, "iterations per solve");
    opts.o_w_tol = sub->add_option("--w-tol", opts.w_tol, "early-stop threshold on max|dW|");
    opts.o_seed = sub->add_option("--seed", opts.seed, "seed for randomized components");
    opts.o_support_floor =
        sub->add_flag("--support-floor", opts.support_floor, "floor the marginal at 1e-300");
    opts.o_q = sub->add_option("--q", opts.q, "distance exponent");
    opts.o_point_cap = sub->add_option("--point-cap", opts.point_cap, "max points per space");
}

void add_sweep_flags(CLI::App* sub, CommonOpts& opts, bool multi_theta) {
    opts.o_lambda_start = sub->add_option("--lambda-start", opts.lambda_start, "first lambda");
    opts.o_lambda_end = sub->add_option("--lambda-end", opts.lambda_end, "last lambda");
    opts.o_lambda_count = sub->add_option("--lambda-count", opts.lambda_count, "grid size");
    opts.o_theta = multi_theta
                       ? sub->add_option("--theta", opts.thetas, "theta grid values")
                       : sub->add_option("--theta", opts.thetas, "mixing weight")->expected(1);
    opts.o_output = sub->add_option("-o,--output", opts.output_path, "output file (default stdout)");
    opts.o_format = sub->add_option("--format", opts.format, "csv or json")
                        ->check(CLI::IsMember({"csv", "json"}));
    opts.o_emit_coupling = sub->add_flag("--emit-coupling", opts.emit_coupling,
                                         "dump each point's coupling matrix");
    opts.o_audit =
        sub->add_flag("--audit", opts.audit, "recompute distortions from stored couplings");
    sub->add_option("--jobs", opts.jobs, "parallel solves (0 = hardware)");
}

void apply_overrides(const CommonOpts& opts, rdd::RunConfig& config) {
    auto set_count = [](CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (set_count(opts.o_lambda_start)) config.sweep.lambda_start = opts.lambda_start;
    if (set_count(opts.o_lambda_end)) config.sweep.lambda_end = opts.lambda_end;
    if (set_count(opts.o_lambda_count)) config.sweep.lambda_count = opts.lambda_count;
    if (set_count(opts.o_theta)) {
        for (double t : opts.thetas)
            if (!(t >= 0.0 && t <= 1.0))
                throw rdd::ConfigError("--theta: values must lie in [0,1]");
        config.sweep.theta_values = opts.thetas;
    }
    if (set_count(opts.o_max_iter)) {
        if (opts.max_iter < 1) throw rdd::ConfigError("--max-iter: must be >= 1");
        config.sweep.solver.max_iter = opts.max_iter;
    }
    if (set_count(opts.o_w_tol)) {
        if (!(opts.w_tol >= 0.0)) throw rdd::ConfigError("--w-tol: must be >= 0");
        config.sweep.solver.w_tol = opts.w_tol;
    }
    if (set_count(opts.o_seed))
        config.sweep.solver.seed = static_cast<std::uint64_t>(opts.seed);
    if (set_count(opts.o_support_floor)) config.sweep.solver.support_floor = true;
    if (set_count(opts.o_output)) config.output.path = opts.output_path;
    if (set_count(opts.o_format))
        config.output.format = opts.format == "json" ? rdd::OutputSpec::Format::json
                                                     : rdd::OutputSpec::Format::csv;
    if (set_count(opts.o_emit_coupling)) config.output.emit_coupling = true;
    if (set_count(opts.o_audit)) config.output.audit = true;
    if (set_count(opts.o_q)) {
        if (!(opts.q >= 1.0)) throw rdd::ConfigError("--q: must be >= 1");
        config.q = opts.q;
    }
    if (set_count(opts.o_point_cap)) {
        if (opts.point_cap < 1) throw rdd::ConfigError("--point-cap: must be >= 1");
        config.point_cap = static_cast<std::size_t>(opts.point_cap);
    }
}

// Assembled problem data shared by the sweep-driving commands.
struct Problem {
    rdd::DiscreteSource source;
    rdd::MetricSpace y_space;
    rdd::Matrix d_cross;
    bool has_cross = false;
};

Problem build_problem(const rdd::RunConfig& config, bool need_cross) {
    Problem problem;
    problem.source = rdd::make_source(config.source, config.q, config.point_cap);
    problem.y_space = rdd::make_space(config.y_space, config.q, config.point_cap);
    if (need_cross) {
        problem.d_cross =
            rdd::cross_distance_matrix(problem.source.space, problem.y_space);
        problem.has_cross = true;
    }
    return problem;
}

int write_sweep_output(const rdd::RunConfig& config, const rdd::SweepResult& result) {
    const auto emit = [&](std::ostream& out) {
        if (config.output.format == rdd::OutputSpec::Format::csv)
            rdd::write_points_csv(out, result.points);
        else
            rdd::write_points_json(out, result.points, config);
    };
    const bool to_stdout = config.output.path.empty() || config.output.path == "-";
    if (to_stdout) {
        emit(std::cout);
    } else {
        std::ofstream out(config.output.path);
        if (!out) {
            std::cerr << "error: cannot write " << config.output.path << "\n";
            return 1;
        }
        emit(out);
    }

    if (config.output.emit_coupling) {
        const std::string coupling_stem = to_stdout ? std::string() : config.output.path;
        for (std::size_t k = 0; k < result.points.size(); ++k) {
            const rdd::Coupling& coupling = result.couplings[k];
            if (coupling.w.empty()) {
                rdd::log::warn("skipping coupling dump for failed point " + std::to_string(k));
                continue;
            }
            const std::string path = rdd::coupling_path(coupling_stem, k);
            std::ofstream out(path);
            if (!out) {
                std::cerr << "error: cannot write " << path << "\n";
                return 1;
            }
            rdd::write_coupling_csv(out, coupling);
        }
    }
    return 0;
}

// Recomputes each point's distortion from its retained coupling; returns the
// number of mismatches beyond 1e-10.
int audit_sweep(const Problem& problem, const rdd::SweepResult& result) {
    int mismatches = 0;
    for (std::size_t k = 0; k < result.points.size(); ++k) {
        const rdd::CurvePoint& point = result.points[k];
        const rdd::Coupling& coupling = result.couplings[k];
        if (coupling.w.empty()) continue;  // failed point, nothing to audit
        const double recomputed = rdd::fused_distortion(
            problem.source.space.dist_q, problem.y_space.dist_q,
            problem.has_cross ? &problem.d_cross : nullptr, coupling, problem.source.pmf,
            point.theta);
        const double tol = 1e-10 * std::fmax(1.0, std::fabs(recomputed));
        if (!(std::fabs(recomputed - point.distortion) <= tol)) {
            std::cerr << "audit: point " << k << " distortion " << point.distortion
                      << " != recomputed " << recomputed << "\n";
            ++mismatches;
        }
    }
    return mismatches;
}

int run_sweep_command(const rdd::RunConfig& config, int jobs, bool surface) {
    const bool any_fused =
        std::any_of(config.sweep.theta_values.begin(), config.sweep.theta_values.end(),
                    [](double t) { return t < 1.0; });
    const Problem problem = build_problem(config, any_fused);

    rdd::SweepOptions options;
    options.jobs = jobs;
    options.keep_couplings = config.output.emit_coupling || config.output.audit;

    const rdd::Matrix* d_cross = problem.has_cross ? &problem.d_cross : nullptr;
    const rdd::SweepResult result =
        surface ? rdd::trace_surface(problem.source, problem.y_space, config.sweep, d_cross,
                                     options)
                : rdd::trace_curve(problem.source, problem.y_space, config.sweep, d_cross,
                                   options);

    const int write_status = write_sweep_output(config, result);
    if (write_status != 0) return write_status;

    if (!result.failures.empty()) {
        std::cerr << result.failures.size() << " of " << result.points.size()
                  << " points failed numerically:\n";
        for (const rdd::FailedPoint& failure : result.failures)
            std::cerr << "  lambda=" << failure.lambda << " theta=" << failure.theta << ": "
                      << failure.message << "\n";
    }
    if (config.output.audit && audit_sweep(problem, result) > 0) return 3;
    return result.failures.empty() ? 0 : 2;
}

int run_dmax(const rdd::RunConfig& config, int restarts) {
    const Problem problem = build_problem(config, /*need_cross=*/false);
    const rdd::DmaxResult result =
        rdd::compute_dmax(problem.source.space.dist_q, problem.y_space.dist_q,
                          problem.source.pmf, restarts, config.sweep.solver.seed);

    std::cout << "d_max = " << rdd::format_double(result.value) << "\n";
    std::cout << "r =";
    for (double v : result.r) std::cout << ' ' << rdd::format_double(v);
    std::cout << "\n";
    std::cout << "restarts = " << result.restart_values.size()
              << ", iterations per restart = " << result.iterations_per_restart << "\n";
    std::cout << "restart values =";
    for (double v : result.restart_values) std::cout << ' ' << rdd::format_double(v);
    std::cout << "\n";
    return 0;
}

int run_check(const rdd::RunConfig& config) {
    // The BA consistency check needs the cross-distance matrix, which only
    // exists for matching dimensions.
    Problem problem = build_problem(config, /*need_cross=*/false);
    if (problem.source.space.dim == problem.y_space.dim) {
        problem.d_cross = rdd::cross_distance_matrix(problem.source.space, problem.y_space);
        problem.has_cross = true;
    }

    rdd::validate(problem.source);
    rdd::validate(problem.y_space);

    const std::size_t m = problem.source.space.size();
    const std::size_t n = problem.y_space.size();
    int failures = 0;

    if (m * n <= rdd::kBruteForceCap) {
        // Decomposition vs quartic oracle on a handful of random couplings.
        std::mt19937_64 rng(config.sweep.solver.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            rdd::Coupling coupling;
            coupling.w = rdd::Matrix(m, n);
            for (std::size_t i = 0; i < m; ++i) {
                double row_sum = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    coupling.w(i, j) = unit(rng) + 1e-3;
                    row_sum += coupling.w(i, j);
                }
                for (std::size_t j = 0; j < n; ++j) coupling.w(i, j) /= row_sum;
            }
            coupling.r = rdd::column_marginal(coupling.w, problem.source.pmf);

            const double brute = rdd::gromov_distortion_bruteforce(
                problem.source.space.dist_q, problem.y_space.dist_q, coupling,
                problem.source.pmf);
            const double decomposed =
                rdd::gromov_distortion_decomposed(problem.source.space.dist_q,
                                                  problem.y_space.dist_q, coupling,
                                                  problem.source.pmf)
                    .total;
            const double tol = 1e-10 * std::fmax(1.0, std::fabs(brute));
            if (std::fabs(brute - decomposed) <= tol) {
                std::cout << "check: decomposition trial " << trial << " ok\n";
            } else {
                std::cout << "check: decomposition trial " << trial << " MISMATCH brute="
                          << rdd::format_double(brute)
                          << " decomposed=" << rdd::format_double(decomposed) << "\n";
                ++failures;
            }
        }
    } else {
        std::cout << "check: instance exceeds the brute-force cap (" << m * n << " > "
                  << rdd::kBruteForceCap << "), oracle portion skipped\n";
    }

    if (problem.has_cross) {
        // theta = 0 solve must agree with the independent BA implementation.
        rdd::SolverConfig solver = config.sweep.solver;
        solver.theta = 0.0;
        solver.lambda = 0.5 * (config.sweep.lambda_start + config.sweep.lambda_end);
        solver.w_tol = 0.0;
        const rdd::SolverResult amd =
            rdd::solve(problem.source, problem.y_space, solver, &problem.d_cross);
        const rdd::SolverResult ba = rdd::ba_solve(problem.source, problem.y_space.dist_q,
                                                   problem.d_cross, solver.lambda,
                                                   solver.max_iter);
        const bool rate_ok = std::fabs(amd.rate_nats - ba.rate_nats) <= 1e-8;
        const bool dist_ok =
            std::fabs(amd.classical_distortion - ba.classical_distortion) <= 1e-8;
        if (rate_ok && dist_ok) {
            std::cout << "check: theta=0 matches the BA baseline at lambda = "
                      << rdd::format_double(solver.lambda) << "\n";
        } else {
            std::cout << "check: theta=0 vs BA MISMATCH rate " << rdd::format_double(amd.rate_nats)
                      << " vs " << rdd::format_double(ba.rate_nats) << ", distortion "
                      << rdd::format_double(amd.classical_distortion) << " vs "
                      << rdd::format_double(ba.classical_distortion) << "\n";
            ++failures;
        }
    } else {
        std::cout << "check: source and reproduction dimensions differ, BA portion skipped\n";
    }

    if (failures > 0) {
        std::cout << "check: " << failures << " check(s) FAILED\n";
        return 3;
    }
    std::cout << "check: all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rate distortion-in-distortion solver"};
    app.require_subcommand(1);

    CLI::App* curve = app.add_subcommand("curve", "trace a rate-distortion curve over lambda");
    CommonOpts curve_opts;
    add_config_flag(curve, curve_opts);
    add_sweep_flags(curve, curve_opts, /*multi_theta=*/false);
    add_solver_flags(curve, curve_opts);

    CLI::App* surface =
        app.add_subcommand("surface", "trace an R(D;theta) surface over (lambda, theta)");
    CommonOpts surface_opts;
    add_config_flag(surface, surface_opts);
    add_sweep_flags(surface, surface_opts, /*multi_theta=*/true);
    add_solver_flags(surface, surface_opts);

    CLI::App* dmax = app.add_subcommand("dmax", "compute the zero-rate distortion threshold");
    CommonOpts dmax_opts;
    add_config_flag(dmax, dmax_opts);
    add_solver_flags(dmax, dmax_opts);
    dmax->add_option("--restarts", dmax_opts.restarts, "mirror-descent restarts")
        ->check(CLI::PositiveNumber);

    CLI::App* check = app.add_subcommand("check", "run built-in consistency checks");
    CommonOpts check_opts;
    add_config_flag(check, check_opts);
    add_solver_flags(check, check_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        CommonOpts* opts = nullptr;
        if (curve->parsed()) opts = &curve_opts;
        else if (surface->parsed()) opts = &surface_opts;
        else if (dmax->parsed()) opts = &dmax_opts;
        else opts = &check_opts;

        rdd::RunConfig config = rdd::load_config_file(opts->config_path);
        apply_overrides(*opts, config);

        if (curve->parsed()) return run_sweep_command(config, opts->jobs, /*surface=*/false);
        if (surface->parsed()) return run_sweep_command(config, opts->jobs, /*surface=*/true);
        if (dmax->parsed()) return run_dmax(config, opts->restarts);
        return run_check(config);
    } catch (const rdd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
