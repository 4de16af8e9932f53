#include "rdd/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rdd/distortion.hpp"
#include "rdd/kernels.hpp"
#include "neumaier.hpp"

namespace rdd {

namespace {

void check_config(const SolverConfig& config) {
    if (!(config.lambda >= 0.0))
        throw std::invalid_argument("solver: lambda must be >= 0");
    if (!(config.theta >= 0.0 && config.theta <= 1.0))
        throw std::invalid_argument("solver: theta must lie in [0,1]");
    if (config.max_iter < 1)
        throw std::invalid_argument("solver: max_iter must be >= 1");
    if (!(config.w_tol >= 0.0))
        throw std::invalid_argument("solver: w_tol must be >= 0");
}

void check_problem_shapes(const Matrix& dx, const Matrix& dy, const std::vector<double>& p,
                          const Matrix* d_cross, double theta) {
    const std::size_t m = dx.rows();
    const std::size_t n = dy.rows();
    if (dx.cols() != m) throw std::invalid_argument("solver: dx must be square");
    if (dy.cols() != n) throw std::invalid_argument("solver: dy must be square");
    if (p.size() != m) throw std::invalid_argument("solver: p length must equal M");
    if (theta < 1.0 && d_cross == nullptr)
        throw std::invalid_argument("solver: d_cross required when theta < 1");
    if (d_cross != nullptr && (d_cross->rows() != m || d_cross->cols() != n))
        throw std::invalid_argument("solver: d_cross must be MxN");
}

// Shared update engine: amd_step() runs it once, solve() iterates it. Buffers
// are allocated once and reused across iterations.
class AmdStepper {
public:
    AmdStepper(const Matrix& dx, const Matrix& dy, const std::vector<double>& p,
               const Matrix* d_cross, const SolverConfig& config)
        : dx_(dx), dy_(dy), p_(p), d_cross_(d_cross), config_(config),
          m_(dx.rows()), n_(dy.rows()),
          use_gromov_(config.lambda * config.theta != 0.0),
          use_classical_(config.theta < 1.0 && config.lambda != 0.0),
          pw_(use_gromov_ ? Matrix(m_, n_) : Matrix()),
          t1_(use_gromov_ ? Matrix(m_, n_) : Matrix()),
          t2_(use_gromov_ ? Matrix(m_, n_) : Matrix()),
          col_term_(n_, 0.0), logits_(n_, 0.0) {}

    // Computes the update of `cur` into `next` (which must already be MxN)
    // and returns max_ij |next.w - cur.w|.
    double step(const Coupling& cur, Coupling& next) {
        const double coef_f = 4.0 * config_.lambda * config_.theta;
        const double coef_h = 2.0 * config_.lambda * config_.theta;
        const double coef_g = config_.lambda * (1.0 - config_.theta);

        // column terms: ln r_j - 2λθ [(dy∘dy)(W^T p)]_j
        for (std::size_t j = 0; j < n_; ++j) {
            const double r = config_.support_floor ? std::fmax(cur.r[j], 1e-300) : cur.r[j];
            col_term_[j] = std::log(r);
        }
        if (use_gromov_) {
            const std::vector<double> wtp = column_marginal(cur.w, p_);
            for (std::size_t j = 0; j < n_; ++j)
                col_term_[j] -= coef_h * kern::sq_dot(dy_.row(j), wtp.data(), n_);
            // t2 = dx · (diag(p) W) · dy, the per-entry F exponent up to 4λθ
            for (std::size_t i = 0; i < m_; ++i) {
                const double* wr = cur.w.row(i);
                double* pr = pw_.row(i);
                for (std::size_t j = 0; j < n_; ++j) pr[j] = p_[i] * wr[j];
            }
            kern::matmul(m_, m_, n_, dx_.data(), pw_.data(), t1_.data());
            kern::matmul(m_, n_, n_, t1_.data(), dy_.data(), t2_.data());
        }

        double max_delta = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) logits_[j] = col_term_[j];
            if (use_gromov_) kern::axpy(coef_f, t2_.row(i), logits_.data(), n_);
            if (use_classical_) kern::axpy(-coef_g, d_cross_->row(i), logits_.data(), n_);

            const double mx = kern::vmax(logits_.data(), n_);
            if (std::isinf(mx) && mx > 0.0)
                throw NumericalFailure(config_.lambda,
                                       "amd_step: logit overflow in row " + std::to_string(i) +
                                       " at lambda = " + std::to_string(config_.lambda));
            double* out = next.w.row(i);
            for (std::size_t j = 0; j < n_; ++j) out[j] = std::exp(logits_[j] - mx);
            const double total = kern::vsum(out, n_);
            if (!std::isfinite(total) || !(total > 0.0))
                throw NumericalFailure(config_.lambda,
                                       "amd_step: softmax row " + std::to_string(i) +
                                       " degenerated at lambda = " +
                                       std::to_string(config_.lambda));
            kern::vscale(out, 1.0 / total, n_);

            const double* prev = cur.w.row(i);
            for (std::size_t j = 0; j < n_; ++j)
                max_delta = std::fmax(max_delta, std::fabs(out[j] - prev[j]));
        }
        next.r = column_marginal(next.w, p_);
        return max_delta;
    }

private:
    const Matrix& dx_;
    const Matrix& dy_;
    const std::vector<double>& p_;
    const Matrix* d_cross_;
    const SolverConfig& config_;
    std::size_t m_, n_;
    bool use_gromov_, use_classical_;
    Matrix pw_, t1_, t2_;
    std::vector<double> col_term_, logits_;
};

Coupling uniform_coupling(std::size_t m, std::size_t n) {
    Coupling c;
    c.w = Matrix(m, n, 1.0 / static_cast<double>(n));
    c.r.assign(n, 1.0 / static_cast<double>(n));
    return c;
}

// Final bookkeeping shared by solve() and ba_solve().
void finish_result(SolverResult& result, const Matrix& dx, const Matrix& dy,
                   const std::vector<double>& p, const Matrix* d_cross, double theta) {
    result.rate_nats = mutual_information(result.coupling, p);
    result.gromov_distortion = gromov_distortion_decomposed(dx, dy, result.coupling, p).total;
    result.classical_distortion =
        theta < 1.0 ? expected_classical_distortion(*d_cross, result.coupling, p) : 0.0;
    result.fused_distortion =
        theta * result.gromov_distortion + (1.0 - theta) * result.classical_distortion;
}

}  // namespace

std::vector<double> column_marginal(const Matrix& w, const std::vector<double>& p) {
    std::vector<double> r(w.cols(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i)
        if (p[i] != 0.0) kern::axpy(p[i], w.row(i), r.data(), w.cols());
    return r;
}

double mutual_information_with_marginal(const Matrix& w, const std::vector<double>& r,
                                        const std::vector<double>& p) {
    if (p.size() != w.rows())
        throw std::invalid_argument("mutual_information: p length must equal row count");
    if (r.size() != w.cols())
        throw std::invalid_argument("mutual_information: r length must equal column count");
    NeumaierSum acc;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        if (p[i] == 0.0) continue;
        const double* row = w.row(i);
        for (std::size_t j = 0; j < w.cols(); ++j) {
            if (row[j] == 0.0) continue;  // 0 ln 0 = 0
            if (r[j] == 0.0)
                throw std::runtime_error(
                    "mutual_information: marginal vanished in an occupied column " +
                    std::to_string(j) + " — corrupted coupling state");
            acc.add(p[i] * row[j] * (std::log(row[j]) - std::log(r[j])));
        }
    }
    const double value = acc.value();
    if (value < -1e-10)
        throw std::runtime_error("mutual_information: negative value " + std::to_string(value) +
                                 " — corrupted coupling state");
    return value < 0.0 ? 0.0 : value;
}

double mutual_information(const Coupling& coupling, const std::vector<double>& p) {
    return mutual_information_with_marginal(coupling.w, column_marginal(coupling.w, p), p);
}

Coupling amd_step(const Coupling& state, const Matrix& dx, const Matrix& dy,
                  const std::vector<double>& p, const Matrix* d_cross,
                  const SolverConfig& config) {
    check_config(config);
    check_problem_shapes(dx, dy, p, d_cross, config.theta);
    if (state.w.rows() != dx.rows() || state.w.cols() != dy.rows() ||
        state.r.size() != dy.rows())
        throw std::invalid_argument("amd_step: state shape does not match dx/dy");

    AmdStepper stepper(dx, dy, p, d_cross, config);
    Coupling next;
    next.w = Matrix(state.w.rows(), state.w.cols());
    stepper.step(state, next);
    return next;
}

SolverResult solve(const DiscreteSource& source, const MetricSpace& y_space,
                   const SolverConfig& config, const Matrix* d_cross) {
    check_config(config);
    const Matrix& dx = source.space.dist_q;
    const Matrix& dy = y_space.dist_q;
    check_problem_shapes(dx, dy, source.pmf, d_cross, config.theta);

    const std::size_t m = dx.rows();
    const std::size_t n = dy.rows();
    AmdStepper stepper(dx, dy, source.pmf, d_cross, config);

    Coupling cur = uniform_coupling(m, n);
    Coupling next;
    next.w = Matrix(m, n);
    next.r.assign(n, 0.0);

    SolverResult result;
    double last_delta = std::numeric_limits<double>::infinity();
    bool early_stop = false;
    for (int k = 0; k < config.max_iter; ++k) {
        last_delta = stepper.step(cur, next);
        std::swap(cur, next);
        ++result.iterations_run;
        if (config.trace_objective) {
            const double rate = mutual_information(cur, source.pmf);
            const double fused =
                fused_distortion(dx, dy, d_cross, cur, source.pmf, config.theta);
            result.objective_trace.push_back(rate + config.lambda * fused);
        }
        if (config.w_tol > 0.0 && last_delta <= config.w_tol) {
            early_stop = true;
            break;
        }
    }

    result.coupling = std::move(cur);
    result.converged = early_stop || last_delta <= 1e-6;
    finish_result(result, dx, dy, source.pmf, d_cross, config.theta);
    return result;
}

SolverResult ba_solve(const DiscreteSource& source, const Matrix& y_dist_q,
                      const Matrix& d_cross, double lambda, int max_iter) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("ba_solve: lambda must be >= 0");
    if (max_iter < 1) throw std::invalid_argument("ba_solve: max_iter must be >= 1");
    const std::size_t m = d_cross.rows();
    const std::size_t n = d_cross.cols();
    if (source.pmf.size() != m)
        throw std::invalid_argument("ba_solve: pmf length must equal d_cross rows");
    if (y_dist_q.rows() != n || y_dist_q.cols() != n)
        throw std::invalid_argument("ba_solve: y_dist_q must be NxN with N = d_cross cols");

    const std::vector<double>& p = source.pmf;
    Coupling cur = uniform_coupling(m, n);
    std::vector<double> logits(n), ln_r(n);

    SolverResult result;
    double last_delta = std::numeric_limits<double>::infinity();
    for (int k = 0; k < max_iter; ++k) {
        last_delta = 0.0;
        Coupling next;
        next.w = Matrix(m, n);
        for (std::size_t j = 0; j < n; ++j) ln_r[j] = std::log(cur.r[j]);
        for (std::size_t i = 0; i < m; ++i) {
            const double* d_row = d_cross.row(i);
            for (std::size_t j = 0; j < n; ++j)
                logits[j] = ln_r[j] - lambda * d_row[j];
            const double mx = kern::vmax(logits.data(), n);
            if (std::isinf(mx) && mx > 0.0)
                throw NumericalFailure(lambda, "ba_solve: logit overflow in row " +
                                                   std::to_string(i));
            double* out = next.w.row(i);
            for (std::size_t j = 0; j < n; ++j) out[j] = std::exp(logits[j] - mx);
            const double total = kern::vsum(out, n);
            if (!std::isfinite(total) || !(total > 0.0))
                throw NumericalFailure(lambda, "ba_solve: softmax row " + std::to_string(i) +
                                                   " degenerated");
            kern::vscale(out, 1.0 / total, n);
            const double* prev = cur.w.row(i);
            for (std::size_t j = 0; j < n; ++j)
                last_delta = std::fmax(last_delta, std::fabs(out[j] - prev[j]));
        }
        next.r = column_marginal(next.w, p);
        cur = std::move(next);
        ++result.iterations_run;
    }

    result.coupling = std::move(cur);
    result.converged = last_delta <= 1e-6;
    finish_result(result, source.space.dist_q, y_dist_q, p, &d_cross, /*theta=*/0.0);
    return result;
}

}  // namespace rdd
