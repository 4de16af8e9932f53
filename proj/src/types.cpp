#include "rdd/types.hpp"

#include <cmath>
#include <string>

namespace rdd {

namespace {

std::string at(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

void validate(const MetricSpace& space) {
    const std::size_t m = space.size();
    if (space.dim == 0) throw std::invalid_argument("metric space: dim must be positive");
    if (m == 0) throw std::invalid_argument("metric space: no points");
    if (space.coords.size() != m * space.dim)
        throw std::invalid_argument("metric space: coordinate buffer size mismatch");
    if (!(space.q >= 1.0)) throw std::invalid_argument("metric space: q must be >= 1");
    if (space.dist_q.rows() != m || space.dist_q.cols() != m)
        throw std::invalid_argument("metric space: dist_q must be " + std::to_string(m) + "x" +
                                    std::to_string(m));
    for (std::size_t i = 0; i < m; ++i) {
        if (space.dist_q(i, i) != 0.0)
            throw std::invalid_argument("metric space: nonzero diagonal at " + at(i, i));
        for (std::size_t j = i + 1; j < m; ++j) {
            const double v = space.dist_q(i, j);
            if (!(v >= 0.0))
                throw std::invalid_argument("metric space: negative or NaN entry at " + at(i, j));
            if (v != space.dist_q(j, i))
                throw std::invalid_argument("metric space: asymmetric at " + at(i, j));
            // recompute from coordinates: entries must be the q-th power of the
            // L2 distance within 1e-12 relative
            double d2 = 0.0;
            for (std::size_t c = 0; c < space.dim; ++c) {
                const double diff = space.coords[i * space.dim + c] - space.coords[j * space.dim + c];
                d2 += diff * diff;
            }
            const double expect =
                space.q == 2.0 ? d2 : (space.q == 1.0 ? std::sqrt(d2) : std::pow(d2, space.q * 0.5));
            if (std::fabs(v - expect) > 1e-12 * std::fmax(1.0, std::fabs(expect)))
                throw std::invalid_argument("metric space: entry at " + at(i, j) +
                                            " disagrees with recomputed distance");
        }
    }
}

void validate(const DiscreteSource& source) {
    validate(source.space);
    if (source.pmf.size() != source.space.size())
        throw std::invalid_argument("source: pmf length does not match point count");
    double sum = 0.0;
    for (std::size_t i = 0; i < source.pmf.size(); ++i) {
        if (!(source.pmf[i] >= 0.0))
            throw std::invalid_argument("source: negative or NaN pmf entry at index " +
                                        std::to_string(i));
        sum += source.pmf[i];
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("source: pmf sums to " + std::to_string(sum) + ", not 1");
}

void validate(const Coupling& coupling, const std::vector<double>& p) {
    const std::size_t m = coupling.w.rows();
    const std::size_t n = coupling.w.cols();
    if (m == 0 || n == 0) throw std::invalid_argument("coupling: empty matrix");
    if (coupling.r.size() != n)
        throw std::invalid_argument("coupling: r length does not match column count");
    if (p.size() != m)
        throw std::invalid_argument("coupling: p length does not match row count");
    for (std::size_t i = 0; i < m; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = coupling.w(i, j);
            if (!(v >= 0.0))
                throw std::invalid_argument("coupling: negative or NaN entry at " + at(i, j));
            row_sum += v;
        }
        if (std::fabs(row_sum - 1.0) > 1e-10)
            throw std::invalid_argument("coupling: row " + std::to_string(i) + " sums to " +
                                        std::to_string(row_sum) + ", not 1");
    }
    double r_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(coupling.r[j] >= 0.0))
            throw std::invalid_argument("coupling: negative or NaN marginal at index " +
                                        std::to_string(j));
        r_sum += coupling.r[j];
    }
    if (std::fabs(r_sum - 1.0) > 1e-10)
        throw std::invalid_argument("coupling: marginal sums to " + std::to_string(r_sum) +
                                    ", not 1");
}

}  // namespace rdd
