#include "rdd/spaces.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rdd {

namespace {

double sq_distance(const double* a, const double* b, std::size_t dim) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        const double diff = a[c] - b[c];
        d2 += diff * diff;
    }
    return d2;
}

double pow_q_of_sq(double d2, double q) {
    if (q == 2.0) return d2;
    if (q == 1.0) return std::sqrt(d2);
    return std::pow(d2, q * 0.5);
}

// Fills dist_q from the stored coordinates. Upper triangle is computed and
// mirrored so the matrix is exactly symmetric with an exactly zero diagonal.
void fill_distances(MetricSpace& space) {
    const std::size_t m = space.size();
    space.dist_q = Matrix(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double v =
                pow_q_of_sq(sq_distance(space.point(i), space.point(j), space.dim), space.q);
            space.dist_q(i, j) = v;
            space.dist_q(j, i) = v;
        }
    }
}

void require_q(double q) {
    if (!(q >= 1.0))
        throw std::invalid_argument("distance exponent q must be >= 1, got " + std::to_string(q));
}

}  // namespace

MetricSpace build_uniform_grid(double h, int k_per_axis, int dim, double q,
                               std::size_t point_cap) {
    if (!(h > 0.0))
        throw std::invalid_argument("grid half-width h must be > 0");
    if (k_per_axis < 1)
        throw std::invalid_argument("grid needs at least one coordinate per axis");
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    require_q(q);

    std::size_t count = 1;
    for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(k_per_axis);
    if (count > point_cap)
        throw std::invalid_argument("grid would contain " + std::to_string(count) +
                                    " points, above the cap of " + std::to_string(point_cap));

    const std::size_t k = static_cast<std::size_t>(k_per_axis);
    const double delta = 2.0 * h / static_cast<double>(k);
    std::vector<double> axis(k);
    for (std::size_t i = 0; i < k; ++i)
        axis[i] = -h + 0.5 * delta + static_cast<double>(i) * delta;

    MetricSpace space;
    space.dim = static_cast<std::size_t>(dim);
    space.q = q;
    space.coords.resize(count * space.dim);
    // dim-fold Cartesian product, first coordinate slowest
    for (std::size_t p = 0; p < count; ++p) {
        std::size_t rest = p;
        for (int d = dim - 1; d >= 0; --d) {
            space.coords[p * space.dim + static_cast<std::size_t>(d)] = axis[rest % k];
            rest /= k;
        }
    }
    fill_distances(space);
    return space;
}

MetricSpace build_circle(int n, double radius, double q) {
    if (n < 2) throw std::invalid_argument("circle needs at least 2 points");
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be > 0");
    require_q(q);

    MetricSpace space;
    space.dim = 2;
    space.q = q;
    space.coords.resize(static_cast<std::size_t>(n) * 2);
    for (int i = 0; i < n; ++i) {
        const double angle = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        space.coords[2 * static_cast<std::size_t>(i)] = radius * std::cos(angle);
        space.coords[2 * static_cast<std::size_t>(i) + 1] = radius * std::sin(angle);
    }
    fill_distances(space);
    return space;
}

MetricSpace build_sphere(int n_per_axis, double radius, double q) {
    if (n_per_axis < 2) throw std::invalid_argument("sphere needs at least 2 points per axis");
    if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
    require_q(q);

    const std::size_t n = static_cast<std::size_t>(n_per_axis);
    MetricSpace space;
    space.dim = 3;
    space.q = q;
    space.coords.resize(n * n * 3);
    std::size_t p = 0;
    for (std::size_t b = 0; b < n; ++b) {
        const double colat = M_PI * (static_cast<double>(b) + 0.5) / static_cast<double>(n);
        const double z = radius * std::cos(colat);
        const double ring = radius * std::sin(colat);
        for (std::size_t a = 0; a < n; ++a) {
            const double lon = 2.0 * M_PI * static_cast<double>(a) / static_cast<double>(n);
            space.coords[p * 3] = ring * std::cos(lon);
            space.coords[p * 3 + 1] = ring * std::sin(lon);
            space.coords[p * 3 + 2] = z;
            ++p;
        }
    }
    fill_distances(space);
    return space;
}

DiscreteSource source_pmf(const MetricSpace& space, const SourceFamily& family) {
    const std::size_t m = space.size();
    if (m == 0) throw std::invalid_argument("source_pmf: empty metric space");
    if (family.family != Family::uniform && !(family.sigma > 0.0))
        throw std::invalid_argument("source scale sigma must be > 0");

    std::vector<double> log_mass(m, 0.0);
    if (family.family == Family::gaussian) {
        const double inv = 1.0 / (2.0 * family.sigma * family.sigma);
        for (std::size_t i = 0; i < m; ++i) {
            const double* x = space.point(i);
            double sq = 0.0;
            for (std::size_t c = 0; c < space.dim; ++c) sq += x[c] * x[c];
            log_mass[i] = -sq * inv;
        }
    } else if (family.family == Family::laplacian) {
        const double inv = 1.0 / family.sigma;
        for (std::size_t i = 0; i < m; ++i) {
            const double* x = space.point(i);
            double l1 = 0.0;
            for (std::size_t c = 0; c < space.dim; ++c) l1 += std::fabs(x[c]);
            log_mass[i] = -l1 * inv;
        }
    }
    // uniform: log mass stays zero everywhere

    double shift = -std::numeric_limits<double>::infinity();
    for (double v : log_mass)
        if (v > shift) shift = v;
    if (!std::isfinite(shift))
        throw std::runtime_error("source_pmf: degenerate source, all densities vanished");

    DiscreteSource source;
    source.space = space;
    source.pmf.resize(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        source.pmf[i] = std::exp(log_mass[i] - shift);
        total += source.pmf[i];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::runtime_error("source_pmf: degenerate source, unnormalized mass is zero");
    const double inv_total = 1.0 / total;
    for (double& v : source.pmf) v *= inv_total;
    return source;
}

Matrix cross_distance_matrix(const MetricSpace& x_space, const MetricSpace& y_space) {
    if (x_space.dim != y_space.dim)
        throw std::invalid_argument("cross_distance_matrix: dimension mismatch (" +
                                    std::to_string(x_space.dim) + " vs " +
                                    std::to_string(y_space.dim) + ")");
    const std::size_t m = x_space.size();
    const std::size_t n = y_space.size();
    Matrix d(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d(i, j) = sq_distance(x_space.point(i), y_space.point(j), x_space.dim);
    return d;
}

}  // namespace rdd
