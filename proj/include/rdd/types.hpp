#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdd {

/// Dense row-major matrix of doubles. Rows are contiguous, so kernel
/// primitives can operate on row pointers directly.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Finite point set with its pairwise q-th-power Euclidean distance matrix.
/// Coordinates are stored flat: point i occupies coords[i*dim, (i+1)*dim).
struct MetricSpace {
    std::vector<double> coords;
    std::size_t dim = 0;
    double q = 2.0;
    Matrix dist_q;  // (i,j) = ||x_i - x_j||_2^q

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    const double* point(std::size_t i) const { return coords.data() + i * dim; }
};

/// A metric space together with a probability mass function on its points.
struct DiscreteSource {
    MetricSpace space;
    std::vector<double> pmf;
};

enum class Family { gaussian, laplacian, uniform };

/// Density family and scale for generating source pmfs. `sigma` is ignored
/// for the uniform family.
struct SourceFamily {
    Family family = Family::gaussian;
    double sigma = 1.0;
};

/// Row-stochastic conditional-probability matrix w (M x N) with its output
/// marginal r (length N). w(i,j) = P(Y = y_j | X = x_i).
struct Coupling {
    Matrix w;
    std::vector<double> r;
};

/// Thrown when an iteration produces non-finite state; carries the multiplier
/// that triggered it so sweeps can report the offending grid point.
struct NumericalFailure : std::runtime_error {
    double lambda;
    NumericalFailure(double lam, const std::string& what)
        : std::runtime_error(what), lambda(lam) {}
};

/// Configuration-document errors; message carries the JSON path of the
/// offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invariant checks. Each throws std::invalid_argument with a description of
/// the first violated property.
void validate(const MetricSpace& space);
void validate(const DiscreteSource& source);
void validate(const Coupling& coupling, const std::vector<double>& p);

}  // namespace rdd
