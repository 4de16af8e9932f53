#pragma once

#include "rdd/types.hpp"

namespace rdd {

inline constexpr std::size_t kDefaultPointCap = 10000;

/// Uniform grid over [-h, h]^dim with K coordinates per axis, placed at cell
/// centers: x_i = -h + delta/2 + i*delta, delta = 2h/K. Point count is K^dim;
/// counts above `point_cap` are rejected to keep downstream quartic oracles
/// from hanging silently.
MetricSpace build_uniform_grid(double h, int k_per_axis, int dim, double q,
                               std::size_t point_cap = kDefaultPointCap);

/// n points evenly spaced on a circle of the given radius, as 2-D Cartesian
/// coordinates. Distances are chordal (ambient L2), raised to q.
MetricSpace build_circle(int n, double radius, double q);

/// n_per_axis^2 points on a sphere of the given radius: longitudes 2*pi*a/n
/// and colatitudes pi*(b+0.5)/n. The half-step colatitude offset keeps the
/// poles off the mesh so all points are distinct. Chordal distances raised
/// to q.
MetricSpace build_sphere(int n_per_axis, double radius, double q);

/// Evaluates the family's density at each point of the space and normalizes.
/// Unnormalized masses are computed in log space and shifted by the maximum
/// before exponentiation, so constant prefactors cancel and small sigmas do
/// not underflow the whole vector.
DiscreteSource source_pmf(const MetricSpace& space, const SourceFamily& family);

/// M x N matrix of squared Euclidean distances ||x_i - y_j||^2 between two
/// spaces of equal dimension.
Matrix cross_distance_matrix(const MetricSpace& x_space, const MetricSpace& y_space);

}  // namespace rdd
