#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rdd/config.hpp"
#include "rdd/sweep.hpp"

namespace rdd {

inline constexpr const char* kCsvHeader =
    "lambda,theta,distortion,rate_nats,rate_bits,iterations,converged";

/// Shortest full-precision rendering: printf %.17g (17 significant digits,
/// round-trips any double; non-finite values print as nan/inf).
std::string format_double(double value);

/// One header line plus one row per point, in order.
void write_points_csv(std::ostream& out, const std::vector<CurvePoint>& points);

/// {"config": <resolved-config echo>, "points": [...]}. Non-finite values
/// serialize as null.
void write_points_json(std::ostream& out, const std::vector<CurvePoint>& points,
                       const RunConfig& config);

/// Dense matrix dump: M lines of N comma-separated %.17g conditionals.
void write_coupling_csv(std::ostream& out, const Coupling& coupling);

/// "<stem>_coupling_<index>.csv" next to the output path.
std::string coupling_path(const std::string& output_path, std::size_t index);

}  // namespace rdd
