#pragma once

#include <cstddef>
#include <string>

#include "rdd/spaces.hpp"
#include "rdd/sweep.hpp"
#include "rdd/types.hpp"

namespace rdd {

/// One side of the problem: either a grid (dim/h/K) or a circle/sphere
/// (n/radius). When used as the source, a density family is attached; the
/// reproduction space carries geometry only.
struct SpaceSpec {
    enum class Shape { grid, circle, sphere };
    Shape shape = Shape::grid;
    // grid parameters
    int dim = 1;
    double h = 8.0;
    int k = 50;
    // circle/sphere parameters (n is per-axis for spheres: n^2 points)
    int n = 20;
    double radius = 4.0;
    // source-only
    bool has_family = false;
    SourceFamily family;
};

struct OutputSpec {
    enum class Format { csv, json };
    std::string path;  // empty writes to stdout
    Format format = Format::csv;
    bool emit_coupling = false;
    bool audit = false;
};

/// Fully resolved run description: parsed from a strict JSON document, then
/// optionally overridden by command-line flags.
struct RunConfig {
    SpaceSpec source;
    SpaceSpec y_space;
    double q = 2.0;
    SweepPlan sweep;  // sweep.solver holds the per-point solver template
    OutputSpec output;
    std::size_t point_cap = kDefaultPointCap;
};

/// Parses and validates a JSON config document. Unknown keys, wrong types and
/// out-of-range values raise ConfigError with the offending path in the
/// message.
RunConfig parse_config(const std::string& text);

/// parse_config over the contents of a file.
RunConfig load_config_file(const std::string& path);

MetricSpace make_space(const SpaceSpec& spec, double q, std::size_t point_cap);
DiscreteSource make_source(const SpaceSpec& spec, double q, std::size_t point_cap);

const char* shape_name(SpaceSpec::Shape shape);
const char* family_name(Family family);
const char* format_name(OutputSpec::Format format);

}  // namespace rdd
