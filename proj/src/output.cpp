#include "rdd/output.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace rdd {

namespace {

using nlohmann::json;

json space_to_json(const SpaceSpec& spec) {
    json j;
    j["shape"] = shape_name(spec.shape);
    if (spec.shape == SpaceSpec::Shape::grid) {
        j["dim"] = spec.dim;
        j["h"] = spec.h;
        j["K"] = spec.k;
    } else {
        j["n"] = spec.n;
        j["radius"] = spec.radius;
    }
    if (spec.has_family) {
        j["family"] = family_name(spec.family.family);
        if (spec.family.family != Family::uniform) j["sigma"] = spec.family.sigma;
    }
    return j;
}

json config_to_json(const RunConfig& config) {
    json j;
    j["source"] = space_to_json(config.source);
    j["y_space"] = space_to_json(config.y_space);
    j["q"] = config.q;
    j["sweep"] = {{"lambda_start", config.sweep.lambda_start},
                  {"lambda_end", config.sweep.lambda_end},
                  {"lambda_count", config.sweep.lambda_count},
                  {"theta_values", config.sweep.theta_values}};
    j["solver"] = {{"max_iter", config.sweep.solver.max_iter},
                   {"w_tol", config.sweep.solver.w_tol},
                   {"seed", config.sweep.solver.seed},
                   {"support_floor", config.sweep.solver.support_floor}};
    j["output"] = {{"path", config.output.path},
                   {"format", format_name(config.output.format)},
                   {"emit_coupling", config.output.emit_coupling},
                   {"audit", config.output.audit}};
    j["point_cap"] = config.point_cap;
    return j;
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_points_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
    out << kCsvHeader << '\n';
    for (const CurvePoint& point : points) {
        out << format_double(point.lambda) << ',' << format_double(point.theta) << ','
            << format_double(point.distortion) << ',' << format_double(point.rate_nats) << ','
            << format_double(point.rate_bits) << ',' << point.iterations_run << ','
            << (point.converged ? "true" : "false") << '\n';
    }
}

void write_points_json(std::ostream& out, const std::vector<CurvePoint>& points,
                       const RunConfig& config) {
    json doc;
    doc["config"] = config_to_json(config);
    json rows = json::array();
    for (const CurvePoint& point : points) {
        rows.push_back({{"lambda", point.lambda},
                        {"theta", point.theta},
                        {"distortion", point.distortion},
                        {"rate_nats", point.rate_nats},
                        {"rate_bits", point.rate_bits},
                        {"iterations", point.iterations_run},
                        {"converged", point.converged}});
    }
    doc["points"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

void write_coupling_csv(std::ostream& out, const Coupling& coupling) {
    for (std::size_t i = 0; i < coupling.w.rows(); ++i) {
        const double* row = coupling.w.row(i);
        for (std::size_t j = 0; j < coupling.w.cols(); ++j) {
            if (j != 0) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
}

std::string coupling_path(const std::string& output_path, std::size_t index) {
    const std::size_t slash = output_path.find_last_of('/');
    const std::size_t dot = output_path.find_last_of('.');
    std::string stem = output_path;
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem = output_path.substr(0, dot);
    return stem + "_coupling_" + std::to_string(index) + ".csv";
}

}  // namespace rdd
