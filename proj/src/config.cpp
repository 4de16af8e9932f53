#include "rdd/config.hpp"

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

namespace rdd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) fail(path + "." + item.key(), "unknown key");
    }
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Family parse_family(const json& j, const std::string& path) {
    const std::string name = as_string(j, path);
    if (name == "gaussian") return Family::gaussian;
    if (name == "laplacian") return Family::laplacian;
    if (name == "uniform") return Family::uniform;
    fail(path, "must be one of gaussian, laplacian, uniform");
}

SpaceSpec parse_space(const json& j, const std::string& path, bool is_source) {
    if (!j.is_object()) fail(path, "expected an object");
    SpaceSpec spec;

    std::string shape = "grid";
    if (j.contains("shape")) shape = as_string(j["shape"], path + ".shape");

    if (shape == "grid") {
        spec.shape = SpaceSpec::Shape::grid;
        if (is_source)
            check_keys(j, path, {"shape", "dim", "h", "K", "family", "sigma"});
        else
            check_keys(j, path, {"shape", "dim", "h", "K"});
        if (!j.contains("dim")) fail(path + ".dim", "required for grids");
        if (!j.contains("h")) fail(path + ".h", "required for grids");
        if (!j.contains("K")) fail(path + ".K", "required for grids");
        spec.dim = as_int(j["dim"], path + ".dim");
        spec.h = as_number(j["h"], path + ".h");
        spec.k = as_int(j["K"], path + ".K");
        if (spec.dim < 1 || spec.dim > 3) fail(path + ".dim", "must be 1, 2 or 3");
        if (!(spec.h > 0.0)) fail(path + ".h", "must be > 0");
        if (spec.k < 1) fail(path + ".K", "must be >= 1");
    } else if (shape == "circle" || shape == "sphere") {
        spec.shape = shape == "circle" ? SpaceSpec::Shape::circle : SpaceSpec::Shape::sphere;
        if (is_source)
            check_keys(j, path, {"shape", "n", "radius", "family", "sigma"});
        else
            check_keys(j, path, {"shape", "n", "radius"});
        if (!j.contains("n")) fail(path + ".n", "required for circles and spheres");
        if (!j.contains("radius")) fail(path + ".radius", "required for circles and spheres");
        spec.n = as_int(j["n"], path + ".n");
        spec.radius = as_number(j["radius"], path + ".radius");
        if (spec.n < 2) fail(path + ".n", "must be >= 2");
        if (!(spec.radius > 0.0)) fail(path + ".radius", "must be > 0");
    } else {
        fail(path + ".shape", "must be one of grid, circle, sphere");
    }

    if (is_source) {
        if (!j.contains("family")) fail(path + ".family", "required for the source");
        spec.has_family = true;
        spec.family.family = parse_family(j["family"], path + ".family");
        if (j.contains("sigma")) {
            spec.family.sigma = as_number(j["sigma"], path + ".sigma");
            if (!(spec.family.sigma > 0.0)) fail(path + ".sigma", "must be > 0");
        } else if (spec.family.family != Family::uniform) {
            fail(path + ".sigma", "required for gaussian and laplacian sources");
        }
    }
    return spec;
}

void parse_sweep(const json& j, const std::string& path, SweepPlan& plan) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"lambda_start", "lambda_end", "lambda_count", "theta_values"});
    if (j.contains("lambda_start"))
        plan.lambda_start = as_number(j["lambda_start"], path + ".lambda_start");
    if (j.contains("lambda_end"))
        plan.lambda_end = as_number(j["lambda_end"], path + ".lambda_end");
    if (j.contains("lambda_count"))
        plan.lambda_count = as_int(j["lambda_count"], path + ".lambda_count");
    if (j.contains("theta_values")) {
        const json& thetas = j["theta_values"];
        if (!thetas.is_array() || thetas.empty())
            fail(path + ".theta_values", "expected a nonempty array");
        plan.theta_values.clear();
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            const std::string entry = path + ".theta_values[" + std::to_string(i) + "]";
            const double t = as_number(thetas[i], entry);
            if (!(t >= 0.0 && t <= 1.0)) fail(entry, "must lie in [0,1]");
            plan.theta_values.push_back(t);
        }
    }
    if (!(plan.lambda_start >= 0.0)) fail(path + ".lambda_start", "must be >= 0");
    if (plan.lambda_count < 1) fail(path + ".lambda_count", "must be >= 1");
    if (!(plan.lambda_end > plan.lambda_start))
        fail(path + ".lambda_end", "must exceed lambda_start");
}

void parse_solver(const json& j, const std::string& path, SolverConfig& solver) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"max_iter", "w_tol", "seed", "support_floor"});
    if (j.contains("max_iter")) {
        solver.max_iter = as_int(j["max_iter"], path + ".max_iter");
        if (solver.max_iter < 1) fail(path + ".max_iter", "must be >= 1");
    }
    if (j.contains("w_tol")) {
        solver.w_tol = as_number(j["w_tol"], path + ".w_tol");
        if (!(solver.w_tol >= 0.0)) fail(path + ".w_tol", "must be >= 0");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) fail(path + ".seed", "expected an integer");
        solver.seed = static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
    }
    if (j.contains("support_floor"))
        solver.support_floor = as_bool(j["support_floor"], path + ".support_floor");
}

void parse_output(const json& j, const std::string& path, OutputSpec& output) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"path", "format", "emit_coupling", "audit"});
    if (j.contains("path")) output.path = as_string(j["path"], path + ".path");
    if (j.contains("format")) {
        const std::string format = as_string(j["format"], path + ".format");
        if (format == "csv")
            output.format = OutputSpec::Format::csv;
        else if (format == "json")
            output.format = OutputSpec::Format::json;
        else
            fail(path + ".format", "must be csv or json");
    }
    if (j.contains("emit_coupling"))
        output.emit_coupling = as_bool(j["emit_coupling"], path + ".emit_coupling");
    if (j.contains("audit")) output.audit = as_bool(j["audit"], path + ".audit");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(doc, "config",
               {"source", "y_space", "q", "sweep", "solver", "output", "point_cap"});

    RunConfig config;
    if (!doc.contains("source")) throw ConfigError("config.source: required");
    if (!doc.contains("y_space")) throw ConfigError("config.y_space: required");
    config.source = parse_space(doc["source"], "config.source", /*is_source=*/true);
    config.y_space = parse_space(doc["y_space"], "config.y_space", /*is_source=*/false);

    if (doc.contains("q")) {
        config.q = as_number(doc["q"], "config.q");
        if (!(config.q >= 1.0)) fail("config.q", "must be >= 1");
    }
    if (doc.contains("sweep")) parse_sweep(doc["sweep"], "config.sweep", config.sweep);
    if (doc.contains("solver")) parse_solver(doc["solver"], "config.solver", config.sweep.solver);
    if (doc.contains("output")) parse_output(doc["output"], "config.output", config.output);
    if (doc.contains("point_cap")) {
        const int cap = as_int(doc["point_cap"], "config.point_cap");
        if (cap < 1) fail("config.point_cap", "must be >= 1");
        config.point_cap = static_cast<std::size_t>(cap);
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

MetricSpace make_space(const SpaceSpec& spec, double q, std::size_t point_cap) {
    switch (spec.shape) {
        case SpaceSpec::Shape::grid:
            return build_uniform_grid(spec.h, spec.k, spec.dim, q, point_cap);
        case SpaceSpec::Shape::circle:
            if (static_cast<std::size_t>(spec.n) > point_cap)
                throw std::invalid_argument("circle would contain " + std::to_string(spec.n) +
                                            " points, above the cap of " +
                                            std::to_string(point_cap));
            return build_circle(spec.n, spec.radius, q);
        case SpaceSpec::Shape::sphere: {
            const std::size_t count =
                static_cast<std::size_t>(spec.n) * static_cast<std::size_t>(spec.n);
            if (count > point_cap)
                throw std::invalid_argument("sphere would contain " + std::to_string(count) +
                                            " points, above the cap of " +
                                            std::to_string(point_cap));
            return build_sphere(spec.n, spec.radius, q);
        }
    }
    throw std::logic_error("make_space: unreachable");
}

DiscreteSource make_source(const SpaceSpec& spec, double q, std::size_t point_cap) {
    if (!spec.has_family)
        throw ConfigError("config.source.family: required to build a source");
    return source_pmf(make_space(spec, q, point_cap), spec.family);
}

const char* shape_name(SpaceSpec::Shape shape) {
    switch (shape) {
        case SpaceSpec::Shape::grid: return "grid";
        case SpaceSpec::Shape::circle: return "circle";
        case SpaceSpec::Shape::sphere: return "sphere";
    }
    return "?";
}

const char* family_name(Family family) {
    switch (family) {
        case Family::gaussian: return "gaussian";
        case Family::laplacian: return "laplacian";
        case Family::uniform: return "uniform";
    }
    return "?";
}

const char* format_name(OutputSpec::Format format) {
    return format == OutputSpec::Format::csv ? "csv" : "json";
}

}  // namespace rdd
