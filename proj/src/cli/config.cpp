#include "igac/cli/config.hpp"

#include "igac/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace igac::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config", (path.empty() ? std::string("<root>") : path) + ": " + what);
}

// Typed access to one JSON object that remembers where it sits in the document
// and rejects keys nobody asked about.
class Fields {
public:
    Fields(const json& object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) fail(path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[nodiscard]] bool has(const std::string& key) {
        seen_.insert(key);
        return object_.contains(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const auto& v = object_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const auto& v = object_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        return v.get<int>();
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = object_.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        fail(at(key), "expected a non-negative integer");
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = object_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        if (!has(key)) return {};
        const auto& v = object_.at(key);
        if (!v.is_array()) fail(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Fields child(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Fields(object_.contains(key) ? object_.at(key) : empty, at(key));
    }

    [[nodiscard]] const json& raw(const std::string& key) {
        seen_.insert(key);
        return object_.at(key);
    }

    void finish() const {
        for (const auto& item : object_.items()) {
            if (!seen_.contains(item.key())) fail(at(item.key()), "unknown field");
        }
    }

private:
    const json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

std::size_t grid_points(Fields& f, std::size_t fallback) {
    const int n = f.integer("tau_grid_points", static_cast<int>(fallback));
    if (n < 2) fail(f.at("tau_grid_points"), "must be at least 2");
    return static_cast<std::size_t>(n);
}

IntegrationSettings read_integration(Fields& f, const IntegrationSettings& defaults) {
    IntegrationSettings s;
    s.tau_max = f.number("tau_max", defaults.tau_max);
    s.tol = f.number("tol", defaults.tol);
    s.grid_points = grid_points(f, defaults.grid_points);
    return s;
}

EntropyOptions read_entropy_block(Fields& parent, const EntropyOptions& defaults) {
    Fields f = parent.child("entropy");
    EntropyOptions e = defaults;
    e.floor = f.number("floor", e.floor);
    e.tau_min = f.number("tau_min", e.tau_min);
    e.quadrature_nodes = f.integer("quadrature_nodes", e.quadrature_nodes);
    e.max_panel_ratio = f.number("max_panel_ratio", e.max_panel_ratio);
    e.window = f.number("window", e.window);
    e.separation = f.number("separation", e.separation);
    const int outer = f.integer("min_outer_points", static_cast<int>(e.min_outer_points));
    if (outer < 2) fail(f.at("min_outer_points"), "must be at least 2");
    e.min_outer_points = static_cast<std::size_t>(outer);
    const std::string measure = f.string("measure", std::string(to_string(e.measure)));
    if (measure == "riemannian") {
        e.measure = VolumeMeasure::riemannian;
    } else if (measure == "coordinate") {
        e.measure = VolumeMeasure::coordinate;
    } else {
        fail(f.at("measure"), "expected \"riemannian\" or \"coordinate\"");
    }
    if (!(e.max_panel_ratio > 1.0)) fail(f.at("max_panel_ratio"), "must exceed 1");
    f.finish();
    return e;
}

json entropy_json(const EntropyOptions& e) {
    return {{"floor", e.floor},
            {"tau_min", e.tau_min},
            {"quadrature_nodes", e.quadrature_nodes},
            {"max_panel_ratio", e.max_panel_ratio},
            {"min_outer_points", e.min_outer_points},
            {"window", e.window},
            {"separation", e.separation},
            {"measure", std::string(to_string(e.measure))}};
}

void put_integration(json& out, const IntegrationSettings& s) {
    out["tau_max"] = s.tau_max;
    out["tol"] = s.tol;
    out["tau_grid_points"] = s.grid_points;
}

ExperimentConfig read_model(Fields& f, const std::string& model, std::uint64_t seed) {
    if (model == "gaussian_ed") {
        GaussianEdConfig c;
        c.l = f.integer("l", c.l);
        c.c = f.number("c", c.c);
        Fields initial = f.child("initial");
        c.mu0 = initial.number("mu", c.mu0);
        c.sigma0 = initial.number("sigma", c.sigma0);
        initial.finish();
        c.integration = read_integration(f, c.integration);
        c.entropy = read_entropy_block(f, c.entropy);
        return c;
    }
    if (model == "iho") {
        IhoConfig c;
        c.l = f.integer("l", c.l);
        c.omega_mean = f.number("omega_mean", c.omega_mean);
        c.omega_std = f.number("omega_std", c.omega_std);
        c.omegas = f.numbers("omegas");
        c.members = f.integer("members", c.members);
        c.theta0 = f.number("theta0", c.theta0);
        c.seed = seed;
        c.integration = read_integration(f, c.integration);
        c.entropy = read_entropy_block(f, c.entropy);
        return c;
    }
    if (model == "spin_integrable") {
        SpinIntegrableConfig c;
        c.a = f.number("a", c.a);
        c.b = f.number("b", c.b);
        c.integration = read_integration(f, c.integration);
        c.entropy = read_entropy_block(f, c.entropy);
        return c;
    }
    if (model == "spin_chaotic") {
        SpinChaoticConfig c;
        c.c = f.number("c", c.c);
        c.integration = read_integration(f, c.integration);
        c.entropy = read_entropy_block(f, c.entropy);
        return c;
    }
    fail(f.at("model"), "unknown model '" + model + "'");
}

MetricField family_metric(Fields& f, ParamRecord& point_out, std::vector<std::string>& names_out,
                          Vector& point_values) {
    const std::string name = f.string("family", "");
    if (name.empty()) fail(f.at("family"), "required");
    ParamRecord params;
    if (f.has("params")) {
        Fields p = f.child("params");
        for (const auto& item : f.raw("params").items()) params[item.key()] = p.number(item.key(), 0.0);
        p.finish();
    }
    ParametricFamily family = [&] {
        try {
            return make_family(name, params);
        } catch (const UnsupportedFamilyError& e) {
            fail(f.at("family"), e.what());
        } catch (const ConfigError& e) {
            fail(f.at("params"), e.what());
        }
    }();
    point_out = params;
    names_out = family.param_names;
    point_values = family.point;
    return fisher_metric_analytic(family);
}

}  // namespace

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", path.string() + ": cannot open config file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", path.string() + ": invalid JSON (" + e.what() + ")");
    }
}

bool is_model_config(const json& document) { return document.is_object() && document.contains("model"); }

RunConfig parse_run_config(const json& document) {
    Fields f(document, "");
    RunConfig out;
    const std::string model = f.string("model", "");
    if (model.empty()) fail("model", "required");
    out.seed = f.unsigned64("seed", 0);
    out.output_dir = f.string("output_dir", out.output_dir);
    out.experiment = read_model(f, model, out.seed);
    f.finish();
    validate(out.experiment);
    return out;
}

json to_json(const ExperimentConfig& config) {
    struct Visitor {
        json operator()(const GaussianEdConfig& c) const {
            json out = {{"model", "gaussian_ed"}, {"l", c.l}, {"c", c.c},
                        {"initial", {{"mu", c.mu0}, {"sigma", c.sigma0}}}};
            put_integration(out, c.integration);
            out["entropy"] = entropy_json(c.entropy);
            return out;
        }
        json operator()(const IhoConfig& c) const {
            json out = {{"model", "iho"},           {"l", c.l},
                        {"omega_mean", c.omega_mean}, {"omega_std", c.omega_std},
                        {"members", c.members},     {"theta0", c.theta0}};
            if (!c.omegas.empty()) out["omegas"] = c.omegas;
            put_integration(out, c.integration);
            out["entropy"] = entropy_json(c.entropy);
            return out;
        }
        json operator()(const SpinIntegrableConfig& c) const {
            json out = {{"model", "spin_integrable"}, {"a", c.a}, {"b", c.b}};
            put_integration(out, c.integration);
            out["entropy"] = entropy_json(c.entropy);
            return out;
        }
        json operator()(const SpinChaoticConfig& c) const {
            json out = {{"model", "spin_chaotic"}, {"c", c.c}};
            put_integration(out, c.integration);
            out["entropy"] = entropy_json(c.entropy);
            return out;
        }
    };
    return std::visit(Visitor{}, config);
}

json to_json(const RunConfig& config) {
    json out = to_json(config.experiment);
    out["seed"] = config.seed;
    out["output_dir"] = config.output_dir;
    return out;
}

StageSetup parse_stage_setup(const json& document) {
    if (is_model_config(document)) {
        const RunConfig run = parse_run_config(document);
        const ModelSetup setup = model_setup(run.experiment);
        StageSetup out{setup.metric, model_factors(run.experiment), setup.theta0, setup.velocity0, {}, {},
                       model_name(run.experiment)};
        std::visit(
            [&out](const auto& c) {
                out.integration = c.integration;
                out.entropy = c.entropy;
            },
            run.experiment);
        return out;
    }

    Fields f(document, "");
    std::vector<MetricField> factors;
    std::vector<Vector> points;
    std::string label;
    if (f.has("families")) {
        const json& list = f.raw("families");
        if (!list.is_array() || list.empty()) fail("families", "expected a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Fields item(list[i], "families[" + std::to_string(i) + "]");
            ParamRecord params;
            std::vector<std::string> names;
            Vector p;
            factors.push_back(family_metric(item, params, names, p));
            points.push_back(p);
            label += (label.empty() ? "" : "x") + item.string("family", "");
            item.finish();
        }
    } else {
        ParamRecord params;
        std::vector<std::string> names;
        Vector p;
        factors.push_back(family_metric(f, params, names, p));
        points.push_back(p);
        label = f.string("family", "");
    }

    const std::string provider = f.string("provider", "analytic");
    if (provider != "analytic" && provider != "finite_difference") {
        fail("provider", "expected \"analytic\" or \"finite_difference\"");
    }
    MetricField metric = product_manifold(factors);
    if (provider == "finite_difference") metric = with_finite_differences(metric);

    Vector point(metric.dim());
    int offset = 0;
    for (const auto& p : points) {
        point.segment(offset, p.size()) = p;
        offset += static_cast<int>(p.size());
    }
    std::optional<Vector> velocity;
    if (f.has("velocity")) {
        const auto v = f.numbers("velocity");
        if (static_cast<int>(v.size()) != metric.dim()) {
            fail("velocity", "expected " + std::to_string(metric.dim()) + " entries");
        }
        velocity = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    IntegrationSettings integration = read_integration(f, IntegrationSettings{});
    EntropyOptions entropy = read_entropy_block(f, EntropyOptions{});
    f.finish();
    return {metric, factors, point, velocity, integration, entropy, label};
}

Vector parse_point(const std::string& text, const std::vector<std::string>& names, const Vector& base) {
    if (text.empty() || text == "default") return base;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);

    auto to_double = [](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) fail("--point", "cannot parse '" + s + "' as a number");
        return v;
    };

    if (text.find('=') == std::string::npos) {
        if (parts.size() != names.size()) {
            fail("--point", "expected " + std::to_string(names.size()) + " values");
        }
        Vector out(static_cast<Eigen::Index>(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(parts[i]);
        return out;
    }
    Vector out = base;
    for (const auto& part : parts) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) fail("--point", "mixing named and positional values in '" + part + "'");
        const std::string key = part.substr(0, eq);
        const auto it = std::find(names.begin(), names.end(), key);
        if (it == names.end()) fail("--point", "unknown coordinate '" + key + "'");
        out[it - names.begin()] = to_double(part.substr(eq + 1));
    }
    return out;
}

std::filesystem::path resolve_output_dir(const RunConfig& config, const std::optional<std::string>& override_dir) {
    std::filesystem::path root = config.output_dir;
    if (const char* env = std::getenv("IGAC_OUTPUT_DIR"); env != nullptr && *env != '\0') root = env;
    if (override_dir) root = *override_dir;
    return root / (model_name(config.experiment) + "_seed" + std::to_string(config.seed));
}

}  // namespace igac::cli
