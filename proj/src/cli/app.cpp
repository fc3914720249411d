#include "igac/cli/app.hpp"

#include "igac/cli/config.hpp"
#include "igac/cli/output.hpp"
#include "igac/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>

namespace igac::cli {

namespace {

constexpr std::array<const char*, 7> subcommands = {"metric", "curvature", "geodesic", "jacobi",
                                                    "ige",    "experiment", "run"};

struct Options {
    std::string config;
    std::string point = "default";
    std::string velocity;
    std::optional<double> tau_max;
    std::optional<std::string> out;
    bool quadrature = false;
    bool series = false;
};

// Writes to --out when given, otherwise to the caller's stream.
void emit(const Options& opts, std::ostream& out, const std::string& text) {
    if (opts.out) {
        std::ofstream file(*opts.out, std::ios::binary | std::ios::trunc);
        file << text;
        if (!file) throw Error("io", "failed to write " + *opts.out);
    } else {
        out << text;
    }
}

StageSetup load_stage(const Options& opts) {
    StageSetup setup = parse_stage_setup(load_json(opts.config));
    setup.point = parse_point(opts.point, setup.metric.coordinate_names(), setup.point);
    if (!setup.metric.contains(setup.point)) throw DomainError("--point: outside the parameter domain");
    if (!opts.velocity.empty()) {
        std::vector<std::string> names;
        for (const auto& n : setup.metric.coordinate_names()) names.push_back(n);
        setup.velocity = parse_point(opts.velocity, names, Vector::Zero(setup.metric.dim()));
    }
    if (opts.tau_max) {
        if (!(*opts.tau_max > 0.0)) throw ConfigError("config", "--tau-max: must be positive");
        setup.integration.tau_max = *opts.tau_max;
    }
    return setup;
}

GeodesicTrajectory stage_geodesic(const StageSetup& setup) {
    if (!setup.velocity) throw ConfigError("config", "velocity: required for dynamics stages on a family config");
    return integrate_geodesic(setup.metric, setup.point, *setup.velocity, setup.integration.tau_max,
                              setup.integration.tol, setup.integration.grid_points);
}

int metric_stage(const Options& opts, std::ostream& out) {
    const StageSetup setup = load_stage(opts);
    json doc = {{"manifold", setup.label},
                {"coordinates", setup.metric.coordinate_names()},
                {"point", std::vector<double>(setup.point.data(), setup.point.data() + setup.point.size())},
                {"provider", setup.metric.provider() == MetricProvider::analytic ? "analytic" : "finite_difference"}};
    const Matrix g = setup.metric.value(setup.point);
    json rows = json::array();
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        rows.push_back(json::array());
        for (Eigen::Index c = 0; c < g.cols(); ++c) rows.back().push_back(g(r, c));
    }
    doc["g"] = rows;
    if (opts.quadrature) {
        const json source = load_json(opts.config);
        if (is_model_config(source) || !source.contains("family")) {
            throw ConfigError("config", "--quadrature: needs a single-family config");
        }
        ParamRecord params;
        for (int i = 0; i < setup.metric.dim(); ++i) {
            params[setup.metric.coordinate_names()[static_cast<std::size_t>(i)]] = setup.point[i];
        }
        const auto family = make_family(source.at("family").get<std::string>(), params);
        const Matrix q = fisher_metric_numeric(family, setup.point);
        json qrows = json::array();
        for (Eigen::Index r = 0; r < q.rows(); ++r) {
            qrows.push_back(json::array());
            for (Eigen::Index c = 0; c < q.cols(); ++c) qrows.back().push_back(q(r, c));
        }
        doc["g_quadrature"] = qrows;
    }
    emit(opts, out, doc.dump(2) + "\n");
    return success;
}

int curvature_stage(const Options& opts, std::ostream& out) {
    const StageSetup setup = load_stage(opts);
    const CurvatureReport report = riemann_ricci_scalar(setup.metric, setup.point);
    emit(opts, out, to_json(report, setup.metric.coordinate_names()).dump(2) + "\n");
    return success;
}

int geodesic_stage(const Options& opts, std::ostream& out) {
    const StageSetup setup = load_stage(opts);
    std::ostringstream text;
    write_geodesic_csv(text, stage_geodesic(setup));
    emit(opts, out, text.str());
    return success;
}

int jacobi_stage(const Options& opts, std::ostream& out) {
    const StageSetup setup = load_stage(opts);
    const GeodesicTrajectory path = stage_geodesic(setup);
    const Vector dj0 = experiment_deviation(setup.factors, setup.point, *setup.velocity);
    std::ostringstream text;
    write_jacobi_csv(text, integrate_jacobi(setup.metric, path, Vector::Zero(setup.metric.dim()), dj0));
    emit(opts, out, text.str());
    return success;
}

int ige_stage(const Options& opts, std::ostream& out) {
    const StageSetup setup = load_stage(opts);
    const GeodesicTrajectory path = stage_geodesic(setup);
    const IGESeries series =
        ige_series(setup.metric, path.samples, entropy_grid(path.samples, setup.entropy.tau_min), setup.entropy);
    std::ostringstream text;
    if (opts.series) {
        write_ige_csv(text, series);
    } else {
        write_growth_csv(text, series.growth);
    }
    emit(opts, out, text.str());
    return success;
}

int experiment_stage(const Options& opts, std::ostream& out) {
    RunConfig config = parse_run_config(load_json(opts.config));
    if (opts.tau_max) {
        std::visit([&](auto& c) { c.integration.tau_max = *opts.tau_max; }, config.experiment);
        validate(config.experiment);
    }
    const ExperimentReport report = run_experiment(config.experiment);
    const auto dir = resolve_output_dir(config, opts.out);
    write_experiment(dir, report);
    out << dir.string() << "\n";
    return success;
}

std::string usage() {
    return "usage: igac <subcommand> [options]\n"
           "subcommands:\n"
           "  metric      --config FILE [--point P] [--quadrature]\n"
           "  curvature   --config FILE [--point P]\n"
           "  geodesic    --config FILE [--point P] [--velocity V] [--tau-max T] [--out FILE]\n"
           "  jacobi      --config FILE [--point P] [--velocity V] [--tau-max T] [--out FILE]\n"
           "  ige         --config FILE [--point P] [--velocity V] [--tau-max T] [--series] [--out FILE]\n"
           "  experiment  --config FILE [--tau-max T] [--out DIR]\n"
           "  run         CONFIG [--out DIR]\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << usage();
        return usage_error;
    }
    const std::string& command = args.front();
    if (command == "-h" || command == "--help") {
        out << usage();
        return success;
    }
    if (std::find(subcommands.begin(), subcommands.end(), command) == subcommands.end()) {
        err << "igac: unknown subcommand '" << command << "'\n" << usage();
        return usage_error;
    }

    Options opts;
    CLI::App app{"Information-geometric chaos indicators", "igac " + command};
    const bool is_run = command == "run";
    if (is_run) {
        app.add_option("config", opts.config, "experiment config (JSON)")->required();
    } else {
        app.add_option("--config", opts.config, "config file (JSON)")->required();
    }
    if (command == "metric" || command == "curvature" || command == "geodesic" || command == "jacobi" ||
        command == "ige") {
        app.add_option("--point", opts.point, "default, name=value pairs or a numeric list");
    }
    if (command == "geodesic" || command == "jacobi" || command == "ige") {
        app.add_option("--velocity", opts.velocity, "initial velocity, same syntax as --point");
    }
    if (command != "metric" && command != "curvature" && !is_run) {
        app.add_option("--tau-max", opts.tau_max, "final curve parameter");
    }
    app.add_option("--out", opts.out, "output file (stages) or directory (experiment, run)");
    if (command == "metric") app.add_flag("--quadrature", opts.quadrature, "also evaluate the quadrature oracle");
    if (command == "ige") app.add_flag("--series", opts.series, "print the S(tau) series instead of the fit");

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
        app.parse(rest);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return success;
    } catch (const CLI::ParseError& e) {
        err << "igac " << command << ": " << e.what() << "\n" << app.help();
        return usage_error;
    }

    try {
        if (command == "metric") return metric_stage(opts, out);
        if (command == "curvature") return curvature_stage(opts, out);
        if (command == "geodesic") return geodesic_stage(opts, out);
        if (command == "jacobi") return jacobi_stage(opts, out);
        if (command == "ige") return ige_stage(opts, out);
        return experiment_stage(opts, out);
    } catch (const NumericalError& e) {
        err << error_json(e).dump() << "\n";
        return numerical_error;
    } catch (const std::exception& e) {
        err << error_json(e).dump() << "\n";
        return config_error;
    }
}

}  // namespace igac::cli
