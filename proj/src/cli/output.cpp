#include "igac/cli/output.hpp"

#include "igac/cli/config.hpp"
#include "igac/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace igac::cli {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
    return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("io", "failed to write " + path.string());
}

}  // namespace

void write_geodesic_csv(std::ostream& out, const GeodesicTrajectory& trajectory) {
    const auto n = trajectory.samples.empty() ? 0 : trajectory.samples.front().theta.size();
    std::string text = "tau";
    for (Eigen::Index i = 0; i < n; ++i) text += fmt::format(",theta_{}", i);
    for (Eigen::Index i = 0; i < n; ++i) text += fmt::format(",thetadot_{}", i);
    text += ",speed\n";
    for (std::size_t k = 0; k < trajectory.samples.size(); ++k) {
        const auto& s = trajectory.samples[k];
        text += num(s.tau);
        for (Eigen::Index i = 0; i < n; ++i) text += "," + num(s.theta[i]);
        for (Eigen::Index i = 0; i < n; ++i) text += "," + num(s.velocity[i]);
        text += "," + num(trajectory.speed[k]) + "\n";
    }
    out << text;
}

void write_jacobi_csv(std::ostream& out, const JacobiSeries& series) {
    const auto n = series.samples.empty() ? 0 : series.samples.front().j.size();
    std::string text = "tau";
    for (Eigen::Index i = 0; i < n; ++i) text += fmt::format(",j_{}", i);
    text += ",intensity\n";
    for (std::size_t k = 0; k < series.samples.size(); ++k) {
        const auto& s = series.samples[k];
        text += num(s.tau);
        for (Eigen::Index i = 0; i < n; ++i) text += "," + num(s.j[i]);
        text += "," + num(series.intensity[k]) + "\n";
    }
    out << text;
}

void write_ige_csv(std::ostream& out, const IGESeries& series) {
    std::string text = "tau,volume,ige\n";
    for (const auto& s : series.samples) text += num(s.tau) + "," + num(s.volume) + "," + num(s.entropy) + "\n";
    out << text;
}

void write_growth_csv(std::ostream& out, const GrowthClassification& g) {
    out << "law,coefficient,intercept,residual_linear,residual_log\n"
        << to_string(g.law) << "," << num(g.coefficient) << "," << num(g.intercept) << "," << num(g.residual_linear)
        << "," << num(g.residual_log) << "\n";
}

json to_json(const GrowthClassification& g) {
    return {{"law", std::string(to_string(g.law))},
            {"coefficient", g.coefficient},
            {"intercept", g.intercept},
            {"residual_linear", g.residual_linear},
            {"residual_log", g.residual_log},
            {"slope_linear", g.slope_linear},
            {"slope_log", g.slope_log}};
}

json to_json(const DivergenceClassification& d) {
    return {{"law", std::string(to_string(d.law))},
            {"rate", d.exponential.rate},
            {"amplitude", d.exponential.amplitude},
            {"residual", d.exponential.residual},
            {"power_exponent", d.power_exponent},
            {"power_residual", d.power_residual}};
}

json to_json(const CurvatureReport& report, const std::vector<std::string>& names) {
    const int n = static_cast<int>(report.point.size());
    json gamma = json::array();
    json riemann = json::array();
    for (int a = 0; a < n; ++a) {
        json ga = json::array();
        json ra = json::array();
        for (int b = 0; b < n; ++b) {
            json gb = json::array();
            json rb = json::array();
            for (int c = 0; c < n; ++c) {
                gb.push_back(report.christoffel(a, b, c));
                json rc = json::array();
                for (int d = 0; d < n; ++d) rc.push_back(report.riemann(a, b, c, d));
                rb.push_back(rc);
            }
            ga.push_back(gb);
            ra.push_back(rb);
        }
        gamma.push_back(ga);
        riemann.push_back(ra);
    }
    return {{"coordinates", names},
            {"point", vector_json(report.point)},
            {"christoffel", gamma},
            {"riemann", riemann},
            {"ricci", matrix_json(report.ricci)},
            {"scalar", report.scalar},
            {"sectional", matrix_json(report.sectional)}};
}

json to_json(const ExperimentReport& report) {
    json out;
    out["model"] = report.model;
    out["config"] = to_json(report.config);
    out["coordinates"] = report.coordinate_names;
    out["scalar_curvature"] = report.scalar_curvature ? json(*report.scalar_curvature) : json(nullptr);
    out["geodesic"] = {{"samples", report.geodesic.samples.size()},
                       {"tolerance", report.geodesic.tolerance},
                       {"max_speed_drift", report.geodesic.max_speed_drift()}};
    out["ige"] = to_json(report.ige.growth);
    out["classification"] = out["ige"];
    if (report.jacobi) out["jacobi"] = to_json(report.jacobi->divergence);
    if (report.ensemble) {
        json members = json::array();
        for (const auto& m : report.ensemble->members) {
            members.push_back({{"index", m.index},
                               {"seed", m.seed},
                               {"omegas", m.omegas},
                               {"lambda_sum", m.lambda_sum},
                               {"lambda_hat", m.lambda_hat},
                               {"law", std::string(to_string(m.law))}});
        }
        out["ensemble"] = {{"members", members},
                           {"mean_lambda_hat", report.ensemble->mean_lambda_hat},
                           {"mean_error", report.ensemble->mean_error},
                           {"std_error", report.ensemble->std_error}};
    }
    if (report.crosscheck) {
        out["crosscheck"] = {{"phi_bound", report.crosscheck->phi_bound},
                             {"max_relative_deviation", report.crosscheck->max_relative_deviation},
                             {"tau_reached", report.crosscheck->tau_reached},
                             {"samples_compared", report.crosscheck->samples_compared}};
    }
    return out;
}

json error_json(const std::exception& error) {
    json body = {{"kind", "internal"}, {"message", error.what()}};
    if (const auto* e = dynamic_cast<const Error*>(&error)) {
        body["kind"] = e->kind();
        body["category"] = dynamic_cast<const ConfigError*>(e) ? "config" : "numerical";
    }
    if (const auto* e = dynamic_cast<const DomainExitError*>(&error)) {
        body["last_valid_tau"] = e->last_valid_tau();
        body["last_valid_state"] = e->last_valid_state();
    }
    if (const auto* e = dynamic_cast<const StiffnessError*>(&error)) {
        body["tau"] = e->tau();
        body["step"] = e->step();
    }
    if (const auto* e = dynamic_cast<const OracleFailure*>(&error)) {
        body["previous"] = e->previous();
        body["current"] = e->current();
    }
    return {{"error", body}};
}

void write_experiment(const std::filesystem::path& dir, const ExperimentReport& report) {
    std::filesystem::create_directories(dir);
    std::ostringstream geodesic, ige, jacobi;
    write_geodesic_csv(geodesic, report.geodesic);
    write_ige_csv(ige, report.ige);
    write_file(dir / "report.json", to_json(report).dump(2) + "\n");
    write_file(dir / "geodesic.csv", geodesic.str());
    write_file(dir / "ige.csv", ige.str());
    if (report.jacobi) {
        write_jacobi_csv(jacobi, report.jacobi->series);
        write_file(dir / "jacobi.csv", jacobi.str());
    }
}

}  // namespace igac::cli
