#include "igac/cli/app.hpp"
#include "igac/cli/config.hpp"
#include "igac/cli/output.hpp"
#include "igac/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path configs = fs::path(IGAC_SOURCE_DIR) / "configs";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = igac::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("igac_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& doc) {
    const fs::path p = dir / name;
    std::ofstream(p) << doc.dump();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("curvature of the three-factor gaussian manifold") {
    const auto r = invoke({"curvature", "--config", (configs / "gauss_l3.json").string(), "--point", "default"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc.at("scalar").get<double>() == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(doc.at("point").size() == 6);
    CHECK(doc.at("sectional").size() == 6);
}

TEST_CASE("metric of the wigner-dyson family") {
    const auto r = invoke({"metric", "--config", (configs / "wd.json").string(), "--point", "mu=1"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc.at("g") == json::parse("[[4.0]]"));
    const auto q = invoke({"metric", "--config", (configs / "wd.json").string(), "--point", "2", "--quadrature"});
    REQUIRE(q.code == 0);
    CHECK(json::parse(q.out).at("g_quadrature")[0][0].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ige stage reports the fitted law") {
    const auto r = invoke({"ige", "--config", (configs / "spin_integrable.json").string()});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header.starts_with("law,"));
    CHECK(row.starts_with("logarithmic,"));

    const auto series = invoke({"ige", "--config", (configs / "spin_integrable.json").string(), "--series"});
    CHECK(series.out.starts_with("tau,volume,ige\n"));
}

TEST_CASE("geodesic and jacobi stages emit their csv schemas") {
    const auto g = invoke({"geodesic", "--config", (configs / "gaussian_ed.json").string(), "--tau-max", "2"});
    REQUIRE(g.code == 0);
    CHECK(g.out.starts_with("tau,theta_0,theta_1,thetadot_0,thetadot_1,speed\n"));
    const auto j = invoke({"jacobi", "--config", (configs / "gaussian_ed.json").string(), "--tau-max", "2"});
    REQUIRE(j.code == 0);
    CHECK(j.out.starts_with("tau,j_0,j_1,intensity\n"));
    CHECK(j.out.find('\r') == std::string::npos);

    // Family configs need an explicit velocity.
    const auto missing = invoke({"geodesic", "--config", (configs / "wd.json").string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("velocity") != std::string::npos);
    const auto flat = invoke({"geodesic", "--config", (configs / "wd.json").string(), "--velocity", "0.5",
                            "--tau-max", "1"});
    CHECK(flat.code == 0);
}

TEST_CASE("csv values round-trip exactly") {
    const auto g = invoke({"geodesic", "--config", (configs / "spin_chaotic.json").string(), "--tau-max", "3"});
    REQUIRE(g.code == 0);
    std::istringstream lines(g.out);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    std::getline(lines, line);
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
        const double v = std::strtod(cell.c_str(), nullptr);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        CHECK(cell == buf);
    }
}

TEST_CASE("full experiment writes four files") {
    const auto dir = scratch("run");
    const auto r = invoke({"run", (configs / "gaussian_ed.json").string(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const fs::path out = dir / "gaussian_ed_seed0";
    for (const char* f : {"report.json", "geodesic.csv", "jacobi.csv", "ige.csv"}) CHECK(fs::exists(out / f));
    const auto report = json::parse(slurp(out / "report.json"));
    CHECK(report.at("classification").at("law") == "linear");
    CHECK(report.at("jacobi").at("law") == "exponential");
    CHECK(report.at("config").at("c") == 0.5);
    CHECK(slurp(out / "ige.csv").starts_with("tau,volume,ige\n"));
}

TEST_CASE("output directory can be overridden from the environment") {
    const auto dir = scratch("env");
    ::setenv("IGAC_OUTPUT_DIR", dir.string().c_str(), 1);
    const auto r = invoke({"experiment", "--config", (configs / "spin_chaotic.json").string()});
    ::unsetenv("IGAC_OUTPUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "spin_chaotic_seed0" / "report.json"));
}

TEST_CASE("configuration errors exit with status 1 and name the field") {
    const auto dir = scratch("bad");
    const auto negative = write_config(dir, "neg.json", {{"model", "gaussian_ed"}, {"initial", {{"sigma", -1.0}}}});
    const auto r = invoke({"run", negative.string(), "--out", dir.string()});
    CHECK(r.code == 1);
    const auto err = json::parse(r.err);
    CHECK(err.at("error").at("message").get<std::string>().starts_with("initial.sigma:"));

    const auto typo = write_config(dir, "typo.json", {{"model", "spin_chaotic"}, {"entropy", {{"flor", 0.1}}}});
    CHECK(json::parse(invoke({"run", typo.string()}).err).at("error").at("message").get<std::string>().starts_with(
        "entropy.flor:"));

    const auto wrong_type = write_config(dir, "type.json", {{"model", "iho"}, {"members", "many"}});
    const auto t = invoke({"run", wrong_type.string()});
    CHECK(t.code == 1);
    CHECK(t.err.find("members") != std::string::npos);

    CHECK(invoke({"run", (dir / "missing.json").string()}).code == 1);
    CHECK(invoke({"metric", "--config", (configs / "wd.json").string(), "--point", "mu=-1"}).code == 1);
    CHECK(invoke({"metric", "--config", (configs / "wd.json").string(), "--point", "nu=1"}).code == 1);
}

TEST_CASE("numerical failures exit with status 2 and report the last valid state") {
    const auto dir = scratch("collapse");
    const auto cfg = write_config(dir, "collapse.json", {{"model", "gaussian_ed"}, {"c", 2.0}, {"tau_max", 500.0}});
    const auto r = invoke({"run", cfg.string(), "--out", dir.string()});
    CHECK(r.code == 2);
    const auto err = json::parse(r.err).at("error");
    CHECK(err.at("kind") == "domain_exit");
    CHECK(err.at("last_valid_tau").get<double>() > 50.0);
    CHECK(err.at("last_valid_tau").get<double>() < 500.0);
    CHECK(err.at("last_valid_state").size() == 8);
}

TEST_CASE("unknown subcommands print usage and exit 64") {
    const auto r = invoke({"plot"});
    CHECK(r.code == 64);
    CHECK(r.err.find("usage:") != std::string::npos);
    CHECK(invoke({}).code == 64);
    CHECK(invoke({"metric"}).code == 64);  // missing --config
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("point syntax") {
    using igac::cli::parse_point;
    const igac::Vector base = (igac::Vector(2) << 0.0, 1.0).finished();
    const std::vector<std::string> names = {"mu", "sigma"};
    CHECK(parse_point("default", names, base) == base);
    CHECK(parse_point("sigma=2", names, base) == (igac::Vector(2) << 0.0, 2.0).finished());
    CHECK(parse_point("3,4", names, base) == (igac::Vector(2) << 3.0, 4.0).finished());
    CHECK_THROWS_AS((void)parse_point("3", names, base), igac::ConfigError);
    CHECK_THROWS_AS((void)parse_point("mu=x", names, base), igac::ConfigError);
}

TEST_CASE("shipped configs parse and round-trip through json") {
    for (const char* name : {"gaussian_ed.json", "iho.json", "spin_integrable.json", "spin_chaotic.json"}) {
        const auto doc = igac::cli::load_json(configs / name);
        const auto parsed = igac::cli::parse_run_config(doc);
        const auto again = igac::cli::parse_run_config(igac::cli::to_json(parsed));
        CHECK(igac::cli::to_json(again) == igac::cli::to_json(parsed));
    }
}

TEST_CASE("outputs are byte-identical across repeated and concurrent runs") {
    const auto dir = scratch("determinism");
    const std::vector<std::string> models = {"iho.json", "gaussian_ed.json"};
    for (const auto& model : models) {
        std::vector<fs::path> roots = {dir / (model + "a"), dir / (model + "b"), dir / (model + "c")};
        CHECK(invoke({"run", (configs / model).string(), "--out", roots[0].string()}).code == 0);
        std::thread t1([&] { (void)invoke({"run", (configs / model).string(), "--out", roots[1].string()}); });
        std::thread t2([&] { (void)invoke({"run", (configs / model).string(), "--out", roots[2].string()}); });
        t1.join();
        t2.join();
        for (const auto& entry : fs::recursive_directory_iterator(roots[0])) {
            if (!entry.is_regular_file()) continue;
            const auto rel = fs::relative(entry.path(), roots[0]);
            const std::string reference = slurp(entry.path());
            CHECK(!reference.empty());
            CHECK(slurp(roots[1] / rel) == reference);
            CHECK(slurp(roots[2] / rel) == reference);
        }
    }
}

}  // TEST_SUITE
