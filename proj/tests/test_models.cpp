#include "igac/curvature.hpp"
#include "igac/errors.hpp"
#include "igac/models.hpp"
#include "igac/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace igac;

namespace {

std::string config_error_message(const ExperimentConfig& c) {
    try {
        validate(c);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("gaussian experiment, single degree of freedom") {
    const auto r = gaussian_ed_experiment({.l = 1, .c = 0.5});
    CHECK(r.model == "gaussian_ed");
    REQUIRE(r.scalar_curvature);
    CHECK(*r.scalar_curvature == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.ige.growth.law == GrowthLaw::linear);
    CHECK(r.ige.growth.coefficient == doctest::Approx(0.5).epsilon(0.1));
    REQUIRE(r.jacobi);
    CHECK(r.jacobi->divergence.law == DivergenceLaw::exponential);
    CHECK(r.jacobi->divergence.exponential.rate == doctest::Approx(0.5).epsilon(0.15));
    CHECK(r.geodesic.max_speed_drift() < 1e-6);
}

TEST_CASE("gaussian experiment scales with the number of degrees of freedom") {
    std::vector<ExperimentReport> reports;
    for (int l = 1; l <= 4; ++l) reports.push_back(gaussian_ed_experiment({.l = l, .c = 0.5}));
    const double base = reports[0].ige.growth.coefficient;
    CHECK(*reports[2].scalar_curvature == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(reports[1].ige.growth.coefficient / base == doctest::Approx(2.0).epsilon(0.1));
    CHECK(reports[2].ige.growth.coefficient / base == doctest::Approx(3.0).epsilon(0.1));
    for (int l = 1; l <= 4; ++l) {
        const auto& r = reports[std::size_t(l - 1)];
        const double ige_rate = r.ige.growth.coefficient / l;
        const double jacobi_rate = r.jacobi->divergence.exponential.rate;
        CHECK(ige_rate > 0.0);
        CHECK(jacobi_rate > 0.0);
        CHECK(ige_rate == doctest::Approx(0.5).epsilon(0.15));
        CHECK(jacobi_rate == doctest::Approx(0.5).epsilon(0.15));
        if (l > 1) {
            CHECK(r.jacobi->divergence.exponential.amplitude >
                  reports[std::size_t(l - 2)].jacobi->divergence.exponential.amplitude);
        }
    }
}

TEST_CASE("gaussian experiment configuration checks") {
    CHECK(config_error_message(GaussianEdConfig{.l = 0}).starts_with("l:"));
    CHECK(config_error_message(GaussianEdConfig{.l = 5}).starts_with("l:"));
    CHECK(config_error_message(GaussianEdConfig{.c = 0.0}).starts_with("c:"));
    CHECK(config_error_message(GaussianEdConfig{.c = 2.5}).starts_with("c:"));
    CHECK(config_error_message(GaussianEdConfig{.sigma0 = -1.0}).starts_with("initial.sigma:"));
    CHECK(config_error_message(GaussianEdConfig{.integration = {.tol = 1e-2}}).starts_with("tol:"));
    CHECK(config_error_message(GaussianEdConfig{}).empty());
    CHECK_THROWS_AS((void)gaussian_ed_experiment({.l = 9}), ConfigError);
}

TEST_CASE("deterministic oscillator spectra recover the sum of frequencies") {
    for (const std::vector<double>& omegas : {std::vector<double>{1.0}, std::vector<double>{0.5, 1.0, 1.5},
                                               std::vector<double>{0.8, 1.2}}) {
        IhoConfig c;
        c.l = static_cast<int>(omegas.size());
        c.omegas = omegas;
        const auto r = iho_experiment(c);
        REQUIRE(r.ensemble);
        const auto& m = r.ensemble->members.front();
        CHECK(m.omegas == omegas);
        CHECK(m.lambda_hat == doctest::Approx(m.lambda_sum).epsilon(0.1));
        CHECK(r.ige.growth.law == GrowthLaw::linear);
    }
}

TEST_CASE("oscillator fit converges with the integration horizon") {
    IhoConfig c;
    c.integration.tau_max = 20.0;
    const double short_error = std::abs(iho_experiment(c).ensemble->mean_error);
    c.integration.tau_max = 40.0;
    const double long_error = std::abs(iho_experiment(c).ensemble->mean_error);
    CHECK(long_error < short_error);
}

TEST_CASE("gaussian frequency ensemble") {
    IhoConfig c;
    c.l = 2;
    c.omega_std = 0.1;
    c.members = 64;
    c.seed = 12345;
    const auto r = iho_experiment(c);
    REQUIRE(r.ensemble);
    REQUIRE(r.ensemble->members.size() == 64);
    CHECK(std::abs(r.ensemble->mean_error) < 0.1);
    bool spread = false;
    for (std::size_t k = 0; k < 64; ++k) {
        const auto& m = r.ensemble->members[k];
        CHECK(m.index == static_cast<int>(k));
        CHECK(m.seed == (12345ULL ^ (k * 0x9E3779B97F4A7C15ULL)));
        for (double w : m.omegas) CHECK(w > 0.0);
        spread = spread || m.omegas != r.ensemble->members[0].omegas;
    }
    CHECK(spread);

    // Member k depends only on (seed, k): a smaller ensemble is a prefix.
    c.members = 5;
    const auto small = iho_experiment(c);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(small.ensemble->members[k].omegas == r.ensemble->members[k].omegas);
        CHECK(small.ensemble->members[k].lambda_hat == r.ensemble->members[k].lambda_hat);
    }
}

TEST_CASE("frequency draws that never turn positive are a configuration error") {
    IhoConfig c;
    c.omega_mean = -50.0;
    c.omega_std = 1.0;
    CHECK_THROWS_AS((void)draw_frequencies(c, 0), ConfigError);
    CHECK(config_error_message(IhoConfig{.omega_mean = 1.0, .omega_std = 0.4}).starts_with("omega_std:"));
}

TEST_CASE("counter-based generator") {
    CounterRng a(member_seed(7, 3)), b(member_seed(7, 3));
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    CounterRng c(1);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = c.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
    CHECK(CounterRng(5).at(10) == CounterRng(5).at(10));
}

TEST_CASE("raw conformal geodesics track the oscillator dynamics") {
    for (const std::vector<double>& omegas : {std::vector<double>{1.0}, std::vector<double>{0.5, 1.0, 1.5}}) {
        const auto cc = oscillator_crosscheck(omegas, 0.1);
        CHECK(cc.samples_compared > 10);
        CHECK(cc.tau_reached > 0.1);
        CHECK(cc.max_relative_deviation < 0.05);
    }
}

TEST_CASE("integrable spin chain") {
    const auto r = spin_chain_integrable_experiment({.a = 0.5, .b = 0.5});
    CHECK(r.ige.growth.law == GrowthLaw::logarithmic);
    CHECK(std::abs(*r.scalar_curvature) < 1e-8);
    for (const auto& s : r.geodesic.samples) {
        CHECK(s.theta[0] == doctest::Approx(std::exp(0.5 * s.tau)).epsilon(1e-7));
        CHECK(s.theta[1] == doctest::Approx(std::exp(0.5 * s.tau)).epsilon(1e-7));
    }
    CHECK(config_error_message(SpinIntegrableConfig{.a = 0.0}).starts_with("a:"));
    CHECK(config_error_message(SpinIntegrableConfig{.b = -1.0}).starts_with("b:"));
}

TEST_CASE("chaotic spin chain") {
    const auto r = spin_chain_chaotic_experiment({.c = 0.5});
    CHECK(r.ige.growth.law == GrowthLaw::linear);
    CHECK(*r.scalar_curvature == doctest::Approx(-1.0).epsilon(1e-6));
    const auto m = spin_chaotic_manifold();
    const Matrix g = m.value((Vector(3) << 1.0, 0.0, 1.0).finished());
    CHECK(g.diagonal()[0] == 4.0);
    CHECK(g.diagonal()[1] == 1.0);
    CHECK(g.diagonal()[2] == 2.0);
    CHECK((g - Matrix(g.diagonal().asDiagonal())).isZero(0.0));
    CHECK(config_error_message(SpinChaoticConfig{.c = 0.0}).starts_with("c:"));
}

TEST_CASE("integrable and chaotic chains are told apart with shared settings") {
    EntropyOptions shared;
    const auto integrable = spin_chain_integrable_experiment({.entropy = shared});
    const auto chaotic = spin_chain_chaotic_experiment({.entropy = shared});
    const auto& a = integrable.ige.growth;
    const auto& b = chaotic.ige.growth;
    CHECK(a.law == GrowthLaw::logarithmic);
    CHECK(b.law == GrowthLaw::linear);
    CHECK(a.residual_linear >= 1.5 * a.residual_log);
    CHECK(b.residual_log >= 1.5 * b.residual_linear);
}

TEST_CASE("experiment deviation is a stacked per-factor unit vector") {
    const auto setup = model_setup(GaussianEdConfig{.l = 3});
    const auto factors = model_factors(GaussianEdConfig{.l = 3});
    const Vector d = experiment_deviation(factors, setup.theta0, setup.velocity0);
    CHECK(setup.metric.norm(setup.theta0, d) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(setup.metric.inner(setup.theta0, d, setup.velocity0)) < 1e-14);
}

}  // TEST_SUITE
