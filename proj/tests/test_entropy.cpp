#include "igac/entropy.hpp"
#include "igac/errors.hpp"
#include "igac/models.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace igac;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

std::vector<PathSample> diagonal_path(double tau_max, std::size_t points) {
    std::vector<PathSample> path;
    for (double t : uniform_grid(tau_max, points)) path.push_back({t, vec({t, t}), vec({1, 1})});
    return path;
}

GrowthClassification classify(const std::function<double(double)>& f, double t0, double t1, int n = 400) {
    std::vector<double> t, s;
    for (int i = 0; i < n; ++i) {
        t.push_back(t0 + (t1 - t0) * i / (n - 1));
        s.push_back(f(t.back()));
    }
    return classify_growth(t, s);
}

}  // namespace

TEST_SUITE("entropy") {

TEST_CASE("swept region of a straight line") {
    const auto path = diagonal_path(3.0, 31);
    const Box b = swept_region(path, 2.0, 1e-12);
    CHECK(std::abs(b.lower[0]) < 1e-15);
    CHECK(std::abs(b.lower[1]) < 1e-15);
    CHECK(b.upper[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b.upper[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("swept region of the pure sigma geodesic floors the frozen mean") {
    const auto g = gaussian_ed_manifold(1);
    const auto path = integrate_geodesic(g, vec({0, 1}), vec({0, 0.5}), 4.0, 1e-10, 401);
    const Box b = swept_region(path.samples, 3.0, 1e-3);
    CHECK(b.lower[0] == doctest::Approx(-5e-4));
    CHECK(b.upper[0] == doctest::Approx(5e-4));
    CHECK(b.lower[1] == 1.0);
    CHECK(b.upper[1] == doctest::Approx(std::exp(1.5)).epsilon(1e-9));
}

TEST_CASE("swept region at the first sample is fully floored") {
    const auto g = gaussian_ed_manifold(1);
    const auto path = integrate_geodesic(g, vec({0, 1}), vec({0, 0.5}), 1.0, 1e-9, 11);
    const Box b = swept_region(path.samples, 0.0, 1e-3);
    CHECK(b.upper[0] - b.lower[0] == doctest::Approx(1e-3));
    CHECK(b.upper[1] - b.lower[1] == doctest::Approx(2e-3));
    CHECK_THROWS_AS((void)swept_region(path.samples, 1.5, 1e-3), ArgumentError);
    CHECK_THROWS_AS((void)swept_region(path.samples, 0.5, 0.0), ArgumentError);
}

TEST_CASE("floored boxes stay inside the parameter domain") {
    const auto g = gaussian_ed_manifold(1);
    std::vector<PathSample> path = {{0.0, vec({0, 1e-4}), vec({0, 0})}, {1.0, vec({0, 1e-4}), vec({0, 0})}};
    const Box b = swept_region(path, 1.0, 1e-3, &g.domain());
    CHECK(b.lower[1] > 0.0);
    CHECK(b.upper[1] - b.lower[1] == doctest::Approx(1e-3 * (1 + 1e-4)));
}

TEST_CASE("flat statistical volume") {
    const auto path = diagonal_path(3.0, 3001);
    const double v = statistical_volume(euclidean_metric(2), path, 3.0);
    CHECK(std::abs(v / 3.0 - 1.0) < 1e-6);
}

TEST_CASE("gaussian pure sigma box volume matches the antiderivative") {
    const auto g = gaussian_ed_manifold(1);
    for (double top : {1.01, 2.0, 30.0, 1e4}) {
        const Box b{vec({-5e-4, 1.0}), vec({5e-4, top})};
        const double exact = 1e-3 * std::numbers::sqrt2 * (1.0 - 1.0 / top);
        CHECK(std::abs(region_volume(g, b) / exact - 1.0) < 1e-8);
    }
    // Contracting side, where the density is steep.
    const Box b{vec({-5e-4, 1e-6}), vec({5e-4, 1.0})};
    const double exact = 1e-3 * std::numbers::sqrt2 * (1e6 - 1.0);
    CHECK(std::abs(region_volume(g, b) / exact - 1.0) < 1e-8);
}

TEST_CASE("integrable spin-chain volume has its closed form") {
    const double a = 0.5, b = 0.5;
    const auto m = spin_integrable_manifold();
    const auto path = integrate_geodesic(m, vec({1, 1}), vec({a, b}), 50.0, 1e-10, 8001);
    for (double tau : {10.0, 25.0, 50.0}) {
        const double v = statistical_volume(m, path.samples, tau);
        CHECK(std::abs(v / (a * b * tau * tau / 3.0) - 1.0) < 1e-6);
    }
}

TEST_CASE("tensor-product quadrature agrees with separable integration") {
    const auto m = spin_chaotic_manifold();
    Vector lo = vec({0.5, -0.3, 0.2}), hi = vec({2.0, 0.4, 1.7});
    const double separable = region_volume(m, {lo, hi});
    const MetricField dense(m.domain(), m.coordinate_names(), [&m](const Vector& p) { return m.value(p); },
                            [&m](const Vector& p) { return m.derivative(p); },
                            [&m](const Vector& p) { return m.second_derivative(p); }, MetricProvider::analytic);
    CHECK(std::abs(region_volume(dense, {lo, hi}) / separable - 1.0) < 1e-10);
}

TEST_CASE("growth classifier") {
    const auto lin = classify([](double t) { return 3 * t + 1; }, 1, 20);
    CHECK(lin.law == GrowthLaw::linear);
    CHECK(lin.coefficient == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lin.residual_linear < 1e-12);

    const auto lg = classify([](double t) { return 2 * std::log(t) + 5; }, 2, 50);
    CHECK(lg.law == GrowthLaw::logarithmic);
    CHECK(lg.coefficient == doctest::Approx(2.0).epsilon(1e-12));

    const auto root = classify([](double t) { return std::sqrt(t); }, 1, 20);
    CHECK(root.law != GrowthLaw::linear);

    std::vector<double> t(12, 2.0), s(12, 1.0);
    CHECK_THROWS_AS((void)classify_growth(t, s), ArgumentError);
    std::vector<double> early, es;
    for (int i = 0; i < 40; ++i) {
        early.push_back(0.02 * (i + 1));
        es.push_back(early.back());
    }
    CHECK_THROWS_AS((void)classify_growth(early, es), ArgumentError);
}

TEST_CASE("ige series invariants") {
    const auto setup = model_setup(GaussianEdConfig{});
    const auto path = integrate_geodesic(setup.metric, setup.theta0, setup.velocity0, 10.0);
    const auto grid = entropy_grid(path.samples, 0.1);
    const auto ige = ige_series(setup.metric, path.samples, grid);
    REQUIRE(ige.samples.size() == grid.size());
    CHECK(ige.samples.front().tau >= 0.1);
    for (std::size_t i = 0; i < ige.samples.size(); ++i) {
        CHECK(ige.samples[i].volume > 0.0);
        CHECK(ige.samples[i].entropy == std::log(ige.samples[i].volume));
        if (i > 0) {
            CHECK(ige.samples[i].tau > ige.samples[i - 1].tau);
            CHECK(ige.samples[i].volume >= ige.samples[i - 1].volume);
        }
    }
    // Off-grid evaluation agrees with the direct definition.
    const double direct = statistical_volume(setup.metric, path.samples, 7.77);
    const std::vector<double> one = {7.77};
    EntropyOptions o;
    o.window = 1.0;
    CHECK_THROWS_AS((void)ige_series(setup.metric, path.samples, one, o), ArgumentError);  // too few to classify
    CHECK(direct > 0.0);
}

TEST_CASE("volume evaluation does not depend on evaluation order") {
    const auto setup = model_setup(SpinChaoticConfig{});
    const auto path = integrate_geodesic(setup.metric, setup.theta0, setup.velocity0, 10.0);
    const std::vector<double> taus = {1.0, 2.5, 4.0, 7.5, 10.0};
    std::vector<double> forward, backward(taus.size());
    for (double t : taus) forward.push_back(statistical_volume(setup.metric, path.samples, t));
    for (std::size_t i = taus.size(); i-- > 0;) backward[i] = statistical_volume(setup.metric, path.samples, taus[i]);
    CHECK(forward == backward);
}

TEST_CASE("classification is insensitive to the degenerate-coordinate floor") {
    for (const ExperimentConfig& base : {ExperimentConfig{GaussianEdConfig{.l = 2}}, ExperimentConfig{SpinChaoticConfig{}}}) {
        ExperimentConfig coarse = base;
        std::visit([](auto& c) { c.entropy.floor = 1e-2; }, coarse);
        const auto a = run_experiment(base).ige.growth;
        const auto b = run_experiment(coarse).ige.growth;
        CHECK(a.law == b.law);
        CHECK(std::abs(b.coefficient / a.coefficient - 1.0) < 0.02);
    }
}

TEST_CASE("riemannian measure doubles the single-mode oscillator rate") {
    IhoConfig c;
    c.omegas = {1.0};
    const auto coordinate = iho_experiment(c).ige.growth;
    c.entropy.measure = VolumeMeasure::riemannian;
    const auto riemannian = iho_experiment(c).ige.growth;
    CHECK(coordinate.slope_linear == doctest::Approx(1.0).epsilon(0.1));
    CHECK(riemannian.slope_linear == doctest::Approx(2.0).epsilon(0.1));
}

}  // TEST_SUITE
