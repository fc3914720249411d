#include "igac/errors.hpp"
#include "igac/manifold.hpp"
#include "igac/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace igac;

namespace {

double integrate_density(const ParametricFamily& f, const Vector& theta, double moment = 0.0) {
    auto integrand = [&](double x) { return std::pow(x, moment) * std::exp(f.log_density(x, theta)); };
    if (f.kind == FamilyKind::gaussian) {
        const double lo = theta[0] - 12 * theta[1], hi = theta[0] + 12 * theta[1];
        return quad::integrate_graded(integrand, lo, hi);
    }
    return quad::integrate_graded(integrand, 0.0, 40.0 * theta[0]);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("families are normalized over their parameter domain") {
    for (const char* name : {"gaussian", "exponential", "poisson_spacing", "wigner_dyson"}) {
        const auto f = make_family(name);
        for (double scale : {0.3, 1.0, 4.0}) {
            Vector theta = f.point;
            theta[theta.size() - 1] = scale;
            CHECK(integrate_density(f, theta) == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("standard gaussian integrates to one") {
    const auto f = make_family("gaussian", {{"mu", 0.0}, {"sigma", 1.0}});
    CHECK(std::abs(integrate_density(f, f.point) - 1.0) < 1e-8);
}

TEST_CASE("wigner-dyson mean spacing equals mu") {
    const auto f = make_family("wigner_dyson", {{"mu", 1.0}});
    CHECK(std::abs(integrate_density(f, f.point, 1.0) - 1.0) < 1e-6);
    const auto g = make_family("wigner_dyson", {{"mu", 2.5}});
    CHECK(std::abs(integrate_density(g, g.point, 1.0) - 2.5) < 1e-6);
}

TEST_CASE("exponential density at its mean") {
    const auto f = make_family("exponential", {{"mu", 2.0}});
    CHECK(std::exp(f.log_density(2.0, f.point)) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(std::exp(f.log_density(2.0, f.point)) == doctest::Approx(0.18394).epsilon(1e-4));
}

TEST_CASE("poisson spacing shares the exponential form") {
    const auto p = make_family("poisson_spacing", {{"mu", 1.7}});
    const auto e = make_family("exponential", {{"mu", 1.7}});
    for (double x : {0.01, 0.5, 3.0, 12.0}) CHECK(p.log_density(x, p.point) == e.log_density(x, e.point));
}

TEST_CASE("parameter domains") {
    const auto g = make_family("gaussian");
    CHECK(g.param_domain[0].lower == -INFINITY);
    CHECK(g.param_domain[0].upper == INFINITY);
    CHECK(g.param_domain[1].lower == 0.0);
    CHECK(g.param_domain[1].upper == INFINITY);
    CHECK_FALSE(g.in_domain(Vector::Zero(2)));
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS((void)make_family("cauchy"), UnsupportedFamilyError);
    CHECK_THROWS_AS((void)make_family("gaussian", {{"sigma", -1.0}}), DomainError);
    CHECK_THROWS_AS((void)make_family("gaussian", {{"sigma", 0.0}}), DomainError);
    CHECK_THROWS_AS((void)make_family("wigner_dyson", {{"mu", 0.0}}), DomainError);
    CHECK_THROWS_AS((void)make_family("exponential", {{"lambda", 1.0}}), ArgumentError);
}

TEST_CASE("closed-form metric values") {
    const auto g = fisher_metric_analytic(make_family("gaussian"));
    Vector p(2);
    p << 0.0, 2.0;
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 0.25;
    expect(1, 1) = 0.5;
    CHECK(max_abs(g.value(p) - expect) < 1e-15);

    const auto wd = fisher_metric_analytic(make_family("wigner_dyson"));
    CHECK(wd.value(Vector::Constant(1, 1.0))(0, 0) == 4.0);
    const auto ex = fisher_metric_analytic(make_family("exponential"));
    CHECK(ex.value(Vector::Constant(1, 2.0))(0, 0) == 0.25);
}

TEST_CASE("quadrature oracle reproduces the closed forms") {
    Vector p(2);
    p << 0.0, 1.0;
    const auto gauss = make_family("gaussian");
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 1.0;
    expect(1, 1) = 2.0;
    CHECK(max_abs(fisher_metric_numeric(gauss, p) - expect) < 1e-6);

    const auto wd = make_family("wigner_dyson");
    CHECK(std::abs(fisher_metric_numeric(wd, Vector::Constant(1, 1.0))(0, 0) - 4.0) < 1e-5);
    const auto ps = make_family("poisson_spacing");
    CHECK(std::abs(fisher_metric_numeric(ps, Vector::Constant(1, 3.0))(0, 0) - 1.0 / 9.0) < 1e-6);
}

TEST_CASE("quadrature oracle fails loudly when refinement cannot converge") {
    FisherQuadrature q;
    q.max_nodes = q.initial_nodes;  // no room for a second estimate
    q.tolerance = 0.0;
    CHECK_THROWS_AS((void)fisher_metric_numeric(make_family("gaussian"), make_family("gaussian").point, q),
                    OracleFailure);
}

TEST_CASE("metric values are symmetric positive definite") {
    for (const char* name : {"gaussian", "exponential", "poisson_spacing", "wigner_dyson"}) {
        const auto f = make_family(name);
        const auto m = fisher_metric_analytic(f);
        for (double s : {0.05, 0.7, 3.0, 40.0}) {
            Vector p = f.point;
            p[p.size() - 1] = s;
            const Matrix g = m.value(p);
            CHECK(max_abs(g - g.transpose()) == 0.0);
            CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("analytic derivatives agree with finite differences") {
    for (const char* name : {"gaussian", "exponential", "wigner_dyson"}) {
        const auto m = fisher_metric_analytic(make_family(name));
        const auto fd = with_finite_differences(m);
        CHECK(fd.provider() == MetricProvider::finite_difference);
        Vector p = make_family(name).point;
        p[p.size() - 1] = 1.3;
        const Tensor3 a = m.derivative(p), b = fd.derivative(p);
        const Tensor4 a2 = m.second_derivative(p), b2 = fd.second_derivative(p);
        double scale = 0.0, diff = 0.0, scale2 = 0.0, diff2 = 0.0;
        for (std::size_t i = 0; i < a.data().size(); ++i) {
            scale = std::max(scale, std::abs(a.data()[i]));
            diff = std::max(diff, std::abs(a.data()[i] - b.data()[i]));
        }
        for (std::size_t i = 0; i < a2.data().size(); ++i) {
            scale2 = std::max(scale2, std::abs(a2.data()[i]));
            diff2 = std::max(diff2, std::abs(a2.data()[i] - b2.data()[i]));
        }
        CHECK(diff / scale < 1e-5);
        CHECK(diff2 / scale2 < 1e-5);
    }
}

TEST_CASE("gaussian metric is translation invariant in mu") {
    const auto m = fisher_metric_analytic(make_family("gaussian"));
    Vector a(2), b(2);
    a << -7.0, 1.4;
    b << 3.5, 1.4;
    CHECK(max_abs(m.value(a) - m.value(b)) == 0.0);
}

TEST_CASE("product manifolds") {
    const auto g = fisher_metric_analytic(make_family("gaussian"));
    SUBCASE("single factor is returned unchanged") {
        const auto p = product_manifold({g});
        const Vector x = (Vector(2) << 0.3, 0.8).finished();
        CHECK(max_abs(p.value(x) - g.value(x)) == 0.0);
        CHECK(p.coordinate_names() == g.coordinate_names());
    }
    SUBCASE("two gaussians are block diagonal") {
        const auto p = product_manifold({g, g});
        Vector x(4);
        x << 0.0, 1.0, 0.0, 2.0;
        Matrix expect = Matrix::Zero(4, 4);
        expect.diagonal() << 1.0, 2.0, 0.25, 0.5;
        CHECK(max_abs(p.value(x) - expect) < 1e-15);
        const std::vector<std::string> names = {"mu_1", "sigma_1", "mu_2", "sigma_2"};
        CHECK(p.coordinate_names() == names);
        x << 0.4, 1.7, -3.0, 0.6;
        const Matrix v = p.value(x);
        CHECK(v.block(0, 2, 2, 2).isZero(0.0));
        CHECK(v.block(2, 0, 2, 2).isZero(0.0));
    }
    SUBCASE("poisson spacing with an exponential bath") {
        const auto p = product_manifold(
            {fisher_metric_analytic(make_family("poisson_spacing")), fisher_metric_analytic(make_family("exponential"))});
        CHECK(max_abs(p.value(Vector::Ones(2)) - Matrix::Identity(2, 2)) == 0.0);
    }
    SUBCASE("empty factor list") { CHECK_THROWS_AS((void)product_manifold({}), ArgumentError); }
}

TEST_CASE("grouped coordinate order is a permutation of the interleaved one") {
    const auto g = fisher_metric_analytic(make_family("gaussian"));
    const auto inter = product_manifold({g, g});
    const auto perm = grouped_to_interleaved(2);
    const auto grouped = permute_coordinates(inter, perm);
    Vector xi(4), xg(4);
    xi << 0.1, 1.5, -0.2, 0.7;
    for (int i = 0; i < 4; ++i) xg[i] = xi[perm[static_cast<std::size_t>(i)]];
    const Matrix a = inter.value(xi), b = grouped.value(xg);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(b(i, j) == a(perm[std::size_t(i)], perm[std::size_t(j)]));
    CHECK(grouped.coordinate_names()[1] == "mu_2");
}

TEST_CASE("volume density") {
    const auto g = fisher_metric_analytic(make_family("gaussian"));
    const Vector x = (Vector(2) << 0.0, 2.0).finished();
    CHECK(g.volume_density(x) == doctest::Approx(std::numbers::sqrt2 / 4.0).epsilon(1e-14));
    const auto c = conformal_oscillator_metric({1.0, 2.0});
    const Vector y = (Vector(2) << 0.5, 0.5).finished();
    const double phi = oscillator_potential({1.0, 2.0}, y);
    CHECK(phi == doctest::Approx(-0.5 * (0.25 + 4 * 0.25)));
    CHECK(c.volume_density(y) == doctest::Approx(1.0 - phi).epsilon(1e-14));
}

}  // TEST_SUITE
