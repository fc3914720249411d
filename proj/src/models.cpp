#include "igac/models.hpp"

#include "igac/curvature.hpp"
#include "igac/errors.hpp"
#include "igac/ode.hpp"
#include "igac/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace igac {

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ConfigError("config", path + ": " + what);
}

void validate_integration(const IntegrationSettings& s) {
    if (!(s.tau_max > 0.0) || !std::isfinite(s.tau_max)) field_error("tau_max", "must be positive and finite");
    if (!(s.tol >= 1e-12 && s.tol <= 1e-3)) field_error("tol", "must lie in [1e-12, 1e-3]");
    if (s.grid_points < 2) field_error("tau_grid_points", "must be at least 2");
}

void validate_entropy(const EntropyOptions& e, double tau_max) {
    if (!(e.floor > 0.0)) field_error("entropy.floor", "must be positive");
    if (!(e.tau_min > 0.0) || !(e.tau_min < tau_max)) field_error("entropy.tau_min", "must lie in (0, tau_max)");
    if (!(e.window > 0.0 && e.window <= 1.0)) field_error("entropy.window", "must lie in (0, 1]");
    if (!(e.separation >= 1.0)) field_error("entropy.separation", "must be at least 1");
    if (e.quadrature_nodes < 1) field_error("entropy.quadrature_nodes", "must be positive");
}

std::vector<MetricField> gaussian_factors(int l) {
    std::vector<MetricField> factors;
    for (int k = 0; k < l; ++k) factors.push_back(fisher_metric_analytic(make_family("gaussian")));
    return factors;
}

std::vector<MetricField> spin_integrable_factors() {
    return {fisher_metric_analytic(make_family("poisson_spacing")),
            fisher_metric_analytic(make_family("exponential"))};
}

std::vector<MetricField> spin_chaotic_factors() {
    return {fisher_metric_analytic(make_family("wigner_dyson")), fisher_metric_analytic(make_family("gaussian"))};
}

JacobiSummary jacobi_summary(const std::vector<MetricField>& factors, const MetricField& metric,
                             const GeodesicTrajectory& trajectory, double window) {
    const auto& start = trajectory.samples.front();
    const Vector dj0 = experiment_deviation(factors, start.theta, start.velocity);
    JacobiSummary out;
    out.series = integrate_jacobi(metric, trajectory, Vector::Zero(metric.dim()), dj0);
    // intensity(0) = 0 with J0 = 0; fit from the first positive sample on.
    std::vector<double> tau, y;
    for (std::size_t i = 0; i < out.series.samples.size(); ++i) {
        if (out.series.samples[i].tau > 0.0 && out.series.intensity[i] > 0.0) {
            tau.push_back(out.series.samples[i].tau);
            y.push_back(out.series.intensity[i]);
        }
    }
    out.divergence = classify_divergence(tau, y, window);
    return out;
}

ExperimentReport geometric_experiment(std::string model, const ExperimentConfig& config,
                                      const std::vector<MetricField>& factors, const Vector& theta0,
                                      const Vector& velocity0, const IntegrationSettings& integration,
                                      const EntropyOptions& entropy) {
    const MetricField metric = product_manifold(factors);
    ExperimentReport report;
    report.model = std::move(model);
    report.config = config;
    report.coordinate_names = metric.coordinate_names();
    report.scalar_curvature = riemann_ricci_scalar(metric, theta0).scalar;
    report.geodesic = integrate_geodesic(metric, theta0, velocity0, integration.tau_max, integration.tol,
                                         integration.grid_points);
    report.jacobi = jacobi_summary(factors, metric, report.geodesic, entropy.window);
    const auto grid = entropy_grid(report.geodesic.samples, entropy.tau_min);
    report.ige = ige_series(metric, report.geodesic.samples, grid, entropy);
    return report;
}

}  // namespace

std::string model_name(const ExperimentConfig& config) {
    struct Visitor {
        std::string operator()(const GaussianEdConfig&) const { return "gaussian_ed"; }
        std::string operator()(const IhoConfig&) const { return "iho"; }
        std::string operator()(const SpinIntegrableConfig&) const { return "spin_integrable"; }
        std::string operator()(const SpinChaoticConfig&) const { return "spin_chaotic"; }
    };
    return std::visit(Visitor{}, config);
}

MetricField gaussian_ed_manifold(int l) { return product_manifold(gaussian_factors(l)); }
MetricField spin_integrable_manifold() { return product_manifold(spin_integrable_factors()); }
MetricField spin_chaotic_manifold() { return product_manifold(spin_chaotic_factors()); }

void validate(const ExperimentConfig& config) {
    struct Visitor {
        void operator()(const GaussianEdConfig& c) const {
            if (c.l < 1 || c.l > 4) field_error("l", "must lie in [1, 4]");
            if (!(c.c > 0.0 && c.c <= 2.0)) field_error("c", "must lie in (0, 2]");
            if (!std::isfinite(c.mu0)) field_error("initial.mu", "must be finite");
            if (!(c.sigma0 > 0.0) || !std::isfinite(c.sigma0)) field_error("initial.sigma", "must be positive");
            validate_integration(c.integration);
            validate_entropy(c.entropy, c.integration.tau_max);
        }
        void operator()(const IhoConfig& c) const {
            if (c.l < 1 || c.l > 8) field_error("l", "must lie in [1, 8]");
            if (c.members < 1) field_error("members", "must be positive");
            if (!c.omegas.empty()) {
                if (static_cast<int>(c.omegas.size()) != c.l) field_error("omegas", "must have l entries");
                for (double w : c.omegas)
                    if (!(w > 0.0) || !std::isfinite(w)) field_error("omegas", "entries must be positive");
            } else {
                if (!(c.omega_mean > 0.0)) field_error("omega_mean", "must be positive");
                if (!(c.omega_std >= 0.0)) field_error("omega_std", "must be non-negative");
                if (!(c.omega_mean > 3.0 * c.omega_std)) field_error("omega_std", "must satisfy omega_mean > 3 omega_std");
            }
            if (!(c.theta0 != 0.0) || !std::isfinite(c.theta0)) field_error("theta0", "must be finite and non-zero");
            validate_integration(c.integration);
            validate_entropy(c.entropy, c.integration.tau_max);
        }
        void operator()(const SpinIntegrableConfig& c) const {
            if (!(c.a > 0.0) || !std::isfinite(c.a)) field_error("a", "must be positive");
            if (!(c.b > 0.0) || !std::isfinite(c.b)) field_error("b", "must be positive");
            validate_integration(c.integration);
            validate_entropy(c.entropy, c.integration.tau_max);
        }
        void operator()(const SpinChaoticConfig& c) const {
            if (!(c.c > 0.0) || !std::isfinite(c.c)) field_error("c", "must be positive");
            validate_integration(c.integration);
            validate_entropy(c.entropy, c.integration.tau_max);
        }
    };
    std::visit(Visitor{}, config);
}

std::vector<MetricField> model_factors(const ExperimentConfig& config) {
    struct Visitor {
        std::vector<MetricField> operator()(const GaussianEdConfig& c) const { return gaussian_factors(c.l); }
        std::vector<MetricField> operator()(const IhoConfig& c) const {
            return {conformal_oscillator_metric(draw_frequencies(c, 0))};
        }
        std::vector<MetricField> operator()(const SpinIntegrableConfig&) const { return spin_integrable_factors(); }
        std::vector<MetricField> operator()(const SpinChaoticConfig&) const { return spin_chaotic_factors(); }
    };
    return std::visit(Visitor{}, config);
}

ModelSetup model_setup(const ExperimentConfig& config) {
    struct Visitor {
        ModelSetup operator()(const GaussianEdConfig& c) const {
            Vector theta(2 * c.l), v(2 * c.l);
            for (int k = 0; k < c.l; ++k) {
                theta[2 * k] = c.mu0;
                theta[2 * k + 1] = c.sigma0;
                v[2 * k] = 0.0;
                v[2 * k + 1] = -c.c * c.sigma0;
            }
            return {gaussian_ed_manifold(c.l), theta, v};
        }
        ModelSetup operator()(const IhoConfig& c) const {
            const auto omegas = draw_frequencies(c, 0);
            return {conformal_oscillator_metric(omegas), Vector::Constant(c.l, c.theta0), Vector::Zero(c.l)};
        }
        ModelSetup operator()(const SpinIntegrableConfig& c) const {
            Vector theta(2), v(2);
            theta << 1.0, 1.0;
            v << c.a, c.b;
            return {spin_integrable_manifold(), theta, v};
        }
        ModelSetup operator()(const SpinChaoticConfig& c) const {
            Vector theta(3), v(3);
            theta << 1.0, 0.0, 1.0;
            v << 0.0, 0.0, -c.c;
            return {spin_chaotic_manifold(), theta, v};
        }
    };
    return std::visit(Visitor{}, config);
}

Vector experiment_deviation(const std::vector<MetricField>& factors, const Vector& theta, const Vector& velocity) {
    const int n = static_cast<int>(theta.size());
    Vector out = Vector::Zero(n);
    int offset = 0;
    for (const auto& f : factors) {
        const int d = f.dim();
        const Vector p = theta.segment(offset, d);
        const Vector v = velocity.segment(offset, d);
        try {
            out.segment(offset, d) = orthogonal_unit(f, p, v, Vector::Ones(d));
        } catch (const ArgumentError&) {
            // Factor is spanned by its own velocity.
        }
        offset += d;
    }
    if (out.isZero(0.0)) {
        const MetricField metric = product_manifold(factors);
        try {
            return orthogonal_unit(metric, theta, velocity, Vector::Ones(n));
        } catch (const ArgumentError&) {
            Vector alternating(n);
            for (int i = 0; i < n; ++i) alternating[i] = (i % 2 == 0) ? 1.0 : -1.0;
            return orthogonal_unit(metric, theta, velocity, alternating);
        }
    }
    return out;
}

std::vector<double> draw_frequencies(const IhoConfig& config, int member) {
    if (!config.omegas.empty()) {
        return config.omegas;
    }
    CounterRng rng(member_seed(config.seed, static_cast<std::uint64_t>(member)));
    std::vector<double> omegas;
    omegas.reserve(static_cast<std::size_t>(config.l));
    for (int k = 0; k < config.l; ++k) {
        double w = 0.0;
        int attempts = 0;
        do {
            if (attempts++ == 100) {
                throw ConfigError("config", "omega_std: frequency draw stayed non-positive after 100 resamples");
            }
            w = config.omega_mean + config.omega_std * rng.normal();
        } while (!(w > 0.0));
        omegas.push_back(w);
    }
    return omegas;
}

GeodesicTrajectory integrate_oscillators(const std::vector<double>& omegas, const Vector& theta0,
                                         const Vector& velocity0, const IntegrationSettings& settings) {
    const int l = static_cast<int>(omegas.size());
    auto rhs = [&omegas, l](double, std::span<const double> y, std::span<double> dydt) {
        for (int k = 0; k < l; ++k) {
            const double w = omegas[static_cast<std::size_t>(k)];
            dydt[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(l + k)];
            dydt[static_cast<std::size_t>(l + k)] = w * w * y[static_cast<std::size_t>(k)];
        }
    };
    std::vector<double> y0(static_cast<std::size_t>(2 * l));
    for (int k = 0; k < l; ++k) {
        y0[static_cast<std::size_t>(k)] = theta0[k];
        y0[static_cast<std::size_t>(l + k)] = velocity0[k];
    }
    const auto grid = uniform_grid(settings.tau_max, settings.grid_points);
    const auto sol = ode::integrate(rhs, y0, grid, {settings.tol, settings.tol * 1e-10});
    const MetricField metric = conformal_oscillator_metric(omegas);
    GeodesicTrajectory out;
    out.tolerance = settings.tol;
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        PathSample s{sol.t[i], Vector(l), Vector(l)};
        for (int k = 0; k < l; ++k) {
            s.theta[k] = sol.y[i][static_cast<std::size_t>(k)];
            s.velocity[k] = sol.y[i][static_cast<std::size_t>(l + k)];
        }
        out.speed.push_back(metric.inner(s.theta, s.velocity, s.velocity));
        out.samples.push_back(std::move(s));
    }
    return out;
}

OscillatorCrossCheck oscillator_crosscheck(const std::vector<double>& omegas, double theta0, double phi_bound,
                                           double tol) {
    const int l = static_cast<int>(omegas.size());
    const MetricField metric = conformal_oscillator_metric(omegas);
    const Vector start = Vector::Constant(l, theta0);
    const double phi0 = oscillator_potential(omegas, start);
    if (!(std::abs(phi0) < phi_bound)) {
        throw ConfigError("config", "theta0: |Phi(theta0)| must be below the cross-check bound");
    }
    // Oscillator velocity on the energy shell 1/2 |v|^2 + Phi = 1, along (1, ..., 1).
    const Vector direction = Vector::Ones(l) / std::sqrt(static_cast<double>(l));
    const Vector tau_velocity = std::sqrt(2.0 * (1.0 - phi0)) * direction;
    // Affine speed: d theta / ds = v / (sqrt2 (1 - Phi)), unit g-norm.
    const Vector s_velocity = tau_velocity / (std::numbers::sqrt2 * (1.0 - phi0));

    // State (theta, dtheta/ds, tau); dtau/ds = 1 / (sqrt2 (1 - Phi)).
    auto rhs = [&metric, &omegas, l](double, std::span<const double> y, std::span<double> dydt) {
        Vector theta(l), v(l);
        for (int k = 0; k < l; ++k) {
            theta[k] = y[static_cast<std::size_t>(k)];
            v[k] = y[static_cast<std::size_t>(l + k)];
        }
        const Vector accel = -contract_christoffel(christoffel(metric, theta), v, v);
        for (int k = 0; k < l; ++k) {
            dydt[static_cast<std::size_t>(k)] = v[k];
            dydt[static_cast<std::size_t>(l + k)] = accel[k];
        }
        dydt[static_cast<std::size_t>(2 * l)] =
            1.0 / (std::numbers::sqrt2 * (1.0 - oscillator_potential(omegas, theta)));
    };
    std::vector<double> y0(static_cast<std::size_t>(2 * l + 1), 0.0);
    for (int k = 0; k < l; ++k) {
        y0[static_cast<std::size_t>(k)] = start[k];
        y0[static_cast<std::size_t>(l + k)] = s_velocity[k];
    }
    const auto grid = uniform_grid(2.0, 401);
    const auto sol = ode::integrate(rhs, y0, grid, {tol, tol * 1e-10});

    OscillatorCrossCheck out;
    out.phi_bound = phi_bound;
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        Vector theta(l);
        for (int k = 0; k < l; ++k) theta[k] = sol.y[i][static_cast<std::size_t>(k)];
        if (!(std::abs(oscillator_potential(omegas, theta)) < phi_bound)) break;
        const double tau = sol.y[i][static_cast<std::size_t>(2 * l)];
        Vector exact(l);
        for (int k = 0; k < l; ++k) {
            const double w = omegas[static_cast<std::size_t>(k)];
            exact[k] = theta0 * std::cosh(w * tau) + tau_velocity[k] / w * std::sinh(w * tau);
        }
        out.max_relative_deviation = std::max(out.max_relative_deviation, (theta - exact).norm() / exact.norm());
        out.tau_reached = tau;
        ++out.samples_compared;
    }
    return out;
}

ExperimentReport gaussian_ed_experiment(const GaussianEdConfig& config) {
    validate(config);
    const auto setup = model_setup(config);
    return geometric_experiment("gaussian_ed", config, gaussian_factors(config.l), setup.theta0, setup.velocity0,
                                config.integration, config.entropy);
}

ExperimentReport spin_chain_integrable_experiment(const SpinIntegrableConfig& config) {
    validate(config);
    const auto setup = model_setup(config);
    return geometric_experiment("spin_integrable", config, spin_integrable_factors(), setup.theta0,
                                setup.velocity0, config.integration, config.entropy);
}

ExperimentReport spin_chain_chaotic_experiment(const SpinChaoticConfig& config) {
    validate(config);
    const auto setup = model_setup(config);
    return geometric_experiment("spin_chaotic", config, spin_chaotic_factors(), setup.theta0, setup.velocity0,
                                config.integration, config.entropy);
}

ExperimentReport iho_experiment(const IhoConfig& config) {
    validate(config);
    struct MemberResult {
        EnsembleMember member;
        GeodesicTrajectory path;
        IGESeries ige;
    };
    const auto count = static_cast<std::size_t>(config.members);
    std::vector<MemberResult> results(count);

    auto run_member = [&config, &results](std::size_t index) {
        MemberResult r;
        r.member.index = static_cast<int>(index);
        r.member.seed = member_seed(config.seed, index);
        r.member.omegas = draw_frequencies(config, static_cast<int>(index));
        for (double w : r.member.omegas) r.member.lambda_sum += w;
        const MetricField metric = conformal_oscillator_metric(r.member.omegas);
        r.path = integrate_oscillators(r.member.omegas, Vector::Constant(config.l, config.theta0),
                                       Vector::Zero(config.l), config.integration);
        r.ige = ige_series(metric, r.path.samples, entropy_grid(r.path.samples, config.entropy.tau_min),
                           config.entropy);
        r.member.lambda_hat = r.ige.growth.slope_linear;
        r.member.law = r.ige.growth.law;
        results[index] = std::move(r);
    };

    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) run_member(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < count; i += workers) run_member(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    ExperimentReport report;
    report.model = "iho";
    report.config = config;
    const auto& first = results.front();
    const MetricField metric = conformal_oscillator_metric(first.member.omegas);
    report.coordinate_names = metric.coordinate_names();
    report.scalar_curvature = riemann_ricci_scalar(metric, first.path.samples.front().theta).scalar;
    report.geodesic = first.path;
    report.ige = first.ige;

    EnsembleSummary summary;
    for (const auto& r : results) summary.members.push_back(r.member);
    double sum_hat = 0.0, sum_err = 0.0;
    for (const auto& m : summary.members) {
        sum_hat += m.lambda_hat;
        sum_err += m.lambda_hat - m.lambda_sum;
    }
    const auto n = static_cast<double>(summary.members.size());
    summary.mean_lambda_hat = sum_hat / n;
    summary.mean_error = sum_err / n;
    double var = 0.0;
    for (const auto& m : summary.members) {
        const double d = (m.lambda_hat - m.lambda_sum) - summary.mean_error;
        var += d * d;
    }
    summary.std_error = summary.members.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    report.ensemble = std::move(summary);
    report.crosscheck = oscillator_crosscheck(first.member.omegas, config.theta0);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    struct Visitor {
        ExperimentReport operator()(const GaussianEdConfig& c) const { return gaussian_ed_experiment(c); }
        ExperimentReport operator()(const IhoConfig& c) const { return iho_experiment(c); }
        ExperimentReport operator()(const SpinIntegrableConfig& c) const { return spin_chain_integrable_experiment(c); }
        ExperimentReport operator()(const SpinChaoticConfig& c) const { return spin_chain_chaotic_experiment(c); }
    };
    return std::visit(Visitor{}, config);
}

}  // namespace igac
