#include "igac/dynamics.hpp"

#include "igac/curvature.hpp"
#include "igac/errors.hpp"
#include "igac/ode.hpp"

#include <algorithm>
#include <cmath>

namespace igac {

namespace {

// Relative error control; the absolute floor only matters for components
// that are exactly zero.
constexpr double absolute_floor_factor = 1e-10;

void validate_start(const MetricField& metric, const Vector& theta0, const Vector& velocity0, double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-3)) {
        throw ArgumentError("integrator tolerance must lie in [1e-12, 1e-3]");
    }
    if (theta0.size() != metric.dim() || velocity0.size() != metric.dim()) {
        throw ArgumentError("initial point and velocity must match the metric dimension");
    }
    if (!metric.contains(theta0)) {
        throw DomainError("initial point outside the metric's parameter domain");
    }
    if (!velocity0.allFinite()) {
        throw ArgumentError("initial velocity must be finite");
    }
}

Vector segment(std::span<const double> y, int offset, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = y[static_cast<std::size_t>(offset + i)];
    return v;
}

void store(std::span<double> out, int offset, const Vector& v) {
    for (int i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(offset + i)] = v[i];
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Inside the open domain and far enough from its edge that the metric
// derivatives the right-hand side needs are still representable.
ode::StateCheck domain_check(const MetricField& metric, bool curvature) {
    const int n = metric.dim();
    return [&metric, n, curvature](std::span<const double> y) {
        const Vector theta = segment(y, 0, n);
        if (!metric.contains(theta) || !all_finite(metric.derivative(theta).data())) return false;
        return !curvature || all_finite(metric.second_derivative(theta).data());
    };
}

}  // namespace

PathSample interpolate(std::span<const PathSample> path, double tau) {
    if (path.empty()) {
        throw ArgumentError("cannot interpolate an empty path");
    }
    if (tau < path.front().tau || tau > path.back().tau) {
        throw ArgumentError("interpolation time outside the sampled range");
    }
    auto it = std::lower_bound(path.begin(), path.end(), tau,
                               [](const PathSample& s, double t) { return s.tau < t; });
    if (it != path.end() && it->tau == tau) {
        return *it;
    }
    const PathSample& b = *it;
    const PathSample& a = *(it - 1);
    const double h = b.tau - a.tau;
    const double s = (tau - a.tau) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    PathSample out;
    out.tau = tau;
    out.theta = h00 * a.theta + h10 * h * a.velocity + h01 * b.theta + h11 * h * b.velocity;
    // Derivative of the Hermite cubic.
    const double d00 = (6 * s2 - 6 * s) / h;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = (-6 * s2 + 6 * s) / h;
    const double d11 = 3 * s2 - 2 * s;
    out.velocity = d00 * a.theta + d10 * a.velocity + d01 * b.theta + d11 * b.velocity;
    return out;
}

double GeodesicTrajectory::max_speed_drift() const {
    if (speed.empty() || speed.front() == 0.0) {
        return 0.0;
    }
    double drift = 0.0;
    for (double s : speed) drift = std::max(drift, std::abs(s - speed.front()) / std::abs(speed.front()));
    return drift;
}

std::vector<double> uniform_grid(double tau_max, std::size_t points) {
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
        throw ArgumentError("tau_max must be positive and finite");
    }
    if (points < 2) {
        throw ArgumentError("grid needs at least two points");
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = tau_max * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    grid.back() = tau_max;
    return grid;
}

GeodesicTrajectory integrate_geodesic(const MetricField& metric, const Vector& theta0, const Vector& velocity0,
                                      double tau_max, double tol, std::size_t grid_points) {
    const auto grid = uniform_grid(tau_max, grid_points);
    return integrate_geodesic_on(metric, theta0, velocity0, grid, tol);
}

GeodesicTrajectory integrate_geodesic_on(const MetricField& metric, const Vector& theta0,
                                         const Vector& velocity0, std::span<const double> grid, double tol) {
    validate_start(metric, theta0, velocity0, tol);
    const int n = metric.dim();
    // Raises SingularityError for a degenerate starting metric.
    (void)christoffel(metric, theta0);

    auto rhs = [&metric, n](double, std::span<const double> y, std::span<double> dydt) {
        const Vector theta = segment(y, 0, n);
        const Vector v = segment(y, n, n);
        const Tensor3 gamma = christoffel(metric, theta);
        store(dydt, 0, v);
        store(dydt, n, -contract_christoffel(gamma, v, v));
    };
    std::vector<double> y0(static_cast<std::size_t>(2 * n));
    store(y0, 0, theta0);
    store(y0, n, velocity0);
    const ode::Options options{tol, tol * absolute_floor_factor};
    const auto sol = ode::integrate(rhs, y0, grid, options, domain_check(metric, false));

    GeodesicTrajectory out;
    out.tolerance = tol;
    out.samples.reserve(sol.t.size());
    out.speed.reserve(sol.t.size());
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        PathSample s{sol.t[i], segment(sol.y[i], 0, n), segment(sol.y[i], n, n)};
        out.speed.push_back(metric.inner(s.theta, s.velocity, s.velocity));
        out.samples.push_back(std::move(s));
    }
    return out;
}

JacobiSeries integrate_jacobi(const MetricField& metric, const GeodesicTrajectory& trajectory, const Vector& j0,
                              const Vector& dj0) {
    const int n = metric.dim();
    if (trajectory.samples.size() < 2) {
        throw ArgumentError("Jacobi integration needs a trajectory with at least two samples");
    }
    if (j0.size() != n || dj0.size() != n) {
        throw ArgumentError("Jacobi initial data must match the metric dimension");
    }
    const PathSample& start = trajectory.samples.front();
    validate_start(metric, start.theta, start.velocity, trajectory.tolerance);

    auto rhs = [&metric, n](double, std::span<const double> y, std::span<double> dydt) {
        const Vector theta = segment(y, 0, n);
        const Vector v = segment(y, n, n);
        const Vector j = segment(y, 2 * n, n);
        const Vector p = segment(y, 3 * n, n);
        const Connection conn = connection_and_riemann(metric, theta);
        store(dydt, 0, v);
        store(dydt, n, -contract_christoffel(conn.christoffel, v, v));
        store(dydt, 2 * n, p - contract_christoffel(conn.christoffel, v, j));
        // D^2 J / dtau^2 = -R^a_{bcd} v^b J^c v^d
        Vector accel = Vector::Zero(n);
        for (int a = 0; a < n; ++a) {
            double sum = 0.0;
            for (int b = 0; b < n; ++b) {
                if (v[b] == 0.0) continue;
                for (int c = 0; c < n; ++c) {
                    if (j[c] == 0.0) continue;
                    for (int d = 0; d < n; ++d) sum += conn.riemann(a, b, c, d) * v[b] * j[c] * v[d];
                }
            }
            accel[a] = -sum;
        }
        store(dydt, 3 * n, accel - contract_christoffel(conn.christoffel, v, p));
    };

    std::vector<double> y0(static_cast<std::size_t>(4 * n));
    store(y0, 0, start.theta);
    store(y0, n, start.velocity);
    store(y0, 2 * n, j0);
    store(y0, 3 * n, dj0);
    std::vector<double> grid;
    grid.reserve(trajectory.samples.size());
    for (const auto& s : trajectory.samples) grid.push_back(s.tau);
    const double tol = trajectory.tolerance;
    const ode::Options options{tol, tol * absolute_floor_factor};
    const auto sol = ode::integrate(rhs, y0, grid, options, domain_check(metric, true));

    JacobiSeries out;
    out.samples.reserve(sol.t.size());
    out.intensity.reserve(sol.t.size());
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        JacobiSample s{sol.t[i], segment(sol.y[i], 2 * n, n), segment(sol.y[i], 3 * n, n)};
        out.intensity.push_back(metric.norm(segment(sol.y[i], 0, n), s.j));
        out.samples.push_back(std::move(s));
    }
    return out;
}

Vector orthogonal_unit(const MetricField& metric, const Vector& p, const Vector& velocity, const Vector& direction) {
    const Matrix g = metric.value(p);
    Vector d = direction;
    const double vv = velocity.dot(g * velocity);
    if (vv > 0.0) {
        d -= (velocity.dot(g * d) / vv) * velocity;
    }
    const double norm2 = d.dot(g * d);
    if (!(norm2 > 0.0)) {
        throw ArgumentError("deviation direction is parallel to the velocity");
    }
    return d / std::sqrt(norm2);
}

namespace {

struct LineFit {
    double slope;
    double intercept;
    double rms;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit{};
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

std::size_t window_start(std::size_t n, double window) {
    if (!(window > 0.0 && window <= 1.0)) {
        throw ArgumentError("fit window must lie in (0, 1]");
    }
    const auto count = static_cast<std::size_t>(std::ceil(window * static_cast<double>(n)));
    return n - std::min(n, count);
}

}  // namespace

RateFit fit_exponential_rate(std::span<const double> tau, std::span<const double> y, double window) {
    if (tau.size() != y.size()) {
        throw ArgumentError("fit_exponential_rate: tau and y differ in length");
    }
    const std::size_t start = window_start(tau.size(), window);
    if (tau.size() - start < 2) {
        throw ArgumentError("fit_exponential_rate needs at least two samples in the window");
    }
    std::vector<double> x, logy;
    for (std::size_t i = start; i < tau.size(); ++i) {
        if (!(y[i] > 0.0)) {
            throw NumericalError("fit", "fit_exponential_rate: non-positive value in the fit window");
        }
        x.push_back(tau[i]);
        logy.push_back(std::log(y[i]));
    }
    const LineFit fit = least_squares(x, logy);
    return RateFit{fit.slope, std::exp(fit.intercept), fit.rms};
}

std::string_view to_string(DivergenceLaw law) noexcept {
    switch (law) {
        case DivergenceLaw::exponential: return "exponential";
        case DivergenceLaw::power_law: return "power_law";
        case DivergenceLaw::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

DivergenceClassification classify_divergence(std::span<const double> tau, std::span<const double> y, double window,
                                             double separation) {
    DivergenceClassification out;
    out.exponential = fit_exponential_rate(tau, y, window);
    const std::size_t start = window_start(tau.size(), window);
    std::vector<double> logt, logy;
    for (std::size_t i = start; i < tau.size(); ++i) {
        if (!(tau[i] > 0.0)) {
            throw ArgumentError("classify_divergence needs tau > 0 on the window");
        }
        logt.push_back(std::log(tau[i]));
        logy.push_back(std::log(y[i]));
    }
    const LineFit power = least_squares(logt, logy);
    out.power_exponent = power.slope;
    out.power_residual = power.rms;
    const double re = out.exponential.residual;
    const double rp = out.power_residual;
    if (re < rp && rp >= separation * re && out.exponential.rate > 0.0) {
        out.law = DivergenceLaw::exponential;
    } else if (rp < re && re >= separation * rp) {
        out.law = DivergenceLaw::power_law;
    }
    return out;
}

}  // namespace igac
