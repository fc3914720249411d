/**
 * @file dynamics.hpp
 * @brief Geodesic flow, Jacobi-Levi-Civita deviation and rate extraction.
 */
#pragma once

#include "igac/manifold.hpp"
#include "igac/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace igac {

/// One sample of a parameterized curve: tau, position, d(position)/d(tau).
struct PathSample {
    double tau;
    Vector theta;
    Vector velocity;
};

/// Cubic Hermite interpolation of a sampled curve at tau (within range).
[[nodiscard]] PathSample interpolate(std::span<const PathSample> path, double tau);

struct GeodesicTrajectory {
    std::vector<PathSample> samples;
    /// g(velocity, velocity) per sample.
    std::vector<double> speed;
    double tolerance = 0.0;

    /// max |speed_i - speed_0| / speed_0
    [[nodiscard]] double max_speed_drift() const;
};

struct JacobiSample {
    double tau;
    Vector j;
    /// Covariant derivative DJ/dtau.
    Vector dj;
};

struct JacobiSeries {
    std::vector<JacobiSample> samples;
    /// |J|_g per sample.
    std::vector<double> intensity;
};

constexpr double default_tolerance = 1e-9;
constexpr std::size_t default_grid_points = 1001;

/// Uniform grid of `points` times on [0, tau_max].
[[nodiscard]] std::vector<double> uniform_grid(double tau_max, std::size_t points);

/// Second-order geodesic equations as a first-order system in (theta, velocity).
[[nodiscard]] GeodesicTrajectory integrate_geodesic(const MetricField& metric, const Vector& theta0,
                                                    const Vector& velocity0, double tau_max,
                                                    double tol = default_tolerance,
                                                    std::size_t grid_points = default_grid_points);

/// Same, on an explicit grid starting at 0.
[[nodiscard]] GeodesicTrajectory integrate_geodesic_on(const MetricField& metric, const Vector& theta0,
                                                       const Vector& velocity0, std::span<const double> grid,
                                                       double tol = default_tolerance);

/// Jacobi field along `trajectory`, integrated jointly with the geodesic
/// (state theta, velocity, J, DJ/dtau) on the trajectory's own grid and
/// tolerance. `dj0` is the initial covariant derivative.
[[nodiscard]] JacobiSeries integrate_jacobi(const MetricField& metric, const GeodesicTrajectory& trajectory,
                                            const Vector& j0, const Vector& dj0);

/// Unit g-norm vector obtained by projecting `direction` orthogonally to
/// `velocity` at p. A zero velocity leaves the direction unprojected.
[[nodiscard]] Vector orthogonal_unit(const MetricField& metric, const Vector& p, const Vector& velocity,
                                     const Vector& direction);

struct RateFit {
    double rate = 0.0;
    double amplitude = 0.0;
    /// RMS of log-residuals over the fitted window.
    double residual = 0.0;
};

/// Least squares log y = log A + rate * tau over the last `window` fraction
/// of the samples.
[[nodiscard]] RateFit fit_exponential_rate(std::span<const double> tau, std::span<const double> y,
                                           double window = 0.5);

enum class DivergenceLaw { exponential, power_law, inconclusive };

[[nodiscard]] std::string_view to_string(DivergenceLaw law) noexcept;

struct DivergenceClassification {
    DivergenceLaw law = DivergenceLaw::inconclusive;
    RateFit exponential;
    /// Fit of log y = log A + exponent * log tau.
    double power_exponent = 0.0;
    double power_residual = 0.0;
};

/// Compares exponential and power-law fits of y over the tail window. The
/// winner must beat the other residual by `separation`; exponential also needs
/// a positive rate.
[[nodiscard]] DivergenceClassification classify_divergence(std::span<const double> tau, std::span<const double> y,
                                                           double window = 0.5, double separation = 1.5);

}  // namespace igac
