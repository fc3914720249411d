/**
 * @file entropy.hpp
 * @brief Statistical volume explored by a curve and the entropy S = log V.
 *
 * V(tau) = (1/tau) * integral_0^tau vol(tau') dtau', where vol(tau') is the
 * volume of the axis-aligned box swept by the curve up to tau'. The inner
 * volume uses sqrt|det g| (riemannian) or unit density (coordinate).
 */
#pragma once

#include "igac/dynamics.hpp"
#include "igac/manifold.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace igac {

struct Box {
    Vector lower;
    Vector upper;
};

enum class VolumeMeasure { riemannian, coordinate };

[[nodiscard]] std::string_view to_string(VolumeMeasure measure) noexcept;

struct EntropyOptions {
    /// Minimum box width is floor * (1 + |theta(0)|) per coordinate.
    double floor = 1e-3;
    double tau_min = 0.1;
    int quadrature_nodes = 32;
    double max_panel_ratio = 2.0;
    std::size_t min_outer_points = 200;
    double window = 0.5;
    double separation = 1.5;
    VolumeMeasure measure = VolumeMeasure::riemannian;
};

/// Box of per-coordinate [min, max] over samples with tau <= tau_prime,
/// widened to the floor width. Widening is centred unless that would leave
/// `domain` (when given), in which case it extends away from the boundary.
[[nodiscard]] Box swept_region(std::span<const PathSample> path, double tau_prime, double floor,
                               const std::vector<Interval>* domain = nullptr);

/// Volume of a box under the chosen measure. Separable densities integrate
/// per dimension; otherwise a tensor-product rule covers the whole box.
[[nodiscard]] double region_volume(const MetricField& metric, const Box& box, const EntropyOptions& options = {});

/// Time-averaged swept volume V(tau).
[[nodiscard]] double statistical_volume(const MetricField& metric, std::span<const PathSample> path, double tau,
                                        const EntropyOptions& options = {});

enum class GrowthLaw { linear, logarithmic, inconclusive };

[[nodiscard]] std::string_view to_string(GrowthLaw law) noexcept;

struct GrowthClassification {
    GrowthLaw law = GrowthLaw::inconclusive;
    /// Slope of the better-fitting model (the winner when conclusive).
    double coefficient = 0.0;
    double intercept = 0.0;
    double residual_linear = 0.0;
    double residual_log = 0.0;
    double slope_linear = 0.0;
    double slope_log = 0.0;
};

/// Fits S = a tau + b and S = a log tau + b on the tail window. A law is
/// named only when the losing residual is at least `separation` times the
/// winning one.
[[nodiscard]] GrowthClassification classify_growth(std::span<const double> tau, std::span<const double> entropy,
                                                   double window = 0.5, double separation = 1.5);

struct IGESample {
    double tau;
    double volume;
    double entropy;
};

struct IGESeries {
    std::vector<IGESample> samples;
    GrowthClassification growth;
};

/// S(tau_i) = log V(tau_i) on a strictly increasing grid inside the path's
/// range, all tau_i >= options.tau_min, plus the growth classification.
[[nodiscard]] IGESeries ige_series(const MetricField& metric, std::span<const PathSample> path,
                                   std::span<const double> tau_grid, const EntropyOptions& options = {});

/// Path sample times in [tau_min, tau_end].
[[nodiscard]] std::vector<double> entropy_grid(std::span<const PathSample> path, double tau_min);

}  // namespace igac
