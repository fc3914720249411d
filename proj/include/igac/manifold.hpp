/**
 * @file manifold.hpp
 * @brief Parametric probability families and their Fisher-Rao metric fields.
 *
 * Coordinates of product manifolds are interleaved per factor, e.g.
 * (mu_1, sigma_1, mu_2, sigma_2, ...) for a product of Gaussians, so the
 * product metric is block-diagonal in factor-sized blocks.
 */
#pragma once

#include "igac/tensor.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace igac {

/// Open interval (lower, upper); infinities allowed.
struct Interval {
    double lower;
    double upper;
    [[nodiscard]] bool contains(double x) const noexcept { return x > lower && x < upper; }
};

enum class FamilyKind { gaussian, exponential, poisson_spacing, wigner_dyson };

[[nodiscard]] std::string_view to_string(FamilyKind kind) noexcept;

using ParamRecord = std::map<std::string, double>;

struct ParametricFamily {
    FamilyKind kind;
    std::string name;
    int param_dim;
    Interval sample_domain;
    std::vector<Interval> param_domain;
    std::vector<std::string> param_names;
    /// The parameter point the family was constructed at.
    Vector point;

    [[nodiscard]] double log_density(double x, const Vector& theta) const;
    [[nodiscard]] bool in_domain(const Vector& theta) const;
};

/// Builds one of gaussian(mu, sigma), exponential(mu), poisson_spacing(mu),
/// wigner_dyson(mu). Missing parameters take the defaults mu=0, sigma=1
/// (gaussian) or mu=1 (half-line families).
[[nodiscard]] ParametricFamily make_family(std::string_view name, const ParamRecord& params = {});

enum class MetricProvider { analytic, finite_difference };

/**
 * Theta -> g(Theta) with first and second parameter derivatives.
 *
 * derivative(p)(r, m, n)          = d_r g_{mn}
 * second_derivative(p)(s, r, m, n) = d_s d_r g_{mn}
 *
 * When the volume density sqrt|det g| factorizes into single-coordinate
 * functions, `separable_density()` returns them; the entropy module then
 * integrates dimension by dimension.
 */
class MetricField {
public:
    using ValueFn = std::function<Matrix(const Vector&)>;
    using DerivativeFn = std::function<Tensor3(const Vector&)>;
    using SecondDerivativeFn = std::function<Tensor4(const Vector&)>;
    using DensityFactor = std::function<double(double)>;

    MetricField(std::vector<Interval> domain, std::vector<std::string> coordinate_names,
                ValueFn value, DerivativeFn derivative, SecondDerivativeFn second_derivative,
                MetricProvider provider,
                std::optional<std::vector<DensityFactor>> separable_density = std::nullopt);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(domain_.size()); }
    [[nodiscard]] Matrix value(const Vector& p) const { return value_(p); }
    [[nodiscard]] Tensor3 derivative(const Vector& p) const { return derivative_(p); }
    [[nodiscard]] Tensor4 second_derivative(const Vector& p) const { return second_(p); }
    [[nodiscard]] MetricProvider provider() const noexcept { return provider_; }
    [[nodiscard]] const std::vector<Interval>& domain() const noexcept { return domain_; }
    [[nodiscard]] const std::vector<std::string>& coordinate_names() const noexcept { return names_; }
    [[nodiscard]] const std::optional<std::vector<DensityFactor>>& separable_density() const noexcept {
        return separable_;
    }
    [[nodiscard]] bool contains(const Vector& p) const;

    /// g(u, v) at p.
    [[nodiscard]] double inner(const Vector& p, const Vector& u, const Vector& v) const;
    /// sqrt(g(v, v)) at p.
    [[nodiscard]] double norm(const Vector& p, const Vector& v) const;
    /// sqrt|det g(p)|.
    [[nodiscard]] double volume_density(const Vector& p) const;

private:
    std::vector<Interval> domain_;
    std::vector<std::string> names_;
    ValueFn value_;
    DerivativeFn derivative_;
    SecondDerivativeFn second_;
    MetricProvider provider_;
    std::optional<std::vector<DensityFactor>> separable_;
};

/// Closed-form Fisher-Rao metric of a family.
[[nodiscard]] MetricField fisher_metric_analytic(const ParametricFamily& family);

struct FisherQuadrature {
    int initial_nodes = 200;          // 10 panels of a 20-point rule
    int nodes_per_panel = 20;
    int max_nodes = 204800;
    double tolerance = 1e-8;          // successive refinements must agree to this
    double gaussian_half_width = 12.0;  // in units of sigma
    double half_line_extent = 40.0;     // in units of the mean
    double score_step = 1e-5;           // h = score_step * (1 + |theta|)
};

/// Quadrature estimate of g_{mn} = E[d_m log p d_n log p] with
/// central-difference scores. Independent of fisher_metric_analytic.
[[nodiscard]] Matrix fisher_metric_numeric(const ParametricFamily& family, const Vector& theta,
                                           const FisherQuadrature& quad = {});

/// Block-diagonal product of factor metrics.
[[nodiscard]] MetricField product_manifold(const std::vector<MetricField>& factors);

/// Metric with coordinates reordered: new coordinate i is old coordinate perm[i].
[[nodiscard]] MetricField permute_coordinates(const MetricField& metric, const std::vector<int>& perm);

/// Index map from grouped (mu_1..mu_l, sigma_1..sigma_l) order to the
/// interleaved order: grouped coordinate i is interleaved coordinate map[i].
[[nodiscard]] std::vector<int> grouped_to_interleaved(int l);

/// Same metric values; derivatives recomputed by central differences with one
/// Richardson level (h = first_step*(1+|x|) and second_step*(1+|x|)).
[[nodiscard]] MetricField with_finite_differences(const MetricField& metric, double first_step = 1e-4,
                                                  double second_step = 1e-3);

/// Identity metric on R^dim.
[[nodiscard]] MetricField euclidean_metric(int dim);

/// Conformally flat metric (1 - Phi) delta with Phi = -1/2 sum omega_k^2 theta_k^2.
[[nodiscard]] MetricField conformal_oscillator_metric(const std::vector<double>& omegas);

/// Phi(theta) = -1/2 sum omega_k^2 theta_k^2.
[[nodiscard]] double oscillator_potential(const std::vector<double>& omegas, const Vector& theta);

}  // namespace igac
