/**
 * @file models.hpp
 * @brief Configured case-study experiments on statistical manifolds.
 *
 *  gaussian_ed      l Gaussian degrees of freedom, 2l-dimensional product manifold.
 *  iho              ensemble of inverted harmonic oscillators on the conformal
 *                   metric (1 - Phi) delta.
 *  spin_integrable  poisson_spacing x exponential (log-flat, 2D).
 *  spin_chaotic     wigner_dyson x gaussian (3D).
 */
#pragma once

#include "igac/dynamics.hpp"
#include "igac/entropy.hpp"
#include "igac/manifold.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace igac {

struct IntegrationSettings {
    double tau_max = 30.0;
    double tol = default_tolerance;
    std::size_t grid_points = default_grid_points;
};

struct GaussianEdConfig {
    int l = 1;
    /// Contraction rate of every sigma_k: sigma_k(tau) = sigma0 * exp(-c tau).
    double c = 0.5;
    double mu0 = 0.0;
    double sigma0 = 1.0;
    IntegrationSettings integration{30.0};
    EntropyOptions entropy{};
};

struct IhoConfig {
    int l = 1;
    double omega_mean = 1.0;
    double omega_std = 0.0;
    /// Explicit frequencies; overrides the Gaussian draw when non-empty.
    std::vector<double> omegas;
    int members = 1;
    std::uint64_t seed = 0;
    double theta0 = 0.1;
    IntegrationSettings integration{40.0};
    EntropyOptions entropy{.measure = VolumeMeasure::coordinate};
};

struct SpinIntegrableConfig {
    double a = 0.5;
    double b = 0.5;
    IntegrationSettings integration{50.0};
    EntropyOptions entropy{};
};

struct SpinChaoticConfig {
    /// Contraction rate of sigma_B': sigma_B'(tau) = exp(-c tau).
    double c = 0.5;
    IntegrationSettings integration{40.0};
    EntropyOptions entropy{};
};

using ExperimentConfig = std::variant<GaussianEdConfig, IhoConfig, SpinIntegrableConfig, SpinChaoticConfig>;

/// Identifier of the model a config belongs to.
[[nodiscard]] std::string model_name(const ExperimentConfig& config);

struct JacobiSummary {
    JacobiSeries series;
    DivergenceClassification divergence;
};

struct EnsembleMember {
    int index = 0;
    std::uint64_t seed = 0;
    std::vector<double> omegas;
    double lambda_sum = 0.0;
    double lambda_hat = 0.0;
    GrowthLaw law = GrowthLaw::inconclusive;
};

struct EnsembleSummary {
    std::vector<EnsembleMember> members;  // sorted by index
    double mean_lambda_hat = 0.0;
    double mean_error = 0.0;  // mean of lambda_hat - lambda_sum
    double std_error = 0.0;
};

/// Raw geodesics of the conformal metric mapped to oscillator time versus
/// the closed-form oscillator solution, while |Phi| stays below the bound.
struct OscillatorCrossCheck {
    double phi_bound = 0.1;
    double max_relative_deviation = 0.0;
    double tau_reached = 0.0;
    std::size_t samples_compared = 0;
};

struct ExperimentReport {
    std::string model;
    ExperimentConfig config;
    std::vector<std::string> coordinate_names;
    std::optional<double> scalar_curvature;
    GeodesicTrajectory geodesic;
    std::optional<JacobiSummary> jacobi;
    IGESeries ige;
    std::optional<EnsembleSummary> ensemble;
    std::optional<OscillatorCrossCheck> crosscheck;
};

/// The model's manifold and the launch state of its geodesic.
struct ModelSetup {
    MetricField metric;
    Vector theta0;
    Vector velocity0;
};

[[nodiscard]] MetricField gaussian_ed_manifold(int l);
[[nodiscard]] MetricField spin_integrable_manifold();
[[nodiscard]] MetricField spin_chaotic_manifold();

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// Factor manifolds whose product is the model manifold (one factor for iho).
[[nodiscard]] std::vector<MetricField> model_factors(const ExperimentConfig& config);
/// Manifold and initial data for geometric models; for iho uses member 0.
[[nodiscard]] ModelSetup model_setup(const ExperimentConfig& config);

/// Jacobi initial covariant derivative: per product factor, a unit vector
/// orthogonal to that factor's velocity (from the all-ones direction),
/// summed; falls back to a whole-manifold unit vector when every factor is
/// spanned by its velocity.
[[nodiscard]] Vector experiment_deviation(const std::vector<MetricField>& factors, const Vector& theta,
                                          const Vector& velocity);

/// Frequencies of ensemble member k.
[[nodiscard]] std::vector<double> draw_frequencies(const IhoConfig& config, int member);

/// theta_k(tau) for theta_k'' = omega_k^2 theta_k, integrated numerically.
[[nodiscard]] GeodesicTrajectory integrate_oscillators(const std::vector<double>& omegas, const Vector& theta0,
                                                       const Vector& velocity0, const IntegrationSettings& settings);

[[nodiscard]] OscillatorCrossCheck oscillator_crosscheck(const std::vector<double>& omegas, double theta0,
                                                         double phi_bound = 0.1, double tol = 1e-10);

[[nodiscard]] ExperimentReport gaussian_ed_experiment(const GaussianEdConfig& config);
[[nodiscard]] ExperimentReport iho_experiment(const IhoConfig& config);
[[nodiscard]] ExperimentReport spin_chain_integrable_experiment(const SpinIntegrableConfig& config);
[[nodiscard]] ExperimentReport spin_chain_chaotic_experiment(const SpinChaoticConfig& config);

[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace igac
