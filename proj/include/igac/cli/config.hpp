// JSON configuration files.
//
// Two shapes are accepted. Model configs name one of the four experiments and
// carry its parameters; family configs name a single family (or a list of
// them) and describe a bare manifold for the stage subcommands. The field
// reference lives in the README.
#pragma once

#include "igac/models.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace igac::cli {

struct RunConfig {
    ExperimentConfig experiment;
    std::uint64_t seed = 0;
    std::string output_dir = "output";
};

/// Manifold plus the point and velocity the stages start from.
struct StageSetup {
    MetricField metric;
    std::vector<MetricField> factors;
    Vector point;
    std::optional<Vector> velocity;
    IntegrationSettings integration;
    EntropyOptions entropy;
    std::string label;
};

[[nodiscard]] nlohmann::json load_json(const std::filesystem::path& path);

/// Parses and validates a model config; errors name the offending field path.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& document);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

[[nodiscard]] bool is_model_config(const nlohmann::json& document);
[[nodiscard]] StageSetup parse_stage_setup(const nlohmann::json& document);

/// "default", comma-separated name=value pairs, or a comma-separated numeric
/// list in coordinate order. Named values start from `base`.
[[nodiscard]] Vector parse_point(const std::string& text, const std::vector<std::string>& names, const Vector& base);

/// IGAC_OUTPUT_DIR when set, else the config's output_dir; then the
/// <model>_seed<seed> subdirectory.
[[nodiscard]] std::filesystem::path resolve_output_dir(const RunConfig& config,
                                                       const std::optional<std::string>& override_dir = {});

}  // namespace igac::cli
