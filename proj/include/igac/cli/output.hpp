// CSV and JSON serialization of library results.
//
// Every floating-point CSV field is written with 17 significant digits so a
// file round-trips to the exact doubles that produced it. Files always carry a
// header row and use '\n' line endings regardless of platform.
#pragma once

#include "igac/curvature.hpp"
#include "igac/models.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <ostream>

namespace igac::cli {

using nlohmann::json;

void write_geodesic_csv(std::ostream& out, const GeodesicTrajectory& trajectory);
void write_jacobi_csv(std::ostream& out, const JacobiSeries& series);
void write_ige_csv(std::ostream& out, const IGESeries& series);
/// One-row CSV summarizing a growth fit.
void write_growth_csv(std::ostream& out, const GrowthClassification& growth);

[[nodiscard]] json to_json(const GrowthClassification& growth);
[[nodiscard]] json to_json(const DivergenceClassification& divergence);
[[nodiscard]] json to_json(const CurvatureReport& report, const std::vector<std::string>& names);
[[nodiscard]] json to_json(const ExperimentReport& report);
[[nodiscard]] json error_json(const std::exception& error);

/// Writes report.json, geodesic.csv, ige.csv and (when present) jacobi.csv
/// into `dir`, creating it if needed. Each file is written once, whole.
void write_experiment(const std::filesystem::path& dir, const ExperimentReport& report);

}  // namespace igac::cli
