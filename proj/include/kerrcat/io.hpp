// io.hpp: versioned file formats. Tabular data is CSV with a leading
// "# kerrcat <kind> v<version> key=value ..." line and a header row; states are
// JSON arrays of [re, im] pairs; Wigner heatmaps are PNG.

#pragma once

#include "kerrcat/analysis.hpp"
#include "kerrcat/dynamics.hpp"
#include "kerrcat/planner.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace kerrcat {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

void write_path_csv(const std::filesystem::path& file, const ControlPath& path);
void write_schedule_csv(const std::filesystem::path& file, const Schedule& schedule);
/// Throws ConfigError naming the file and line on malformed input.
Schedule read_schedule_csv(const std::filesystem::path& file);
void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj);
void write_wigner_csv(const std::filesystem::path& file, const WignerMap& map);
void write_report_csv(const std::filesystem::path& file, const ProtocolReport& report);

nlohmann::json state_to_json(const QuantumState& state);
QuantumState state_from_json(const nlohmann::json& j);
void write_state_json(const std::filesystem::path& file, const QuantumState& state);
QuantumState read_state_json(const std::filesystem::path& file);

/// RGB heatmap, one pixel per grid point, x to the right and p upward. Colors
/// saturate at +-scale: blue for negative, white at 0, red for positive.
void write_heatmap_png(const std::filesystem::path& file, const WignerMap& map, double scale);

/// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const std::filesystem::path& file);

void write_json(const std::filesystem::path& file, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& file);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace kerrcat
