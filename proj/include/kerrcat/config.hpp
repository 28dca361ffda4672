// config.hpp: JSON run configuration shared by the CLI subcommands.
//
// {
//   "format_version": 1,
//   "dim": 40,                              optional, overrides the automatic basis
//   "planner":   { "kerr", "delta0", "beta0", "ds", "theta_samples", "parity",
//                  "level_cutoff", "drive_weight", "max_steps", "max_dim" },
//   "schedule":  { "duration", "peak_penalty", "samples",
//                  "spc_beta0", "spc_ramp", "spc_end" },
//   "evolution": { "dt", "kappa", "store_every", "t_end", "initial", "snapshots" },
//   "analysis":  { "resolution", "half_width", "eval_time", "report_samples" }
// }
//
// Every section and field is optional; unknown fields are rejected.

#pragma once

#include "kerrcat/planner.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace kerrcat {

struct ScheduleSettings {
    /// Ramp duration T of the planned schedule, in 1/K.
    double duration = 2.5;
    /// When set, T = I[C] / peak_penalty instead of `duration`.
    std::optional<double> peak_penalty;
    int samples = 2000;
    double spc_beta0 = 4.3;
    double spc_ramp = 5.0;
    std::optional<double> spc_end;
};

struct EvolutionSettings {
    double dt = 0.0;
    double kappa = 0.0;
    int store_every = 0;
    std::optional<double> t_end;
    int initial = 0;                 ///< Fock level of the initial state, 0 or 1
    std::vector<double> snapshots;   ///< fractions of the schedule duration
};

struct AnalysisSettings {
    int resolution = 256;
    std::optional<double> half_width;
    double eval_time = 2.5;
    int report_samples = 101;
};

struct RunConfig {
    std::optional<int> dim;
    PlannerConfig planner;
    ScheduleSettings schedule;
    EvolutionSettings evolution;
    AnalysisSettings analysis;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& file);

}  // namespace kerrcat
