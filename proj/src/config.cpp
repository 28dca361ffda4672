#include "kerrcat/config.hpp"

#include "kerrcat/errors.hpp"
#include "kerrcat/io.hpp"

#include <set>
#include <string>

namespace kerrcat {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, const std::string& prefix, const std::set<std::string>& known) {
    if (!section.is_object()) throw ConfigError((prefix.empty() ? "config" : prefix) + ": expected an object");
    for (const auto& [key, value] : section.items()) {
        if (!known.count(key)) throw ConfigError((prefix.empty() ? "" : prefix + ".") + key + ": unknown field");
    }
}

void read_number(const json& section, const std::string& prefix, const char* key, double& out) {
    if (!section.contains(key) || section[key].is_null()) return;
    if (!section[key].is_number()) throw ConfigError(prefix + "." + key + ": expected a number");
    out = section[key].get<double>();
}

void read_optional(const json& section, const std::string& prefix, const char* key, std::optional<double>& out) {
    if (!section.contains(key) || section[key].is_null()) return;
    if (!section[key].is_number()) throw ConfigError(prefix + "." + key + ": expected a number or null");
    out = section[key].get<double>();
}

void read_int(const json& section, const std::string& prefix, const char* key, int& out) {
    if (!section.contains(key) || section[key].is_null()) return;
    if (!section[key].is_number_integer()) throw ConfigError(prefix + "." + key + ": expected an integer");
    out = section[key].get<int>();
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void RunConfig::validate() const {
    if (dim && *dim < 2) throw ConfigError("dim: must be >= 2");
    planner.validate();
    if (!(schedule.duration > 0.0)) throw ConfigError("schedule.duration: must be > 0");
    if (schedule.peak_penalty && !(*schedule.peak_penalty > 0.0)) {
        throw ConfigError("schedule.peak_penalty: must be > 0");
    }
    if (schedule.samples < 2) throw ConfigError("schedule.samples: must be >= 2");
    if (!(schedule.spc_beta0 > 0.0)) throw ConfigError("schedule.spc_beta0: must be > 0");
    if (!(schedule.spc_ramp > 0.0)) throw ConfigError("schedule.spc_ramp: must be > 0");
    if (schedule.spc_end && !(*schedule.spc_end > 0.0)) throw ConfigError("schedule.spc_end: must be > 0");
    if (!(evolution.dt >= 0.0)) throw ConfigError("evolution.dt: must be >= 0 (0 = automatic)");
    if (!(evolution.kappa >= 0.0)) throw ConfigError("evolution.kappa: must be >= 0");
    if (evolution.store_every < 0) throw ConfigError("evolution.store_every: must be >= 0");
    if (evolution.t_end && !(*evolution.t_end > 0.0)) throw ConfigError("evolution.t_end: must be > 0");
    if (evolution.initial != 0 && evolution.initial != 1) throw ConfigError("evolution.initial: must be 0 or 1");
    for (double f : evolution.snapshots) {
        if (!(f >= 0.0)) throw ConfigError("evolution.snapshots: fractions must be >= 0");
    }
    if (analysis.resolution < 64) throw ConfigError("analysis.resolution: must be >= 64");
    if (analysis.half_width && !(*analysis.half_width > 0.0)) throw ConfigError("analysis.half_width: must be > 0");
    if (!(analysis.eval_time >= 0.0)) throw ConfigError("analysis.eval_time: must be >= 0");
    if (analysis.report_samples < 2) throw ConfigError("analysis.report_samples: must be >= 2");
}

RunConfig config_from_json(const json& j) {
    reject_unknown(j, "", {"format_version", "dim", "planner", "schedule", "evolution", "analysis"});
    if (j.contains("format_version") && j["format_version"] != kFormatVersion) {
        throw ConfigError("format_version: expected " + std::to_string(kFormatVersion));
    }
    RunConfig cfg;
    if (j.contains("dim") && !j["dim"].is_null()) {
        if (!j["dim"].is_number_integer()) throw ConfigError("dim: expected an integer");
        cfg.dim = j["dim"].get<int>();
    }

    if (j.contains("planner")) {
        const json& p = j["planner"];
        const std::string at = "planner";
        reject_unknown(p, at,
                       {"kerr", "delta0", "beta0", "ds", "theta_samples", "parity", "level_cutoff", "drive_weight",
                        "max_steps", "max_dim"});
        auto& pc = cfg.planner;
        read_number(p, at, "kerr", pc.kerr);
        read_number(p, at, "delta0", pc.delta0);
        read_number(p, at, "beta0", pc.beta0);
        read_number(p, at, "ds", pc.ds);
        read_int(p, at, "theta_samples", pc.theta_samples);
        read_int(p, at, "level_cutoff", pc.level_cutoff);
        read_number(p, at, "drive_weight", pc.drive_weight);
        read_int(p, at, "max_steps", pc.max_steps);
        read_int(p, at, "max_dim", pc.max_dim);
        if (p.contains("parity")) {
            const auto& v = p["parity"];
            if (v == "even") pc.parity = Parity::Even;
            else if (v == "odd") pc.parity = Parity::Odd;
            else throw ConfigError("planner.parity: expected \"even\" or \"odd\"");
        }
    }
    if (cfg.dim) cfg.planner.basis = FockBasis(std::max(2, *cfg.dim));
    cfg.planner.max_dim = std::max(cfg.planner.max_dim, cfg.planner.basis.dim());

    if (j.contains("schedule")) {
        const json& s = j["schedule"];
        const std::string at = "schedule";
        reject_unknown(s, at, {"duration", "peak_penalty", "samples", "spc_beta0", "spc_ramp", "spc_end"});
        read_number(s, at, "duration", cfg.schedule.duration);
        read_optional(s, at, "peak_penalty", cfg.schedule.peak_penalty);
        read_int(s, at, "samples", cfg.schedule.samples);
        read_number(s, at, "spc_beta0", cfg.schedule.spc_beta0);
        read_number(s, at, "spc_ramp", cfg.schedule.spc_ramp);
        read_optional(s, at, "spc_end", cfg.schedule.spc_end);
    }

    if (j.contains("evolution")) {
        const json& e = j["evolution"];
        const std::string at = "evolution";
        reject_unknown(e, at, {"dt", "kappa", "store_every", "t_end", "initial", "snapshots"});
        read_number(e, at, "dt", cfg.evolution.dt);
        read_number(e, at, "kappa", cfg.evolution.kappa);
        read_int(e, at, "store_every", cfg.evolution.store_every);
        read_optional(e, at, "t_end", cfg.evolution.t_end);
        read_int(e, at, "initial", cfg.evolution.initial);
        if (e.contains("snapshots")) {
            const auto& v = e["snapshots"];
            if (!v.is_array()) throw ConfigError("evolution.snapshots: expected an array of numbers");
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (!v[k].is_number()) {
                    throw ConfigError("evolution.snapshots[" + std::to_string(k) + "]: expected a number");
                }
                cfg.evolution.snapshots.push_back(v[k].get<double>());
            }
        }
    }

    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        const std::string at = "analysis";
        reject_unknown(a, at, {"resolution", "half_width", "eval_time", "report_samples"});
        read_int(a, at, "resolution", cfg.analysis.resolution);
        read_optional(a, at, "half_width", cfg.analysis.half_width);
        read_number(a, at, "eval_time", cfg.analysis.eval_time);
        read_int(a, at, "report_samples", cfg.analysis.report_samples);
    }

    cfg.validate();
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    const auto& p = cfg.planner;
    json j;
    j["format_version"] = kFormatVersion;
    j["dim"] = cfg.dim ? json(*cfg.dim) : json(nullptr);
    j["planner"] = {{"kerr", p.kerr},
                    {"delta0", p.delta0},
                    {"beta0", p.beta0},
                    {"ds", p.ds},
                    {"theta_samples", p.theta_samples},
                    {"parity", p.parity == Parity::Even ? "even" : "odd"},
                    {"level_cutoff", p.level_cutoff},
                    {"drive_weight", p.drive_weight},
                    {"max_steps", p.max_steps},
                    {"max_dim", p.max_dim}};
    j["schedule"] = {{"duration", cfg.schedule.duration},
                     {"peak_penalty", optional_to_json(cfg.schedule.peak_penalty)},
                     {"samples", cfg.schedule.samples},
                     {"spc_beta0", cfg.schedule.spc_beta0},
                     {"spc_ramp", cfg.schedule.spc_ramp},
                     {"spc_end", optional_to_json(cfg.schedule.spc_end)}};
    j["evolution"] = {{"dt", cfg.evolution.dt},
                      {"kappa", cfg.evolution.kappa},
                      {"store_every", cfg.evolution.store_every},
                      {"t_end", optional_to_json(cfg.evolution.t_end)},
                      {"initial", cfg.evolution.initial},
                      {"snapshots", cfg.evolution.snapshots}};
    j["analysis"] = {{"resolution", cfg.analysis.resolution},
                     {"half_width", optional_to_json(cfg.analysis.half_width)},
                     {"eval_time", cfg.analysis.eval_time},
                     {"report_samples", cfg.analysis.report_samples}};
    return j;
}

RunConfig load_config(const std::filesystem::path& file) {
    const json j = read_json(file);
    try {
        return config_from_json(j);
    } catch (const ConfigError& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

}  // namespace kerrcat
