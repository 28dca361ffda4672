#include "kerrcat/cli.hpp"

#include "kerrcat/analysis.hpp"
#include "kerrcat/config.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/io.hpp"
#include "kerrcat/parallel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace kerrcat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::optional<int> dim;
    unsigned seed = 0;
    std::string out_dir;
    std::string config;
    std::vector<std::string> argv;
};

std::string num(double v, const char* format = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("KERRCAT_OUT_DIR"); env && *env) return env;
    return "kerrcat_out";
}

RunConfig resolve_config(const Globals& g) {
    RunConfig cfg = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (g.dim) {
        cfg.dim = *g.dim;
        if (*g.dim < 2) throw ConfigError("--dim: must be >= 2");
        cfg.planner.basis = FockBasis(*g.dim);
        cfg.planner.max_dim = std::max(cfg.planner.max_dim, *g.dim);
    }
    return cfg;
}

FockBasis evolution_basis(const RunConfig& cfg, double beta_max) {
    return cfg.dim ? FockBasis(*cfg.dim) : FockBasis::for_drive(beta_max, cfg.planner.kerr);
}

QuantumState target_cat(double beta, Parity parity, const FockBasis& basis, double kerr) {
    return cat_state(Complex(std::sqrt(std::max(0.0, beta) / kerr), 0.0), parity, basis);
}

/// Collects inputs and outputs and writes manifest.json next to the outputs.
class Manifest {
public:
    Manifest(std::string command, const Globals& g, const RunConfig& cfg)
        : command_(std::move(command)), argv_(g.argv), seed_(g.seed), config_(config_to_json(cfg)),
          started_(utc_timestamp()) {}

    void input(const fs::path& p) { inputs_.push_back(p); }
    void output(const fs::path& p) { outputs_.push_back(p); }

    void write(const fs::path& dir) const {
        json j;
        j["format_version"] = kFormatVersion;
        j["tool"] = "kerrcat";
        j["version"] = kToolVersion;
        j["command"] = command_;
        j["argv"] = argv_;
        j["seed"] = seed_;
        j["config"] = config_;
        j["started_at"] = started_;
        j["finished_at"] = utc_timestamp();
        auto digests = [](const std::vector<fs::path>& files) {
            json arr = json::array();
            for (const auto& f : files) arr.push_back({{"path", f.string()}, {"sha256", sha256_file(f)}});
            return arr;
        };
        j["inputs"] = digests(inputs_);
        j["outputs"] = digests(outputs_);
        write_json(dir / "manifest.json", j);
    }

private:
    std::string command_;
    std::vector<std::string> argv_;
    unsigned seed_;
    json config_;
    std::string started_;
    std::vector<fs::path> inputs_;
    std::vector<fs::path> outputs_;
};

struct PlanResult {
    ControlPath path;
    Schedule schedule;
    double duration = 0.0;
};

PlanResult plan_tpc(const RunConfig& cfg) {
    PlanResult r;
    r.path = plan_path(cfg.planner);
    r.duration = cfg.schedule.peak_penalty ? time_for_penalty(r.path, *cfg.schedule.peak_penalty)
                                           : cfg.schedule.duration;
    r.schedule = schedule_from_path(r.path, r.duration, cfg.schedule.samples);
    return r;
}

Schedule make_spc(const RunConfig& cfg) {
    const double end = cfg.schedule.spc_end.value_or(cfg.schedule.spc_ramp);
    return spc_schedule(cfg.schedule.spc_beta0, cfg.schedule.spc_ramp, cfg.schedule.samples, end);
}

EvolutionConfig evolution_config(const RunConfig& cfg, double duration) {
    EvolutionConfig ec;
    ec.kerr = cfg.planner.kerr;
    ec.dt = cfg.evolution.dt;
    ec.kappa = cfg.evolution.kappa;
    ec.store_every = cfg.evolution.store_every;
    ec.t_end = cfg.evolution.t_end.value_or(-1.0);
    for (double f : cfg.evolution.snapshots) ec.snapshot_times.push_back(f * duration);
    return ec;
}

Trajectory run_evolution(const QuantumState& initial, const Schedule& schedule, const EvolutionConfig& ec) {
    return ec.kappa == 0.0 ? evolve_schrodinger(initial, schedule, ec) : evolve_lindblad(initial, schedule, ec);
}

PhaseGrid analysis_grid(const RunConfig& cfg, const QuantumState& state) {
    return cfg.analysis.half_width ? PhaseGrid(*cfg.analysis.half_width, cfg.analysis.resolution)
                                   : PhaseGrid::covering(state, cfg.analysis.resolution);
}

// ---- plan -------------------------------------------------------------------

struct PlanOptions {
    std::optional<double> delta0, duration, peak_penalty, spc_beta0, spc_ramp, spc_end;
    std::optional<int> samples;
    bool spc = false;
};

int cmd_plan(const Globals& g, const PlanOptions& o, std::ostream& out) {
    RunConfig cfg = resolve_config(g);
    if (o.delta0) cfg.planner.delta0 = *o.delta0;
    if (o.duration) cfg.schedule.duration = *o.duration;
    if (o.peak_penalty) cfg.schedule.peak_penalty = *o.peak_penalty;
    if (o.samples) cfg.schedule.samples = *o.samples;
    if (o.spc_beta0) cfg.schedule.spc_beta0 = *o.spc_beta0;
    if (o.spc_ramp) cfg.schedule.spc_ramp = *o.spc_ramp;
    if (o.spc_end) cfg.schedule.spc_end = *o.spc_end;
    cfg.validate();

    const fs::path dir = g.out_dir;
    Manifest manifest(o.spc ? "plan --spc" : "plan", g, cfg);
    if (!g.config.empty()) manifest.input(g.config);

    if (o.spc) {
        const Schedule spc = make_spc(cfg);
        write_schedule_csv(dir / "schedule.csv", spc);
        manifest.output(dir / "schedule.csv");
        manifest.write(dir);
        out << "source = spc\n"
            << "beta0 = " << num(cfg.schedule.spc_beta0) << "\n"
            << "T = " << num(cfg.schedule.spc_ramp) << "\n"
            << "t_end = " << num(spc.duration()) << "\n"
            << "final beta = " << num(spc.samples().back().drive) << "\n";
        return 0;
    }

    const PlanResult plan = plan_tpc(cfg);
    write_path_csv(dir / "path.csv", plan.path);
    write_schedule_csv(dir / "schedule.csv", plan.schedule);
    manifest.output(dir / "path.csv");
    manifest.output(dir / "schedule.csv");
    manifest.write(dir);

    const auto report = adiabaticity_report(plan.schedule, cfg.planner);
    out << "source = planned\n"
        << "beta_f = " << num(plan.path.final_drive()) << "\n"
        << "I[C] = " << num(plan.path.total_penalty) << "\n"
        << "T = " << num(plan.duration) << "\n"
        << "peak penalty = " << num(plan.path.total_penalty / plan.duration) << "\n"
        << "path points = " << plan.path.points.size() << "\n"
        << "min gap = " << num(report.min_gap) << " at t/T = " << num(report.t_min / plan.duration, "%.4f")
        << "\n";
    return 0;
}

// ---- evolve -----------------------------------------------------------------

struct EvolveOptions {
    std::string schedule;
    std::optional<int> initial;
    std::optional<double> kappa, dt, t_end, target_beta;
    std::vector<double> kappa_list, snapshots;
    unsigned workers = 0;
};

std::string kappa_label(double kappa) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "kappa_%.4g", kappa);
    return buf;
}

std::string fraction_label(double f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%.4g.json", f);
    return buf;
}

int cmd_evolve(const Globals& g, const EvolveOptions& o, std::ostream& out) {
    RunConfig cfg = resolve_config(g);
    if (o.initial) cfg.evolution.initial = *o.initial;
    if (o.kappa) cfg.evolution.kappa = *o.kappa;
    if (o.dt) cfg.evolution.dt = *o.dt;
    if (o.t_end) cfg.evolution.t_end = *o.t_end;
    if (!o.snapshots.empty()) cfg.evolution.snapshots = o.snapshots;
    cfg.validate();
    for (double k : o.kappa_list) {
        if (!(k >= 0.0)) throw ConfigError("--kappa-list: values must be >= 0");
    }

    const Schedule schedule = read_schedule_csv(o.schedule);
    const double beta_target = o.target_beta.value_or(schedule.samples().back().drive);
    const FockBasis basis = evolution_basis(cfg, std::max(schedule.max_drive(), beta_target));
    const Parity parity = cfg.evolution.initial == 0 ? Parity::Even : Parity::Odd;
    const QuantumState initial = fock_state(cfg.evolution.initial, basis);

    EvolutionConfig ec = evolution_config(cfg, schedule.duration());
    ec.target = target_cat(beta_target, parity, basis, cfg.planner.kerr);

    const fs::path dir = g.out_dir;
    Manifest manifest("evolve", g, cfg);
    manifest.input(o.schedule);
    if (!g.config.empty()) manifest.input(g.config);

    auto write_run = [&](const Trajectory& traj, const fs::path& run_dir, std::vector<fs::path>& files) {
        write_trajectory_csv(run_dir / "trajectory.csv", traj);
        write_state_json(run_dir / "final_state.json", traj.final_state());
        files.push_back(run_dir / "trajectory.csv");
        files.push_back(run_dir / "final_state.json");
        for (double f : cfg.evolution.snapshots) {
            const std::size_t k = traj.nearest(f * schedule.duration());
            write_state_json(run_dir / fraction_label(f), traj.states[k]);
            files.push_back(run_dir / fraction_label(f));
        }
    };

    if (o.kappa_list.empty()) {
        const Trajectory traj = run_evolution(initial, schedule, ec);
        std::vector<fs::path> files;
        write_run(traj, dir, files);
        for (const auto& f : files) manifest.output(f);
        manifest.write(dir);
        out << "dim = " << basis.dim() << "\n"
            << "dt = " << num(traj.dt, "%.3e") << " (" << traj.steps << " steps)\n"
            << "target beta = " << num(beta_target) << "\n"
            << "final fidelity = " << num(traj.fidelity.back()) << "\n"
            << "final parity = " << num(traj.parity.back()) << "\n"
            << "final <n> = " << num(traj.photon_number.back()) << "\n";
        return 0;
    }

    const auto runs = parallel_map(
        o.kappa_list,
        [&](double kappa) {
            EvolutionConfig run_cfg = ec;
            run_cfg.kappa = kappa;
            return run_evolution(initial, schedule, run_cfg);
        },
        o.workers);

    const fs::path table = dir / "kappa_sweep.csv";
    {
        std::vector<fs::path> files;
        for (std::size_t i = 0; i < runs.size(); ++i) write_run(runs[i], dir / kappa_label(o.kappa_list[i]), files);
        for (const auto& f : files) manifest.output(f);
    }
    {
        fs::create_directories(dir);
        std::FILE* fp = std::fopen(table.string().c_str(), "w");
        if (!fp) throw ConfigError("cannot open " + table.string() + " for writing");
        std::fprintf(fp, "# kerrcat kappa_sweep v%d\nkappa,fidelity,parity,n\n", kFormatVersion);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", o.kappa_list[i], runs[i].fidelity.back(),
                         runs[i].parity.back(), runs[i].photon_number.back());
        }
        std::fclose(fp);
    }
    manifest.output(table);
    manifest.write(dir);
    out << "kappa fidelity parity <n>\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        out << num(o.kappa_list[i], "%.4g") << " " << num(runs[i].fidelity.back()) << " "
            << num(runs[i].parity.back()) << " " << num(runs[i].photon_number.back()) << "\n";
    }
    return 0;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeOptions {
    std::string state;
    std::optional<double> half_width, target_beta;
    std::optional<int> resolution;
};

int cmd_analyze(const Globals& g, const AnalyzeOptions& o, std::ostream& out) {
    RunConfig cfg = resolve_config(g);
    if (o.half_width) cfg.analysis.half_width = *o.half_width;
    if (o.resolution) cfg.analysis.resolution = *o.resolution;
    cfg.validate();

    const QuantumState state = read_state_json(o.state);
    state.validate(1e-6);
    const PhaseGrid grid = analysis_grid(cfg, state);
    const WignerMap map = wigner(state, grid);

    json metrics;
    metrics["format_version"] = kFormatVersion;
    metrics["parity"] = state.parity();
    metrics["mean_photon_number"] = state.mean_photon_number();
    metrics["nonclassical_volume"] = nonclassical_volume(map);
    metrics["wigner_min"] = map.min();
    metrics["wigner_max"] = map.max();
    metrics["grid_half_width"] = grid.x_half_width();
    metrics["grid_resolution"] = grid.resolution();
    try {
        metrics["cat_size"] = cat_size(map);
    } catch (const LobeDetectionError&) {
        metrics["cat_size"] = nullptr;
    }
    if (o.target_beta) {
        const Parity parity = state.parity() >= 0.0 ? Parity::Even : Parity::Odd;
        const FockBasis basis(state.dim());
        metrics["target_beta"] = *o.target_beta;
        metrics["fidelity"] = fidelity(state, target_cat(*o.target_beta, parity, basis, cfg.planner.kerr));
    }

    const fs::path dir = g.out_dir;
    Manifest manifest("analyze", g, cfg);
    manifest.input(o.state);
    if (!g.config.empty()) manifest.input(g.config);
    write_wigner_csv(dir / "wigner.csv", map);
    write_heatmap_png(dir / "wigner.png", map, 2.0 / std::numbers::pi);
    write_json(dir / "metrics.json", metrics);
    manifest.output(dir / "wigner.csv");
    manifest.output(dir / "wigner.png");
    manifest.output(dir / "metrics.json");
    manifest.write(dir);

    if (metrics.contains("fidelity")) out << "fidelity = " << num(metrics["fidelity"].get<double>()) << "\n";
    out << "delta = " << num(metrics["nonclassical_volume"].get<double>()) << "\n";
    if (metrics["cat_size"].is_null()) {
        out << "cat size = none (fewer than two lobes)\n";
    } else {
        out << "cat size = " << num(metrics["cat_size"].get<double>()) << "\n";
    }
    out << "parity = " << num(state.parity()) << "\n"
        << "<n> = " << num(state.mean_photon_number()) << "\n";
    return 0;
}

// ---- compare ----------------------------------------------------------------

struct CompareOptions {
    std::string tpc_schedule, spc_schedule;
    std::optional<double> t_end, eval_time;
    std::optional<int> resolution;
};

int cmd_compare(const Globals& g, const CompareOptions& o, std::ostream& out) {
    RunConfig cfg = resolve_config(g);
    if (o.eval_time) cfg.analysis.eval_time = *o.eval_time;
    if (o.resolution) cfg.analysis.resolution = *o.resolution;
    cfg.validate();

    Manifest manifest("compare", g, cfg);
    if (!g.config.empty()) manifest.input(g.config);

    Schedule tpc;
    if (o.tpc_schedule.empty()) {
        tpc = plan_tpc(cfg).schedule;
    } else {
        tpc = read_schedule_csv(o.tpc_schedule);
        manifest.input(o.tpc_schedule);
    }
    Schedule spc;
    if (o.spc_schedule.empty()) {
        spc = make_spc(cfg);
    } else {
        spc = read_schedule_csv(o.spc_schedule);
        manifest.input(o.spc_schedule);
    }

    const double beta_target = tpc.samples().back().drive;
    const double t_end = o.t_end.value_or(std::max(tpc.duration(), spc.duration()));
    const FockBasis basis = evolution_basis(cfg, std::max({tpc.max_drive(), spc.max_drive(), beta_target}));
    const QuantumState target = target_cat(beta_target, Parity::Even, basis, cfg.planner.kerr);

    EvolutionConfig ec = evolution_config(cfg, tpc.duration());
    ec.kappa = 0.0;
    ec.t_end = t_end;
    ec.target = target;
    ec.snapshot_times.push_back(cfg.analysis.eval_time);

    const auto runs = parallel_map(std::vector<const Schedule*>{&tpc, &spc}, [&](const Schedule* s) {
        return evolve_schrodinger(fock_state(0, basis), *s, ec);
    });
    const PhaseGrid grid = cfg.analysis.half_width ? PhaseGrid(*cfg.analysis.half_width, cfg.analysis.resolution)
                                                   : PhaseGrid::covering(target, cfg.analysis.resolution);
    const ProtocolReport report =
        protocol_report(runs[0], runs[1], target, grid, cfg.analysis.eval_time, cfg.analysis.report_samples);

    const fs::path dir = g.out_dir;
    write_report_csv(dir / "compare.csv", report);
    write_trajectory_csv(dir / "tpc_trajectory.csv", runs[0]);
    write_trajectory_csv(dir / "spc_trajectory.csv", runs[1]);
    json summary = {{"format_version", kFormatVersion},
                    {"eval_time", report.eval_time},
                    {"target_beta", beta_target},
                    {"fidelity_tpc", report.fidelity_tpc_at},
                    {"fidelity_spc", report.fidelity_spc_at},
                    {"delta_tpc", report.volume_tpc_at},
                    {"delta_spc", report.volume_spc_at},
                    {"fidelity_crossings", report.fidelity_crossings},
                    {"delta_crossings", report.volume_crossings}};
    write_json(dir / "compare_summary.json", summary);
    for (const char* f : {"compare.csv", "tpc_trajectory.csv", "spc_trajectory.csv", "compare_summary.json"}) {
        manifest.output(dir / f);
    }
    manifest.write(dir);

    out << "t = " << num(report.eval_time, "%.4g") << "\n"
        << "F_TPC = " << num(report.fidelity_tpc_at) << "  F_SPC = " << num(report.fidelity_spc_at) << "\n"
        << "delta_TPC = " << num(report.volume_tpc_at) << "  delta_SPC = " << num(report.volume_spc_at) << "\n";
    return 0;
}

// ---- sweep ------------------------------------------------------------------

struct SweepOptions {
    std::vector<double> delta0_list;
    std::optional<double> duration;
    std::optional<int> resolution;
    unsigned workers = 0;
};

struct SweepRow {
    double delta0 = 0.0, beta_f = 0.0, total_penalty = 0.0, duration = 0.0, fidelity = 0.0;
    std::optional<double> cat_size;
};

int cmd_sweep(const Globals& g, const SweepOptions& o, std::ostream& out) {
    RunConfig cfg = resolve_config(g);
    if (o.duration) cfg.schedule.duration = *o.duration;
    if (o.resolution) cfg.analysis.resolution = *o.resolution;
    cfg.validate();
    if (o.delta0_list.empty()) throw ConfigError("--delta0-list: at least one value required");
    for (double d : o.delta0_list) {
        if (!(d > 0.0)) throw ConfigError("--delta0-list: values must be > 0");
    }

    const auto rows = parallel_map(
        o.delta0_list,
        [&](double delta0) {
            RunConfig run = cfg;
            run.planner.delta0 = delta0;
            const PlanResult plan = plan_tpc(run);
            const double beta_f = plan.path.final_drive();
            const FockBasis basis = evolution_basis(run, beta_f);
            EvolutionConfig ec = evolution_config(run, plan.duration);
            ec.kappa = 0.0;
            ec.t_end = -1.0;
            ec.target = target_cat(beta_f, Parity::Even, basis, run.planner.kerr);
            const Trajectory traj = evolve_schrodinger(fock_state(0, basis), plan.schedule, ec);

            SweepRow row{delta0, beta_f, plan.path.total_penalty, plan.duration, traj.fidelity.back(), std::nullopt};
            try {
                row.cat_size = cat_size(traj.final_state(), analysis_grid(run, traj.final_state()));
            } catch (const LobeDetectionError&) {
            }
            return row;
        },
        o.workers);

    const fs::path dir = g.out_dir;
    fs::create_directories(dir);
    const fs::path table = dir / "sweep.csv";
    std::FILE* fp = std::fopen(table.string().c_str(), "w");
    if (!fp) throw ConfigError("cannot open " + table.string() + " for writing");
    std::fprintf(fp, "# kerrcat sweep v%d\ndelta0,beta_f,total_penalty,duration,fidelity,cat_size,ideal_size\n",
                 kFormatVersion);
    for (const auto& r : rows) {
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.delta0, r.beta_f, r.total_penalty,
                     r.duration, r.fidelity, r.cat_size.value_or(std::nan("")),
                     2.0 * std::sqrt(r.beta_f / cfg.planner.kerr));
    }
    std::fclose(fp);

    Manifest manifest("sweep", g, cfg);
    if (!g.config.empty()) manifest.input(g.config);
    manifest.output(table);
    manifest.write(dir);

    out << "delta0 beta_f I[C] fidelity d 2sqrt(beta_f)\n";
    for (const auto& r : rows) {
        out << num(r.delta0, "%.4g") << " " << num(r.beta_f) << " " << num(r.total_penalty) << " "
            << num(r.fidelity) << " " << (r.cat_size ? num(*r.cat_size) : std::string("none")) << " "
            << num(2.0 * std::sqrt(r.beta_f / cfg.planner.kerr)) << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"kerrcat: optimal adiabatic cat-state preparation in a Kerr resonator"};
    app.require_subcommand(1);

    Globals g;
    for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
    g.out_dir = default_out_dir().string();
    app.add_option("--dim", g.dim, "Fock basis dimension (default: automatic from the drive)");
    app.add_option("--seed", g.seed, "Recorded in the manifest; the pipeline is deterministic");
    app.add_option("--out-dir", g.out_dir, "Output directory (default: $KERRCAT_OUT_DIR or ./kerrcat_out)");
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);

    PlanOptions plan;
    auto* plan_cmd = app.add_subcommand("plan", "Plan a control path and write path/schedule CSVs");
    plan_cmd->add_option("--delta0", plan.delta0, "Initial detuning in units of K");
    plan_cmd->add_option("--duration", plan.duration, "Ramp duration T in 1/K");
    plan_cmd->add_option("--peak-penalty", plan.peak_penalty, "Choose T = I[C] / peak penalty");
    plan_cmd->add_option("--samples", plan.samples, "Schedule samples");
    plan_cmd->add_flag("--spc", plan.spc, "Emit the single-parameter baseline schedule instead");
    plan_cmd->add_option("--spc-beta0", plan.spc_beta0, "Baseline drive amplitude");
    plan_cmd->add_option("--spc-ramp", plan.spc_ramp, "Baseline ramp constant T");
    plan_cmd->add_option("--spc-end", plan.spc_end, "Baseline schedule end time (default T)");

    EvolveOptions evolve;
    auto* evolve_cmd = app.add_subcommand("evolve", "Integrate the dynamics along a schedule");
    evolve_cmd->add_option("--schedule", evolve.schedule, "Schedule CSV")->required()->check(CLI::ExistingFile);
    evolve_cmd->add_option("--initial", evolve.initial, "Initial Fock state, 0 or 1");
    evolve_cmd->add_option("--kappa", evolve.kappa, "Single-photon loss rate");
    evolve_cmd->add_option("--kappa-list", evolve.kappa_list, "Run one trajectory per loss rate")->delimiter(',');
    evolve_cmd->add_option("--dt", evolve.dt, "Time step (default: automatic)");
    evolve_cmd->add_option("--t-end", evolve.t_end, "End time (default: schedule duration)");
    evolve_cmd->add_option("--snapshots", evolve.snapshots, "Snapshot times as fractions of T")->delimiter(',');
    evolve_cmd->add_option("--target-beta", evolve.target_beta, "Target cat drive (default: final drive)");
    evolve_cmd->add_option("--workers", evolve.workers, "Parallel workers for --kappa-list");

    AnalyzeOptions analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Wigner function and metrics of a state file");
    analyze_cmd->add_option("--state", analyze.state, "State JSON")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--half-width", analyze.half_width, "Phase-space grid half-width");
    analyze_cmd->add_option("--resolution", analyze.resolution, "Grid points per axis (>= 64)");
    analyze_cmd->add_option("--target-beta", analyze.target_beta, "Report fidelity against the cat of this drive");

    CompareOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "Planned vs single-parameter protocol on a common time axis");
    compare_cmd->add_option("--tpc-schedule", compare.tpc_schedule, "Planned schedule CSV (default: plan now)");
    compare_cmd->add_option("--spc-schedule", compare.spc_schedule, "Baseline schedule CSV (default: from config)");
    compare_cmd->add_option("--t-end", compare.t_end, "Common end time (default: longer schedule)");
    compare_cmd->add_option("--eval-time", compare.eval_time, "Summary time");
    compare_cmd->add_option("--resolution", compare.resolution, "Wigner grid points per axis");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Plan and evolve for several initial detunings");
    sweep_cmd->add_option("--delta0-list", sweep.delta0_list, "Initial detunings")->required()->delimiter(',');
    sweep_cmd->add_option("--duration", sweep.duration, "Ramp duration T in 1/K");
    sweep_cmd->add_option("--resolution", sweep.resolution, "Wigner grid points per axis");
    sweep_cmd->add_option("--workers", sweep.workers, "Parallel workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*plan_cmd) return cmd_plan(g, plan, out);
        if (*evolve_cmd) return cmd_evolve(g, evolve, out);
        if (*analyze_cmd) return cmd_analyze(g, analyze, out);
        if (*compare_cmd) return cmd_compare(g, compare, out);
        if (*sweep_cmd) return cmd_sweep(g, sweep, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace kerrcat
