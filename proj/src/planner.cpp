#include "kerrcat/planner.hpp"

#include "kerrcat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kerrcat {

namespace {

// The Kerr Hamiltonian is real symmetric and tridiagonal inside a parity sector:
// sector index i <-> Fock level 2i + offset.
struct SectorSolution {
    RealVector energies;
    RealMatrix states;
    RealVector number;    // diag of a^dag a in the sector
    RealVector coupling;  // <i+1| a^dag^2 |i>
};

SectorSolution solve_sector(double detuning, double drive, const PlannerConfig& cfg, int dim) {
    const int offset = cfg.parity == Parity::Even ? 0 : 1;
    const int m = (dim - offset + 1) / 2;
    SectorSolution s;
    s.number.resize(m);
    s.coupling.resize(std::max(0, m - 1));
    RealMatrix h = RealMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        const double n = 2 * i + offset;
        s.number[i] = n;
        h(i, i) = cfg.kerr * n * (n - 1) + detuning * n;
    }
    for (int i = 0; i + 1 < m; ++i) {
        const double n = 2 * i + offset;
        s.coupling[i] = std::sqrt((n + 1) * (n + 2));
        h(i + 1, i) = h(i, i + 1) = -drive * s.coupling[i];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("planner: sector eigensolver failed");
    s.energies = solver.eigenvalues();
    s.states = solver.eigenvectors();
    return s;
}

TransitionElements elements_from(const SectorSolution& s, const PlannerConfig& cfg) {
    const int m = static_cast<int>(s.energies.size());
    const int count = std::min(cfg.level_cutoff, m - 1);
    TransitionElements out;
    out.drive.resize(count);
    out.number.resize(count);
    out.gaps.resize(count);

    const auto ground = s.states.col(0);
    RealVector two_photon_ground = RealVector::Zero(m);
    for (int i = 0; i + 1 < m; ++i) {
        two_photon_ground[i + 1] += s.coupling[i] * ground[i];
        two_photon_ground[i] += s.coupling[i] * ground[i + 1];
    }
    const RealVector number_ground = s.number.cwiseProduct(ground);

    for (int k = 0; k < count; ++k) {
        const auto phi = s.states.col(k + 1);
        out.drive[k] = phi.dot(two_photon_ground);
        out.number[k] = phi.dot(number_ground);
        out.gaps[k] = s.energies[k + 1] - s.energies[0];
        if (!(out.gaps[k] >= cfg.gap_floor)) {
            throw DegenerateGapError("penalty: same-parity gap " + std::to_string(out.gaps[k]) +
                                     " below floor " + std::to_string(cfg.gap_floor));
        }
    }
    return out;
}

double drive_limit(const PlannerConfig& cfg, int dim) { return cfg.kerr * dim / 8.0; }

PathPoint make_point(double detuning, double drive, double theta, const PlannerConfig& cfg) {
    PathPoint p;
    p.detuning = detuning;
    p.drive = drive;
    p.theta = theta;
    const Direction dir = [&] {
        const double dd = std::cos(theta);
        const double db = std::sin(theta) / cfg.drive_weight;
        const double norm = std::hypot(dd, db);
        return Direction{dd / norm, db / norm};
    }();
    const auto el = transition_elements(detuning, drive, cfg);
    for (Eigen::Index k = 0; k < el.gaps.size(); ++k) {
        const double g2 = el.gaps[k] * el.gaps[k];
        p.penalty += std::abs(dir.detuning * el.number[k] - dir.drive * el.drive[k]) / g2;
        p.landscape += std::hypot(el.drive[k], el.number[k]) / g2;
    }
    return p;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const auto j = static_cast<std::size_t>(it - x.begin());
    const double f = (at - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + f * (y[j] - y[j - 1]);
}

}  // namespace

void PlannerConfig::validate() const {
    if (!(kerr > 0.0)) throw ConfigError("planner.kerr: must be > 0");
    if (!(delta0 > 0.0)) throw ConfigError("planner.delta0: must be > 0");
    if (!(beta0 >= 0.0)) throw ConfigError("planner.beta0: must be >= 0");
    if (!(ds > 0.0)) throw ConfigError("planner.ds: must be > 0");
    if (theta_samples < 8) throw ConfigError("planner.theta_samples: must be >= 8");
    if (level_cutoff < 1) throw ConfigError("planner.level_cutoff: must be >= 1");
    if (!(drive_weight > 0.0)) throw ConfigError("planner.drive_weight: must be > 0");
    if (max_steps < 1) throw ConfigError("planner.max_steps: must be >= 1");
    if (max_dim < basis.dim()) throw ConfigError("planner.max_dim: must be >= dim");
}

TransitionElements transition_elements(double detuning, double drive, const PlannerConfig& cfg) {
    return elements_from(solve_sector(detuning, drive, cfg, cfg.basis.dim()), cfg);
}

double penalty_density(double detuning, double drive, Direction dir, const PlannerConfig& cfg) {
    const auto el = transition_elements(detuning, drive, cfg);
    double q = 0.0;
    for (Eigen::Index k = 0; k < el.gaps.size(); ++k) {
        q += std::abs(dir.detuning * el.number[k] - dir.drive * el.drive[k]) / (el.gaps[k] * el.gaps[k]);
    }
    return q;
}

double penalty_landscape(double detuning, double drive, const PlannerConfig& cfg) {
    const auto el = transition_elements(detuning, drive, cfg);
    double q = 0.0;
    for (Eigen::Index k = 0; k < el.gaps.size(); ++k) {
        q += std::hypot(el.drive[k], el.number[k]) / (el.gaps[k] * el.gaps[k]);
    }
    return q;
}

PathPoint descent_step(const PathPoint& current, const PlannerConfig& cfg) {
    return descent_step(current, cfg, [&](double d, double b) { return penalty_landscape(d, b, cfg); });
}

PathPoint descent_step(const PathPoint& current, const PlannerConfig& cfg,
                       const std::function<double(double, double)>& objective) {
    if (!(current.detuning > 0.0)) throw ConfigError("descent_step: current detuning must be > 0");

    const double limit = drive_limit(cfg, cfg.basis.dim());
    const int n = cfg.theta_samples;
    double best_value = std::numeric_limits<double>::infinity();
    double best_theta = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < n; ++k) {
        const double theta = std::numbers::pi / 2 + (std::numbers::pi / 2) * k / (n - 1);
        const double d = current.detuning + cfg.ds * std::cos(theta);
        const double b = current.drive + cfg.ds * std::sin(theta) / cfg.drive_weight;
        if (b > limit) continue;
        const double value = objective(d, b);
        // Scanning upward in theta, "<=" with a relative slack sends ties to larger theta.
        if (value <= best_value * (1.0 + 1e-12) || std::isinf(best_value)) {
            best_value = std::min(value, best_value);
            best_theta = theta;
        }
    }
    if (std::isnan(best_theta)) {
        throw PlannerStuckError("descent_step: every candidate exceeds the drive bound " + std::to_string(limit));
    }
    return make_point(current.detuning + cfg.ds * std::cos(best_theta),
                      current.drive + cfg.ds * std::sin(best_theta) / cfg.drive_weight, best_theta, cfg);
}

ControlPath plan_path(const PlannerConfig& config) {
    config.validate();
    PlannerConfig cfg = config;

    ControlPath path;
    path.ds = cfg.ds;
    PathPoint current;
    current.detuning = cfg.delta0;
    current.drive = cfg.beta0;
    path.points.push_back(current);

    for (int step = 0;; ++step) {
        if (step >= cfg.max_steps) throw PlannerStuckError("plan_path: exceeded max_steps");

        const double reach = current.drive + cfg.ds / cfg.drive_weight;
        if (reach > drive_limit(cfg, cfg.basis.dim())) {
            const int wanted = static_cast<int>(std::ceil(8.0 * reach / cfg.kerr)) + 10;
            if (wanted > cfg.max_dim) {
                throw PlannerStuckError("plan_path: drive " + std::to_string(reach) +
                                        " needs dim " + std::to_string(wanted) + " > max_dim");
            }
            cfg.basis = FockBasis(wanted);
        }

        PathPoint next = descent_step(current, cfg);
        if (next.detuning <= 0.0) {
            const double f = current.detuning / (current.detuning - next.detuning);
            const double drive = current.drive + f * (next.drive - current.drive);
            next = make_point(0.0, drive, next.theta, cfg);
            path.points.push_back(next);
            break;
        }
        path.points.push_back(next);
        current = next;
    }

    // The start point takes the direction of the first step.
    const double theta0 = path.points[1].theta;
    path.points[0] = make_point(cfg.delta0, cfg.beta0, theta0, cfg);

    path.arc.assign(path.points.size(), 0.0);
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const double seg = std::hypot(path.points[i].detuning - path.points[i - 1].detuning,
                                      path.points[i].drive - path.points[i - 1].drive);
        path.arc[i] = path.arc[i - 1] + seg;
        path.total_penalty += 0.5 * seg * (path.points[i].penalty + path.points[i - 1].penalty);
    }
    path.basis_dim = cfg.basis.dim();
    return path;
}

const char* to_string(ScheduleSource source) {
    switch (source) {
        case ScheduleSource::Planned: return "planned";
        case ScheduleSource::Spc: return "spc";
        case ScheduleSource::Custom: return "custom";
    }
    return "custom";
}

ScheduleSource schedule_source_from_string(const std::string& name) {
    if (name == "planned") return ScheduleSource::Planned;
    if (name == "spc") return ScheduleSource::Spc;
    if (name == "custom") return ScheduleSource::Custom;
    throw ConfigError("unknown schedule source '" + name + "'");
}

Schedule::Schedule(std::vector<ScheduleSample> samples, ScheduleSource source, double ramp_time)
    : samples_(std::move(samples)), source_(source), ramp_time_(ramp_time) {
    if (samples_.size() < 2) throw ConfigError("schedule: needs at least two samples");
    if (samples_.front().t != 0.0) throw ConfigError("schedule: first sample must be at t = 0");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (!(samples_[i].t > samples_[i - 1].t)) throw ConfigError("schedule: times must be strictly increasing");
    }
    for (const auto& s : samples_) {
        if (!(s.drive >= 0.0) || !std::isfinite(s.detuning)) throw ConfigError("schedule: invalid control values");
    }
}

HamiltonianParams Schedule::at(double t, double kerr) const {
    HamiltonianParams p;
    p.kerr = kerr;
    if (t <= samples_.front().t) {
        p.detuning = samples_.front().detuning;
        p.drive = samples_.front().drive;
        return p;
    }
    if (t >= samples_.back().t) {
        p.detuning = samples_.back().detuning;
        p.drive = samples_.back().drive;
        return p;
    }
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                     [](double v, const ScheduleSample& s) { return v < s.t; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.t) / (hi.t - lo.t);
    p.detuning = lo.detuning + f * (hi.detuning - lo.detuning);
    p.drive = lo.drive + f * (hi.drive - lo.drive);
    return p;
}

double Schedule::max_drive() const {
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, s.drive);
    return m;
}

Schedule schedule_from_path(const ControlPath& path, double duration, int sample_count) {
    if (!(duration > 0.0)) throw ConfigError("schedule_from_path: duration must be > 0");
    if (!(path.total_penalty > 0.0)) throw ConfigError("schedule_from_path: path has zero total penalty");
    if (sample_count < 2) throw ConfigError("schedule_from_path: sample_count must be >= 2");

    const std::size_t n = path.points.size();
    double q_max = 0.0;
    for (const auto& p : path.points) q_max = std::max(q_max, p.penalty);
    const double floor = 1e-9 * q_max;

    std::vector<double> cumulative(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double qa = std::max(path.points[i - 1].penalty, floor);
        const double qb = std::max(path.points[i].penalty, floor);
        cumulative[i] = cumulative[i - 1] + 0.5 * (qa + qb) * (path.arc[i] - path.arc[i - 1]);
    }
    const double total = cumulative.back();
    std::vector<double> node_times(n);
    for (std::size_t i = 0; i < n; ++i) node_times[i] = duration * cumulative[i] / total;
    for (std::size_t i = 1; i < n; ++i) {
        if (!(node_times[i] > node_times[i - 1])) throw NumericalError("schedule_from_path: non-monotone t(s)");
    }

    std::vector<double> detuning(n), drive(n);
    for (std::size_t i = 0; i < n; ++i) {
        detuning[i] = path.points[i].detuning;
        drive[i] = path.points[i].drive;
    }

    std::vector<ScheduleSample> samples(sample_count);
    for (int k = 0; k < sample_count; ++k) {
        const double t = duration * k / (sample_count - 1);
        const double s = interpolate(node_times, path.arc, t);
        samples[k] = {t, interpolate(path.arc, detuning, s), interpolate(path.arc, drive, s)};
    }
    samples.front() = {0.0, detuning.front(), drive.front()};
    samples.back() = {duration, detuning.back(), drive.back()};
    return Schedule(std::move(samples), ScheduleSource::Planned);
}

double time_for_penalty(const ControlPath& path, double peak_penalty) {
    if (!(peak_penalty > 0.0)) throw ConfigError("time_for_penalty: peak penalty must be > 0");
    return path.total_penalty / peak_penalty;
}

Schedule spc_schedule(double beta0, double ramp_time, int sample_count, double t_end) {
    if (!(beta0 > 0.0)) throw ConfigError("spc_schedule: beta0 must be > 0");
    if (!(ramp_time > 0.0)) throw ConfigError("spc_schedule: T must be > 0");
    if (sample_count < 2) throw ConfigError("spc_schedule: sample_count must be >= 2");
    if (t_end < 0.0) t_end = ramp_time;
    if (!(t_end > 0.0)) throw ConfigError("spc_schedule: t_end must be > 0");

    std::vector<ScheduleSample> samples(sample_count);
    for (int k = 0; k < sample_count; ++k) {
        const double t = t_end * k / (sample_count - 1);
        const double x = t / ramp_time;
        samples[k] = {t, 0.0, beta0 * (1.0 - std::exp(-x * x * x * x))};
    }
    return Schedule(std::move(samples), ScheduleSource::Spc, ramp_time);
}

AdiabaticityReport adiabaticity_report(const Schedule& schedule, const PlannerConfig& config) {
    PlannerConfig cfg = config;
    const int wanted = static_cast<int>(std::ceil(8.0 * schedule.max_drive() / cfg.kerr));
    if (wanted > cfg.basis.dim()) cfg.basis = FockBasis(wanted);

    const auto& s = schedule.samples();
    const std::size_t n = s.size();
    AdiabaticityReport report;
    report.times.resize(n);
    report.penalty_rate.resize(n);
    report.gap.resize(n);
    report.min_gap = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        const double dt = s[hi].t - s[lo].t;
        const double d_detuning = (s[hi].detuning - s[lo].detuning) / dt;
        const double d_drive = (s[hi].drive - s[lo].drive) / dt;

        const auto el = transition_elements(s[i].detuning, s[i].drive, cfg);
        double rate = 0.0;
        for (Eigen::Index k = 0; k < el.gaps.size(); ++k) {
            rate += std::abs(d_detuning * el.number[k] - d_drive * el.drive[k]) / (el.gaps[k] * el.gaps[k]);
        }
        report.times[i] = s[i].t;
        report.penalty_rate[i] = rate;
        report.gap[i] = el.gaps[0];
        if (el.gaps[0] < report.min_gap) {
            report.min_gap = el.gaps[0];
            report.t_min = s[i].t;
        }
    }
    return report;
}

}  // namespace kerrcat
