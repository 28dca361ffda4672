#include "kerrcat/dynamics.hpp"

#include "kerrcat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kerrcat {

namespace {

constexpr double kStabilityLimit = 0.1;
constexpr double kMaxStep = 5e-4;
constexpr double kNormDriftLimit = 1e-9;
constexpr double kTraceDriftLimit = 1e-8;
constexpr double kPositivityFloor = -1e-7;

double resolve_end(const Schedule& schedule, const EvolutionConfig& cfg) {
    const double t_end = cfg.t_end < 0.0 ? schedule.duration() : cfg.t_end;
    if (!(t_end > 0.0)) throw ConfigError("evolution.t_end: must be > 0");
    return t_end;
}

void validate_config(const EvolutionConfig& cfg) {
    if (!(cfg.kerr > 0.0)) throw ConfigError("evolution.kerr: must be > 0");
    if (!(cfg.dt >= 0.0)) throw ConfigError("evolution.dt: must be > 0 (or 0 for automatic)");
    if (!(cfg.kappa >= 0.0)) throw ConfigError("evolution.kappa: must be >= 0");
    if (cfg.store_every < 0) throw ConfigError("evolution.store_every: must be >= 0");
}

double max_norm_bound(const Schedule& schedule, const BandedHamiltonian& h, double kerr, double t_end) {
    double bound = 0.0;
    for (const auto& s : schedule.samples()) {
        if (s.t > t_end) break;
        bound = std::max(bound, h.norm_bound({kerr, s.detuning, s.drive}));
    }
    // Controls are held past the last sample.
    bound = std::max(bound, h.norm_bound(schedule.at(t_end, kerr)));
    return bound;
}

// Integration segments: boundaries at every requested snapshot time, each
// segment split into equal steps no longer than dt.
struct StepPlan {
    std::vector<double> boundaries;
    std::vector<long> steps;
    long total = 0;
};

StepPlan plan_steps(double t_end, double dt, const std::vector<double>& snapshots) {
    StepPlan plan;
    plan.boundaries.push_back(0.0);
    std::vector<double> cuts;
    for (double t : snapshots) {
        if (t > 0.0 && t < t_end) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (double t : cuts) plan.boundaries.push_back(t);
    plan.boundaries.push_back(t_end);
    for (std::size_t i = 1; i < plan.boundaries.size(); ++i) {
        const double span = plan.boundaries[i] - plan.boundaries[i - 1];
        const long n = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
        plan.steps.push_back(n);
        plan.total += n;
    }
    return plan;
}

double choose_step(const Schedule& schedule, const BandedHamiltonian& h, const EvolutionConfig& cfg, double t_end) {
    const double bound = max_norm_bound(schedule, h, cfg.kerr, t_end);
    if (cfg.dt == 0.0) return bound > 0.0 ? std::min(kMaxStep, kStabilityLimit / bound) : kMaxStep;
    if (cfg.dt * bound > kStabilityLimit * (1.0 + 1e-12)) {
        throw ConfigError("evolution.dt: dt * ||H|| = " + std::to_string(cfg.dt * bound) +
                          " exceeds the stability limit 0.1; use dt <= " + std::to_string(kStabilityLimit / bound));
    }
    return cfg.dt;
}

int default_store_every(double dt) { return std::max(1, static_cast<int>(std::lround(0.05 / dt))); }

double target_fidelity(const QuantumState& state, const EvolutionConfig& cfg) {
    if (!cfg.target) return std::numeric_limits<double>::quiet_NaN();
    const Vector& psi = cfg.target->amplitudes();
    if (state.is_pure()) return std::norm(psi.dot(state.amplitudes()));
    return (psi.adjoint() * state.density_matrix() * psi)(0, 0).real();
}

void record(Trajectory& traj, double t, QuantumState state, const EvolutionConfig& cfg) {
    traj.times.push_back(t);
    traj.fidelity.push_back(target_fidelity(state, cfg));
    traj.parity.push_back(state.parity());
    traj.photon_number.push_back(state.mean_photon_number());
    traj.trace.push_back(state.trace());
    traj.states.push_back(std::move(state));
}

// Drives a generic RK4 loop over the step plan. `step(t, dt)` advances the
// state in place; `snapshot(t)` records it.
template <typename Step, typename Snapshot>
void run_plan(const StepPlan& plan, int store_every, Step&& step, Snapshot&& snapshot) {
    long counter = 0;
    snapshot(0.0);
    for (std::size_t seg = 0; seg + 1 < plan.boundaries.size(); ++seg) {
        const double t0 = plan.boundaries[seg];
        const double t1 = plan.boundaries[seg + 1];
        const long n = plan.steps[seg];
        const double h = (t1 - t0) / n;
        for (long k = 0; k < n; ++k) {
            const double t = t0 + k * h;
            step(t, h);
            ++counter;
            const bool last_in_segment = k + 1 == n;
            if (last_in_segment || counter % store_every == 0) {
                snapshot(last_in_segment ? t1 : t0 + (k + 1) * h);
            }
        }
    }
}

}  // namespace

std::size_t Trajectory::nearest(double t) const {
    if (times.empty()) throw std::logic_error("Trajectory::nearest: empty trajectory");
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    if (it == times.end()) return times.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

double stable_time_step(const Schedule& schedule, const FockBasis& basis, double kerr, double t_end) {
    const BandedHamiltonian h(basis);
    const double bound = max_norm_bound(schedule, h, kerr, t_end);
    return bound > 0.0 ? std::min(kMaxStep, kStabilityLimit / bound) : kMaxStep;
}

Trajectory evolve_schrodinger(const QuantumState& psi0, const Schedule& schedule, const EvolutionConfig& cfg) {
    validate_config(cfg);
    if (!psi0.is_pure()) throw ConfigError("evolve_schrodinger: initial state must be pure");
    if (cfg.kappa != 0.0) throw ConfigError("evolve_schrodinger: kappa must be 0; use evolve_lindblad");
    psi0.validate(1e-9);
    if (cfg.target && cfg.target->dim() != psi0.dim()) throw ConfigError("evolution.target: dimension mismatch");

    const FockBasis basis(psi0.dim());
    const BandedHamiltonian h(basis);
    const double t_end = resolve_end(schedule, cfg);
    const double dt = choose_step(schedule, h, cfg, t_end);
    const StepPlan plan = plan_steps(t_end, dt, cfg.snapshot_times);

    Trajectory traj;
    traj.dt = t_end / static_cast<double>(plan.total);
    traj.steps = plan.total;
    const int store_every = cfg.store_every > 0 ? cfg.store_every : default_store_every(traj.dt);

    Vector psi = psi0.amplitudes();
    Vector k1, k2, k3, k4, tmp;
    const Complex minus_i(0.0, -1.0);

    auto rhs = [&](double t, const Vector& x, Vector& out) {
        h.apply(schedule.at(t, cfg.kerr), x, out);
        out *= minus_i;
    };
    auto step = [&](double t, double dt_step) {
        rhs(t, psi, k1);
        tmp = psi + (0.5 * dt_step) * k1;
        rhs(t + 0.5 * dt_step, tmp, k2);
        tmp = psi + (0.5 * dt_step) * k2;
        rhs(t + 0.5 * dt_step, tmp, k3);
        tmp = psi + dt_step * k3;
        rhs(t + dt_step, tmp, k4);
        psi += (dt_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double drift = std::abs(psi.norm() - 1.0);
        if (!(drift <= kNormDriftLimit)) {
            throw IntegratorError("evolve_schrodinger: norm drift " + std::to_string(drift) + "; reduce dt",
                                  t + dt_step);
        }
    };
    run_plan(plan, store_every, step, [&](double t) { record(traj, t, QuantumState::pure(psi), cfg); });
    return traj;
}

Trajectory evolve_lindblad(const QuantumState& rho0, const Schedule& schedule, const EvolutionConfig& cfg) {
    validate_config(cfg);
    rho0.validate(1e-9);
    if (cfg.target && cfg.target->dim() != rho0.dim()) throw ConfigError("evolution.target: dimension mismatch");

    const int d = rho0.dim();
    const FockBasis basis(d);
    const BandedHamiltonian h(basis);
    const double t_end = resolve_end(schedule, cfg);
    const double dt = choose_step(schedule, h, cfg, t_end);
    const StepPlan plan = plan_steps(t_end, dt, cfg.snapshot_times);

    Trajectory traj;
    traj.dt = t_end / static_cast<double>(plan.total);
    traj.steps = plan.total;
    const int store_every = cfg.store_every > 0 ? cfg.store_every : default_store_every(traj.dt);

    RealVector sqrt_n(d);
    for (int m = 0; m < d; ++m) sqrt_n[m] = std::sqrt(static_cast<double>(m));

    Matrix rho = rho0.to_density();
    Matrix k1, k2, k3, k4, tmp, x;
    const Complex minus_i(0.0, -1.0);
    const double kappa = cfg.kappa;

    auto rhs = [&](double t, const Matrix& r, Matrix& out) {
        h.apply(schedule.at(t, cfg.kerr), r, x);
        out = minus_i * (x - x.adjoint());
        if (kappa == 0.0) return;
        for (int n = 0; n < d; ++n) {
            for (int m = 0; m < d; ++m) {
                Complex jump = 0.0;
                if (m + 1 < d && n + 1 < d) jump = sqrt_n[m + 1] * sqrt_n[n + 1] * r(m + 1, n + 1);
                out(m, n) += kappa * (jump - 0.5 * (m + n) * r(m, n));
            }
        }
    };
    auto step = [&](double t, double dt_step) {
        rhs(t, rho, k1);
        tmp = rho + (0.5 * dt_step) * k1;
        rhs(t + 0.5 * dt_step, tmp, k2);
        tmp = rho + (0.5 * dt_step) * k2;
        rhs(t + 0.5 * dt_step, tmp, k3);
        tmp = rho + dt_step * k3;
        rhs(t + dt_step, tmp, k4);
        rho += (dt_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double drift = std::abs(rho.trace().real() - 1.0);
        if (!(drift <= kTraceDriftLimit)) {
            throw IntegratorError("evolve_lindblad: trace drift " + std::to_string(drift),
                                  t + dt_step);
        }
    };
    auto snapshot = [&](double t) {
        const Matrix herm = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
        const double lowest = solver.eigenvalues().minCoeff();
        if (lowest < kPositivityFloor) {
            throw IntegratorError("evolve_lindblad: density eigenvalue " + std::to_string(lowest),
                                  t);
        }
        record(traj, t, QuantumState::density(herm), cfg);
    };
    run_plan(plan, store_every, step, snapshot);
    return traj;
}

LevelTrace spectrum_along_schedule(const Schedule& schedule, const FockBasis& basis, int level_count, double kerr,
                                   int stride) {
    if (level_count < 1 || level_count > basis.dim()) throw ConfigError("spectrum_along_schedule: bad level_count");
    if (stride < 1) throw ConfigError("spectrum_along_schedule: stride must be >= 1");

    const auto& samples = schedule.samples();
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < samples.size(); i += static_cast<std::size_t>(stride)) picks.push_back(i);
    if (picks.back() != samples.size() - 1) picks.push_back(samples.size() - 1);

    LevelTrace trace;
    trace.energies.resize(static_cast<Eigen::Index>(picks.size()), level_count);
    Spectrum previous;
    for (std::size_t row = 0; row < picks.size(); ++row) {
        const auto& s = samples[picks[row]];
        const Spectrum full = eigendecompose(build_hamiltonian({kerr, s.detuning, s.drive}, basis));
        Spectrum lowest;
        lowest.energies = full.energies.head(level_count);
        lowest.states = full.states.leftCols(level_count);
        lowest.parities.assign(full.parities.begin(), full.parities.begin() + level_count);
        if (row > 0) lowest = align_to(previous, std::move(lowest));

        trace.times.push_back(s.t);
        trace.energies.row(static_cast<Eigen::Index>(row)) = lowest.energies.transpose();
        trace.parities.push_back(lowest.parities);
        previous = std::move(lowest);
    }
    return trace;
}

}  // namespace kerrcat
