// planner.hpp: minimum-penalty control paths in the (detuning, drive) plane and
// their conversion into constant-penalty time schedules.

#pragma once

#include "kerrcat/fock.hpp"

#include <functional>
#include <vector>

namespace kerrcat {

struct PlannerConfig {
    double kerr = 1.0;
    double delta0 = 2.0;  ///< initial detuning, > 0
    double beta0 = 0.0;   ///< initial drive
    /// Step radius of the circle search, measured in the (Delta, drive_weight * beta) plane.
    double ds = 0.02;
    int theta_samples = 181;
    Parity parity = Parity::Even;
    FockBasis basis{40};
    /// Number of same-parity excited levels in the penalty sum.
    int level_cutoff = 8;
    /// Relative weight of beta in the search metric. Delta a^dag a - beta (a^dag^2 + a^2)
    /// equals (Delta/2)(x^2 + p^2) - beta (x^2 - p^2), so w = 2 weights both quadratic
    /// generators equally.
    double drive_weight = 2.0;
    int max_steps = 100000;
    /// The basis grows on demand to keep dim >= 8 beta / K; beyond this the planner gives up.
    int max_dim = 200;
    double gap_floor = 1e-8;

    /// Throws ConfigError on invalid settings.
    void validate() const;
};

/// Unit tangent (dDelta/ds, dbeta/ds) in the Euclidean (Delta, beta) plane.
struct Direction {
    double detuning = 0.0;
    double drive = 0.0;
};

/// Matrix elements between the sector ground state |phi_0> and the excited
/// same-parity states |phi_n>, n = 1..cutoff.
struct TransitionElements {
    RealVector drive;   ///< L_n = <phi_n| a^dag^2 + a^2 |phi_0>
    RealVector number;  ///< M_n = <phi_n| a^dag a |phi_0>
    RealVector gaps;    ///< E_n - E_0
};

TransitionElements transition_elements(double detuning, double drive, const PlannerConfig& cfg);

/// Q = sum_n |<phi_n| dH/ds |phi_0>| / (E_n - E_0)^2 for motion along `dir`,
/// where dH/ds = dDelta/ds a^dag a - dbeta/ds (a^dag^2 + a^2). Throws
/// DegenerateGapError when a same-parity gap falls below cfg.gap_floor.
double penalty_density(double detuning, double drive, Direction dir, const PlannerConfig& cfg);

/// Direction-free bound sum_n hypot(L_n, M_n) / (E_n - E_0)^2 >= Q for every unit
/// direction. This is the field the circle search descends.
double penalty_landscape(double detuning, double drive, const PlannerConfig& cfg);

struct PathPoint {
    double detuning = 0.0;
    double drive = 0.0;
    double penalty = 0.0;    ///< Q along the arrival direction
    double landscape = 0.0;  ///< penalty_landscape at this point
    double theta = 0.0;      ///< search angle of the arriving step, in [pi/2, pi]
};

struct ControlPath {
    std::vector<PathPoint> points;
    std::vector<double> arc;  ///< Euclidean arc length in (Delta, beta)
    double ds = 0.0;
    double total_penalty = 0.0;  ///< I[C] = integral of Q ds
    int basis_dim = 0;

    double final_drive() const { return points.back().drive; }
};

/// One circle-search step: candidates at theta_k uniformly spanning [pi/2, pi],
/// placed at (Delta + ds cos theta, beta + ds sin theta / w). Returns the
/// candidate minimizing the landscape; ties go to the larger theta.
PathPoint descent_step(const PathPoint& current, const PlannerConfig& cfg);

/// Same search against an arbitrary objective(Delta, beta).
PathPoint descent_step(const PathPoint& current, const PlannerConfig& cfg,
                       const std::function<double(double, double)>& objective);

/// Repeats descent_step from (delta0, beta0) until Delta reaches 0; the last
/// segment is interpolated so the endpoint has Delta = 0 exactly.
ControlPath plan_path(const PlannerConfig& cfg);

struct ScheduleSample {
    double t = 0.0;
    double detuning = 0.0;
    double drive = 0.0;
};

enum class ScheduleSource { Planned, Spc, Custom };

const char* to_string(ScheduleSource source);
ScheduleSource schedule_source_from_string(const std::string& name);

class Schedule {
public:
    Schedule() = default;
    Schedule(std::vector<ScheduleSample> samples, ScheduleSource source, double ramp_time = 0.0);

    const std::vector<ScheduleSample>& samples() const { return samples_; }
    ScheduleSource source() const { return source_; }
    /// Time of the last sample.
    double duration() const { return samples_.back().t; }
    /// Ramp constant T of an SPC pulse (0 for other sources).
    double ramp_time() const { return ramp_time_; }

    /// Linear interpolation in both controls, held constant outside the sampled range.
    HamiltonianParams at(double t, double kerr = 1.0) const;

    double max_drive() const;

private:
    std::vector<ScheduleSample> samples_;
    ScheduleSource source_ = ScheduleSource::Custom;
    double ramp_time_ = 0.0;
};

/// Constant-penalty parametrization t(s) = (T / I) integral_0^s Q ds', inverted onto
/// a uniform time grid.
Schedule schedule_from_path(const ControlPath& path, double duration, int sample_count = 2000);

/// T = I[C] / p_max.
double time_for_penalty(const ControlPath& path, double peak_penalty);

/// beta(t) = beta0 [1 - exp(-t^4 / T^4)] with Delta = 0, sampled uniformly on
/// [0, t_end] (t_end defaults to T).
Schedule spc_schedule(double beta0, double ramp_time, int sample_count = 2000, double t_end = -1.0);

struct AdiabaticityReport {
    std::vector<double> times;
    std::vector<double> penalty_rate;  ///< P_C(t)
    std::vector<double> gap;           ///< lowest same-parity gap
    double min_gap = 0.0;
    double t_min = 0.0;
};

AdiabaticityReport adiabaticity_report(const Schedule& schedule, const PlannerConfig& cfg);

}  // namespace kerrcat
