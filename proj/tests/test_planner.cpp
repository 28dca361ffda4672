#include "kerrcat/errors.hpp"
#include "kerrcat/planner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace kerrcat;

namespace {

const ControlPath& default_path() {
    static const ControlPath path = plan_path(PlannerConfig{});
    return path;
}

}  // namespace

TEST(PlannerConfig, RejectsInvalidSettings) {
    PlannerConfig cfg;
    cfg.delta0 = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(plan_path(cfg), ConfigError);
    cfg = PlannerConfig{};
    cfg.ds = -0.1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = PlannerConfig{};
    cfg.max_dim = 10;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Penalty, PureDriveDirectionAtUndrivenPoint) {
    // Only |2> couples to |0> through a^dag^2, with <2|a^dag^2|0> = sqrt(2) and gap 6K.
    const PlannerConfig cfg;
    EXPECT_NEAR(penalty_density(2.0, 0.0, {0.0, 1.0}, cfg), std::sqrt(2.0) / 36.0, 1e-12);
}

TEST(Penalty, DetuningDirectionAtUndrivenPointIsFree) {
    // Fock states are eigenstates for every Delta when beta = 0.
    EXPECT_NEAR(penalty_density(2.0, 0.0, {1.0, 0.0}, PlannerConfig{}), 0.0, 1e-14);
}

TEST(Penalty, TransitionElementsMatchUndrivenOracle) {
    const auto el = transition_elements(2.0, 0.0, PlannerConfig{});
    ASSERT_EQ(el.gaps.size(), 8);
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(el.gaps[k], analytic_energy(2 * (k + 1), 2.0), 1e-9);
    EXPECT_NEAR(std::abs(el.drive[0]), std::sqrt(2.0), 1e-12);
}

TEST(Penalty, LandscapeBoundsEveryDirection) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> det(0.0, 2.0), drv(0.0, 4.5), ang(0.0, 2.0 * std::numbers::pi);
    const PlannerConfig cfg;
    for (int trial = 0; trial < 40; ++trial) {
        const double d = det(rng), b = drv(rng), a = ang(rng);
        EXPECT_LE(penalty_density(d, b, {std::cos(a), std::sin(a)}, cfg), penalty_landscape(d, b, cfg) + 1e-14);
    }
}

TEST(Penalty, DegenerateSameParityGapIsAnError) {
    // At beta = 0, Delta = -K the levels |0> and |2> are degenerate.
    EXPECT_THROW(penalty_density(-1.0, 0.0, {0.0, 1.0}, PlannerConfig{}), DegenerateGapError);
}

TEST(DescentStep, StaysOnSearchCircleAndInQuadrant) {
    const PlannerConfig cfg;
    PathPoint p{1.3, 1.7};
    const PathPoint next = descent_step(p, cfg);
    const double dd = next.detuning - p.detuning;
    const double db = (next.drive - p.drive) * cfg.drive_weight;
    EXPECT_NEAR(std::hypot(dd, db), cfg.ds, 1e-12);
    EXPECT_GE(next.theta, std::numbers::pi / 2 - 1e-12);
    EXPECT_LE(next.theta, std::numbers::pi + 1e-12);
}

TEST(DescentStep, FollowsCustomObjective) {
    const PlannerConfig cfg;
    const PathPoint start{1.0, 1.0};
    const PathPoint up = descent_step(start, cfg, [](double, double b) { return -b; });
    EXPECT_NEAR(up.theta, std::numbers::pi / 2, 1e-12);
    const PathPoint left = descent_step(start, cfg, [](double d, double) { return d; });
    EXPECT_NEAR(left.theta, std::numbers::pi, 1e-12);
    // Flat objective: ties resolve to the largest angle.
    const PathPoint flat = descent_step(start, cfg, [](double, double) { return 1.0; });
    EXPECT_NEAR(flat.theta, std::numbers::pi, 1e-12);
}

TEST(PlanPath, EndsOnZeroDetuningInExpectedDriveWindow) {
    const ControlPath& path = default_path();
    EXPECT_EQ(path.points.back().detuning, 0.0);
    EXPECT_GE(path.final_drive(), 3.8);
    EXPECT_LE(path.final_drive(), 4.8);
    EXPECT_DOUBLE_EQ(path.points.front().detuning, 2.0);
    EXPECT_DOUBLE_EQ(path.points.front().drive, 0.0);
    EXPECT_GT(path.total_penalty, 0.0);
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        EXPECT_GT(path.arc[i], path.arc[i - 1]);
        EXPECT_LE(path.points[i].detuning, path.points[i - 1].detuning + 1e-15);
        EXPECT_GE(path.points[i].drive, path.points[i - 1].drive - 1e-15);
    }
}

TEST(PlanPath, RefinementMovesEndpointLittle) {
    PlannerConfig fine;
    fine.ds = 0.01;
    const double coarse = default_path().final_drive();
    EXPECT_LT(std::abs(plan_path(fine).final_drive() - coarse) / coarse, 0.02);
}

TEST(PlanPath, PenaltyBoundedAndUnimodal) {
    const ControlPath& path = default_path();
    std::vector<double> q;
    for (const auto& p : path.points) {
        EXPECT_LT(p.penalty, 0.5);
        q.push_back(p.landscape);
    }
    std::vector<double> smooth(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1, hi = std::min(q.size() - 1, i + 1);
        smooth[i] = (q[lo] + q[i] + q[hi]) / 3.0;
    }
    const auto peak = std::max_element(smooth.begin(), smooth.end()) - smooth.begin();
    for (long i = 1; i <= peak; ++i) EXPECT_GE(smooth[i], smooth[i - 1] - 1e-12) << i;
    for (std::size_t i = peak + 1; i < smooth.size(); ++i) EXPECT_LE(smooth[i], smooth[i - 1] + 1e-12) << i;
    EXPECT_GT(peak, 0);
    EXPECT_LT(static_cast<std::size_t>(peak), smooth.size() - 1);
}

TEST(PlanPath, LargerInitialDetuningGivesLargerDrive) {
    PlannerConfig cfg;
    double previous = 0.0;
    for (double d0 : {1.0, 2.0, 3.0}) {
        cfg.delta0 = d0;
        const double bf = plan_path(cfg).final_drive();
        EXPECT_GT(bf, previous);
        previous = bf;
    }
}

TEST(Schedule, ValidatesSamples) {
    EXPECT_THROW(Schedule({{0.0, 0.0, 0.0}}, ScheduleSource::Custom), ConfigError);
    EXPECT_THROW(Schedule({{0.1, 0.0, 0.0}, {1.0, 0.0, 0.0}}, ScheduleSource::Custom), ConfigError);
    EXPECT_THROW(Schedule({{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, ScheduleSource::Custom), ConfigError);
    EXPECT_THROW(Schedule({{0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}}, ScheduleSource::Custom), ConfigError);
}

TEST(Schedule, InterpolatesLinearlyAndClamps) {
    const Schedule s({{0.0, 2.0, 0.0}, {1.0, 0.0, 4.0}}, ScheduleSource::Custom);
    const auto mid = s.at(0.25);
    EXPECT_DOUBLE_EQ(mid.detuning, 1.5);
    EXPECT_DOUBLE_EQ(mid.drive, 1.0);
    EXPECT_DOUBLE_EQ(s.at(5.0).drive, 4.0);
    EXPECT_DOUBLE_EQ(s.at(-1.0).detuning, 2.0);
}

TEST(Schedule, SourceNamesRoundTrip) {
    for (auto src : {ScheduleSource::Planned, ScheduleSource::Spc, ScheduleSource::Custom}) {
        EXPECT_EQ(schedule_source_from_string(to_string(src)), src);
    }
    EXPECT_THROW(schedule_source_from_string("bogus"), ConfigError);
}

TEST(Schedule, PlannedScheduleEndpointsAndDuration) {
    const ControlPath& path = default_path();
    const Schedule s = schedule_from_path(path, 2.5);
    EXPECT_EQ(s.source(), ScheduleSource::Planned);
    EXPECT_DOUBLE_EQ(s.duration(), 2.5);
    EXPECT_DOUBLE_EQ(s.samples().front().detuning, 2.0);
    EXPECT_DOUBLE_EQ(s.samples().back().drive, path.final_drive());
    EXPECT_DOUBLE_EQ(s.samples().back().detuning, 0.0);
    EXPECT_NEAR(time_for_penalty(path, path.total_penalty / 2.5), 2.5, 1e-12);
}

TEST(Schedule, ConstantPenaltyRateIsFlat) {
    const ControlPath& path = default_path();
    const double duration = 2.5;
    const Schedule s = schedule_from_path(path, duration);
    const auto report = adiabaticity_report(s, PlannerConfig{});
    const double target = path.total_penalty / duration;
    std::size_t within = 0;
    for (double p : report.penalty_rate) within += std::abs(p - target) <= 0.1 * target;
    EXPECT_GE(static_cast<double>(within) / report.penalty_rate.size(), 0.95);
}

TEST(Schedule, GapMinimumLocation) {
    const Schedule s = schedule_from_path(default_path(), 2.5);
    const auto report = adiabaticity_report(s, PlannerConfig{});
    EXPECT_NEAR(report.t_min / 2.5, 0.38, 0.10);
    EXPECT_GT(report.min_gap, 1.0);
}

TEST(Schedule, SinglePulseFormula) {
    const Schedule s = spc_schedule(4.3, 5.0, 501, 10.0);
    EXPECT_EQ(s.source(), ScheduleSource::Spc);
    EXPECT_DOUBLE_EQ(s.ramp_time(), 5.0);
    EXPECT_DOUBLE_EQ(s.duration(), 10.0);
    for (const auto& x : s.samples()) {
        EXPECT_EQ(x.detuning, 0.0);
        EXPECT_NEAR(x.drive, 4.3 * (1.0 - std::exp(-std::pow(x.t / 5.0, 4))), 1e-12);
    }
    EXPECT_NEAR(s.at(5.0).drive, 4.3 * (1.0 - std::exp(-1.0)), 1e-12);
    EXPECT_THROW(spc_schedule(0.0, 5.0), ConfigError);
    EXPECT_THROW(spc_schedule(4.3, 0.0), ConfigError);
}
