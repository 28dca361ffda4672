// analysis.hpp: Wigner functions, fidelity, nonclassical volume and cat size.
//
// Wigner convention: W(alpha) = (2/pi) Tr[D(alpha) P D^dag(alpha) rho] with
// alpha = x + i p, so that the integral of W over d^2 alpha = dx dp is Tr(rho)
// and the vacuum gives W = (2/pi) exp(-2 |alpha|^2).

#pragma once

#include "kerrcat/dynamics.hpp"
#include "kerrcat/fock.hpp"

#include <vector>

namespace kerrcat {

class PhaseGrid {
public:
    /// Square grid on [-half_width, half_width]^2 with `resolution` points per axis.
    PhaseGrid(double half_width, int resolution = 256);
    PhaseGrid(double x_half_width, double p_half_width, int resolution);

    /// Default grid for a state: half-width max(5, sqrt(<n>) + 3).
    static PhaseGrid covering(const QuantumState& state, int resolution = 256);

    double x_half_width() const { return x_half_; }
    double p_half_width() const { return p_half_; }
    int resolution() const { return resolution_; }
    double x(int i) const { return -x_half_ + i * x_step(); }
    double p(int j) const { return -p_half_ + j * p_step(); }
    double x_step() const { return 2.0 * x_half_ / (resolution_ - 1); }
    double p_step() const { return 2.0 * p_half_ / (resolution_ - 1); }

    /// 2D trapezoid integral of values(i, j) over the grid.
    double integrate(const RealMatrix& values) const;

private:
    double x_half_;
    double p_half_;
    int resolution_;
};

struct WignerMap {
    PhaseGrid grid;
    RealMatrix values;  ///< values(i, j) = W(x_i + i p_j)

    double integral() const { return grid.integrate(values); }
    double max() const { return values.maxCoeff(); }
    double min() const { return values.minCoeff(); }
};

/// W on the grid via the Laguerre recursion. Throws GridTooSmallError when the
/// grid integral misses Tr(rho) by more than 1e-3 or W does not vanish on the
/// boundary.
WignerMap wigner(const QuantumState& state, const PhaseGrid& grid);

/// Same values without the support check.
WignerMap wigner_unchecked(const QuantumState& state, const PhaseGrid& grid);

/// Single point, Laguerre recursion.
double wigner_at(const QuantumState& state, Complex alpha);

/// Single point from the defining displaced-parity expression, with D(alpha)
/// from a padded matrix exponential. Slow; used as the reference.
double wigner_displaced_parity(const QuantumState& state, Complex alpha);

/// <psi|rho|psi>, or |<psi|phi>|^2 for a pure state.
double fidelity(const QuantumState& state, const QuantumState& target);

/// delta = integral |W| - 1, floored at 0.
double nonclassical_volume(const WignerMap& map);
double nonclassical_volume(const QuantumState& state, const PhaseGrid& grid);

/// Largest distance between local maxima of W above 0.4 max(W), refined by
/// parabolic interpolation. Throws LobeDetectionError with fewer than two lobes.
double cat_size(const WignerMap& map);
double cat_size(const QuantumState& state, const PhaseGrid& grid);

struct ProtocolReport {
    std::vector<double> times;
    std::vector<double> fidelity_tpc;
    std::vector<double> fidelity_spc;
    std::vector<double> volume_tpc;
    std::vector<double> volume_spc;

    double eval_time = 0.0;
    double fidelity_tpc_at = 0.0;
    double fidelity_spc_at = 0.0;
    double volume_tpc_at = 0.0;
    double volume_spc_at = 0.0;

    /// Times where the TPC - SPC difference changes sign.
    std::vector<double> fidelity_crossings;
    std::vector<double> volume_crossings;
};

/// Fidelity and nonclassical volume of both trajectories' stored states,
/// linearly resampled onto `sample_count` common times on [0, min(end times)].
/// The summary values at eval_time are interpolated the same way; store a state
/// at exactly eval_time to make them exact.
ProtocolReport protocol_report(const Trajectory& tpc, const Trajectory& spc, const QuantumState& target,
                               const PhaseGrid& grid, double eval_time = 2.5, int sample_count = 101);

}  // namespace kerrcat
