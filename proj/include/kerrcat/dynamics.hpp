// dynamics.hpp: fixed-step RK4 propagation of pure states and density matrices
// under a time-dependent Kerr Hamiltonian, with optional single-photon loss.

#pragma once

#include "kerrcat/fock.hpp"
#include "kerrcat/planner.hpp"

#include <optional>
#include <vector>

namespace kerrcat {

struct EvolutionConfig {
    double kerr = 1.0;
    /// Step size in 1/K. 0 picks min(5e-4, 0.1 / max ||H(t)||) automatically.
    double dt = 0.0;
    /// Single-photon loss rate (jump operator sqrt(kappa) a).
    double kappa = 0.0;
    /// Store every n-th step; 0 stores roughly every 0.05 / K.
    int store_every = 0;
    /// Integration end time; negative means the schedule duration. Controls are
    /// held at their final values past the last sample.
    double t_end = -1.0;
    /// Extra times at which the state is stored exactly.
    std::vector<double> snapshot_times;
    /// Reference state for the fidelity trace.
    std::optional<QuantumState> target;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<QuantumState> states;
    std::vector<double> fidelity;  ///< NaN when no target was given
    std::vector<double> parity;
    std::vector<double> photon_number;
    std::vector<double> trace;
    double dt = 0.0;
    long steps = 0;

    const QuantumState& final_state() const { return states.back(); }
    /// Index of the stored sample closest to t.
    std::size_t nearest(double t) const;
};

/// Largest step satisfying dt * ||H(t)|| <= 0.1 over [0, t_end], using the
/// Gershgorin bound on ||H||, capped at 5e-4.
double stable_time_step(const Schedule& schedule, const FockBasis& basis, double kerr, double t_end);

/// Integrates d psi/dt = -i H(t) psi. Throws IntegratorError when the norm drifts
/// by more than 1e-9; the state is never renormalized.
Trajectory evolve_schrodinger(const QuantumState& psi0, const Schedule& schedule, const EvolutionConfig& cfg);

/// Integrates d rho/dt = -i[H, rho] + kappa (a rho a^dag - {a^dag a, rho} / 2).
/// Accepts a pure initial state. Throws IntegratorError on trace drift beyond
/// 1e-8 or a stored snapshot with eigenvalue below -1e-7.
Trajectory evolve_lindblad(const QuantumState& rho0, const Schedule& schedule, const EvolutionConfig& cfg);

struct LevelTrace {
    std::vector<double> times;
    RealMatrix energies;  ///< times x levels, continuity-ordered
    std::vector<std::vector<int>> parities;
};

/// Lowest `level_count` eigenvalues at every `stride`-th schedule sample, with
/// levels matched between samples by eigenvector overlap.
LevelTrace spectrum_along_schedule(const Schedule& schedule, const FockBasis& basis, int level_count,
                                   double kerr = 1.0, int stride = 1);

}  // namespace kerrcat
