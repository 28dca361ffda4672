// fock.hpp: truncated Fock-space algebra for a two-photon driven Kerr resonator.
//
// All energies are in units of the Kerr coefficient K unless a HamiltonianParams
// says otherwise; times are in units of 1/K.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <variant>
#include <vector>

namespace kerrcat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Number of retained Fock levels |0>..|dim-1>.
class FockBasis {
public:
    explicit FockBasis(int dim);

    int dim() const { return dim_; }

    /// Default truncation for drives up to beta_max: max(40, ceil(8 beta_max / K)).
    static FockBasis for_drive(double beta_max, double kerr = 1.0);

    friend bool operator==(const FockBasis&, const FockBasis&) = default;

private:
    int dim_;
};

/// H = K a^dag^2 a^2 + Delta a^dag a - beta (a^dag^2 + a^2)
struct HamiltonianParams {
    double kerr = 1.0;
    double detuning = 0.0;
    double drive = 0.0;

    /// Throws ConfigError unless K > 0 and beta >= 0.
    void validate() const;
};

enum class Parity : int { Even = 1, Odd = -1 };

inline int sign_of(Parity p) { return static_cast<int>(p); }

Matrix build_annihilation(const FockBasis& basis);
Matrix build_number(const FockBasis& basis);
/// a^dag^2 + a^2
Matrix build_two_photon(const FockBasis& basis);
/// a^dag^2 a^2
Matrix build_kerr(const FockBasis& basis);
/// P = exp(i pi a^dag a), diagonal (-1)^n
Matrix build_parity(const FockBasis& basis);
Matrix build_hamiltonian(const HamiltonianParams& params, const FockBasis& basis);

/// Applies the pentadiagonal Kerr Hamiltonian without forming it. Used by the
/// integrators, where H changes every stage.
class BandedHamiltonian {
public:
    explicit BandedHamiltonian(const FockBasis& basis);

    int dim() const { return static_cast<int>(number_.size()); }

    /// out = H x
    void apply(const HamiltonianParams& params, const Vector& x, Vector& out) const;
    /// out = H X
    void apply(const HamiltonianParams& params, const Matrix& x, Matrix& out) const;

    /// Gershgorin bound on the spectral norm of H.
    double norm_bound(const HamiltonianParams& params) const;

private:
    RealVector number_;
    RealVector kerr_;
    RealVector pair_;  // pair_[m] = <m+2| a^dag^2 |m> = sqrt((m+1)(m+2))
};

/// E_n = Ebar_n - Ebar_0 with Ebar_n = K (n + Delta/2K - 1/2)^2, the exact
/// undriven (beta = 0) spectrum.
double analytic_energy(int n, double detuning, double kerr = 1.0);

/// Eigenpairs of a Hermitian operator, ascending in energy.
///
/// When H commutes with parity, each eigenvector has definite parity and
/// numerically degenerate pairs are ordered even before odd. Every eigenvector
/// is gauge-fixed so that its largest-magnitude component is real positive.
struct Spectrum {
    RealVector energies;
    Matrix states;  // columns
    std::vector<int> parities;

    int size() const { return static_cast<int>(energies.size()); }
    Vector state(int k) const { return states.col(k); }
};

/// Throws ConfigError for non-Hermitian input.
Spectrum eigendecompose(const Matrix& hamiltonian);

/// Eigenpairs of H restricted to one parity sector, embedded in the full basis.
Spectrum eigendecompose_sector(const Matrix& hamiltonian, Parity parity);

/// Puts the largest-magnitude component of every column on the positive real axis.
void fix_gauge(Matrix& states);

/// Reorders `next` so that level k has maximal overlap with level k of
/// `previous`, and rotates each vector's phase to make that overlap real positive.
Spectrum align_to(const Spectrum& previous, Spectrum next);

/// A pure state vector or a density matrix over a truncated Fock basis.
class QuantumState {
public:
    static QuantumState pure(Vector amplitudes);
    static QuantumState density(Matrix rho);

    bool is_pure() const { return std::holds_alternative<Vector>(data_); }
    int dim() const;

    /// Throws std::logic_error for a density state.
    const Vector& amplitudes() const;
    /// Throws std::logic_error for a pure state.
    const Matrix& density_matrix() const;
    Matrix to_density() const;

    double trace() const;
    /// Re Tr[rho O]
    double expectation(const Matrix& op) const;
    double mean_photon_number() const;
    double parity() const;

    /// Throws NumericalError when the normalization, Hermiticity or positivity
    /// invariants are violated beyond `tol`.
    void validate(double tol = 1e-9) const;

private:
    explicit QuantumState(std::variant<Vector, Matrix> data) : data_(std::move(data)) {}
    std::variant<Vector, Matrix> data_;
};

QuantumState fock_state(int n, const FockBasis& basis);

/// Throws TruncationError when |alpha|^2 > dim / 4.
QuantumState coherent_state(Complex alpha, const FockBasis& basis);

/// N (|alpha> +- |-alpha>), normalized numerically. The alpha -> 0 limits are
/// |0> (even) and |1> (odd).
QuantumState cat_state(Complex alpha, Parity parity, const FockBasis& basis);

/// D(alpha) = exp(alpha a^dag - alpha* a), computed by scaling-and-squaring on
/// a padded basis of dim + pad levels and truncated back to `basis`.
Matrix displacement_operator(Complex alpha, const FockBasis& basis, int pad = -1);

/// D(alpha)|n>, renormalized after truncation. Throws TruncationError when more
/// than 1e-10 of the norm falls outside the basis.
QuantumState displaced_fock(Complex alpha, int n, const FockBasis& basis);

}  // namespace kerrcat
