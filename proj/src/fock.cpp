#include "kerrcat/fock.hpp"

#include "kerrcat/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kerrcat {

namespace {

std::vector<int> sector_indices(int dim, Parity parity) {
    std::vector<int> idx;
    for (int n = (parity == Parity::Even ? 0 : 1); n < dim; n += 2) idx.push_back(n);
    return idx;
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool commutes_with_parity(const Matrix& h) {
    const double scale = std::max(1.0, max_abs(h));
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            if (((i + j) & 1) != 0 && std::abs(h(i, j)) > 1e-12 * scale) return false;
        }
    }
    return true;
}

void check_hermitian(const Matrix& h) {
    if (h.rows() != h.cols()) throw ConfigError("eigendecompose: operator is not square");
    const double scale = std::max(1.0, max_abs(h));
    if (max_abs(h - h.adjoint()) > 1e-12 * scale) {
        throw ConfigError("eigendecompose: operator is not Hermitian");
    }
}

// Sort ascending; within numerically degenerate pairs put even parity first.
Spectrum assemble(RealVector energies, Matrix states, std::vector<int> parities) {
    const int n = static_cast<int>(energies.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return energies[a] < energies[b]; });

    const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;
    for (int k = 0; k + 1 < n; ++k) {
        const int a = order[k];
        const int b = order[k + 1];
        if (std::abs(energies[a] - energies[b]) <= tol && parities[a] < parities[b]) {
            std::swap(order[k], order[k + 1]);
        }
    }

    Spectrum out;
    out.energies.resize(n);
    out.states.resize(states.rows(), n);
    out.parities.resize(n);
    for (int k = 0; k < n; ++k) {
        out.energies[k] = energies[order[k]];
        out.states.col(k) = states.col(order[k]);
        out.parities[k] = parities[order[k]];
    }
    fix_gauge(out.states);
    return out;
}

struct SectorEigen {
    RealVector energies;
    Matrix states;  // embedded in the full basis
};

SectorEigen diagonalize_sector(const Matrix& h, Parity parity) {
    const auto idx = sector_indices(static_cast<int>(h.rows()), parity);
    const int m = static_cast<int>(idx.size());
    Matrix block(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) block(i, j) = h(idx[i], idx[j]);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: solver failed");

    SectorEigen out;
    out.energies = solver.eigenvalues();
    out.states = Matrix::Zero(h.rows(), m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) out.states(idx[i], k) = solver.eigenvectors()(i, k);
    return out;
}

Vector coherent_amplitudes(Complex alpha, int dim) {
    Vector c(dim);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

void check_coherent_truncation(Complex alpha, const FockBasis& basis) {
    if (std::norm(alpha) > basis.dim() / 4.0) {
        throw TruncationError("coherent amplitude |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                              " exceeds dim/4 = " + std::to_string(basis.dim() / 4.0));
    }
}

}  // namespace

FockBasis::FockBasis(int dim) : dim_(dim) {
    if (dim < 2) throw ConfigError("FockBasis: dim must be >= 2, got " + std::to_string(dim));
}

FockBasis FockBasis::for_drive(double beta_max, double kerr) {
    const int wanted = static_cast<int>(std::ceil(8.0 * beta_max / kerr));
    return FockBasis(std::max(40, wanted));
}

void HamiltonianParams::validate() const {
    if (!(kerr > 0.0)) throw ConfigError("HamiltonianParams: K must be > 0");
    if (!(drive >= 0.0)) throw ConfigError("HamiltonianParams: beta must be >= 0");
    if (!std::isfinite(detuning)) throw ConfigError("HamiltonianParams: Delta must be finite");
}

Matrix build_annihilation(const FockBasis& basis) {
    const int d = basis.dim();
    Matrix a = Matrix::Zero(d, d);
    for (int m = 0; m + 1 < d; ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
    return a;
}

Matrix build_number(const FockBasis& basis) {
    const int d = basis.dim();
    Matrix n = Matrix::Zero(d, d);
    for (int m = 0; m < d; ++m) n(m, m) = m;
    return n;
}

Matrix build_two_photon(const FockBasis& basis) {
    const int d = basis.dim();
    Matrix x = Matrix::Zero(d, d);
    for (int m = 0; m + 2 < d; ++m) {
        const double c = std::sqrt(static_cast<double>((m + 1) * (m + 2)));
        x(m + 2, m) = c;
        x(m, m + 2) = c;
    }
    return x;
}

Matrix build_kerr(const FockBasis& basis) {
    const int d = basis.dim();
    Matrix k = Matrix::Zero(d, d);
    for (int m = 0; m < d; ++m) k(m, m) = static_cast<double>(m) * (m - 1);
    return k;
}

Matrix build_parity(const FockBasis& basis) {
    const int d = basis.dim();
    Matrix p = Matrix::Zero(d, d);
    for (int m = 0; m < d; ++m) p(m, m) = (m % 2 == 0) ? 1.0 : -1.0;
    return p;
}

Matrix build_hamiltonian(const HamiltonianParams& params, const FockBasis& basis) {
    params.validate();
    return params.kerr * build_kerr(basis) + params.detuning * build_number(basis) -
           params.drive * build_two_photon(basis);
}

BandedHamiltonian::BandedHamiltonian(const FockBasis& basis)
    : number_(basis.dim()), kerr_(basis.dim()), pair_(std::max(0, basis.dim() - 2)) {
    for (int m = 0; m < basis.dim(); ++m) {
        number_[m] = m;
        kerr_[m] = static_cast<double>(m) * (m - 1);
    }
    for (int m = 0; m + 2 < basis.dim(); ++m) pair_[m] = std::sqrt(static_cast<double>((m + 1) * (m + 2)));
}

void BandedHamiltonian::apply(const HamiltonianParams& p, const Vector& x, Vector& out) const {
    const int d = dim();
    out.resize(d);
    for (int m = 0; m < d; ++m) out[m] = (p.kerr * kerr_[m] + p.detuning * number_[m]) * x[m];
    for (int m = 0; m + 2 < d; ++m) {
        out[m + 2] -= p.drive * pair_[m] * x[m];
        out[m] -= p.drive * pair_[m] * x[m + 2];
    }
}

void BandedHamiltonian::apply(const HamiltonianParams& p, const Matrix& x, Matrix& out) const {
    const int d = dim();
    out.resize(d, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (int m = 0; m < d; ++m) out(m, j) = (p.kerr * kerr_[m] + p.detuning * number_[m]) * x(m, j);
        for (int m = 0; m + 2 < d; ++m) {
            out(m + 2, j) -= p.drive * pair_[m] * x(m, j);
            out(m, j) -= p.drive * pair_[m] * x(m + 2, j);
        }
    }
}

double BandedHamiltonian::norm_bound(const HamiltonianParams& p) const {
    const int d = dim();
    double bound = 0.0;
    for (int m = 0; m < d; ++m) {
        double row = std::abs(p.kerr * kerr_[m] + p.detuning * number_[m]);
        if (m + 2 < d) row += std::abs(p.drive) * pair_[m];
        if (m >= 2) row += std::abs(p.drive) * pair_[m - 2];
        bound = std::max(bound, row);
    }
    return bound;
}

double analytic_energy(int n, double detuning, double kerr) {
    const auto bar = [&](int k) {
        const double x = k + detuning / (2.0 * kerr) - 0.5;
        return kerr * x * x;
    };
    return bar(n) - bar(0);
}

void fix_gauge(Matrix& states) {
    for (Eigen::Index k = 0; k < states.cols(); ++k) {
        Eigen::Index best = 0;
        double best_mag = -1.0;
        for (Eigen::Index i = 0; i < states.rows(); ++i) {
            const double mag = std::abs(states(i, k));
            // Ties within rounding go to the lowest index so the choice is deterministic.
            if (mag > best_mag * (1.0 + 1e-12)) {
                best_mag = mag;
                best = i;
            }
        }
        if (best_mag > 0.0) states.col(k) *= std::conj(states(best, k)) / best_mag;
    }
}

Spectrum eigendecompose(const Matrix& hamiltonian) {
    check_hermitian(hamiltonian);
    const int d = static_cast<int>(hamiltonian.rows());

    if (commutes_with_parity(hamiltonian)) {
        const auto even = diagonalize_sector(hamiltonian, Parity::Even);
        const auto odd = diagonalize_sector(hamiltonian, Parity::Odd);
        RealVector energies(d);
        Matrix states(d, d);
        std::vector<int> parities;
        energies << even.energies, odd.energies;
        states << even.states, odd.states;
        parities.insert(parities.end(), even.energies.size(), 1);
        parities.insert(parities.end(), odd.energies.size(), -1);
        return assemble(std::move(energies), std::move(states), std::move(parities));
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: solver failed");
    std::vector<int> parities(d);
    for (int k = 0; k < d; ++k) {
        double p = 0.0;
        for (int i = 0; i < d; ++i) p += ((i % 2 == 0) ? 1.0 : -1.0) * std::norm(solver.eigenvectors()(i, k));
        parities[k] = p >= 0.0 ? 1 : -1;
    }
    return assemble(solver.eigenvalues(), solver.eigenvectors(), std::move(parities));
}

Spectrum eigendecompose_sector(const Matrix& hamiltonian, Parity parity) {
    check_hermitian(hamiltonian);
    auto sector = diagonalize_sector(hamiltonian, parity);
    std::vector<int> parities(sector.energies.size(), sign_of(parity));
    return assemble(std::move(sector.energies), std::move(sector.states), std::move(parities));
}

Spectrum align_to(const Spectrum& previous, Spectrum next) {
    const int n = std::min(previous.size(), next.size());
    const Matrix overlap = previous.states.leftCols(n).adjoint() * next.states;
    std::vector<int> assigned(n, -1);
    std::vector<bool> used(next.size(), false);

    // Greedy assignment on the largest remaining |overlap|.
    for (int step = 0; step < n; ++step) {
        double best = -1.0;
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            if (assigned[i] >= 0) continue;
            for (int j = 0; j < next.size(); ++j) {
                if (used[j]) continue;
                const double v = std::abs(overlap(i, j));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        assigned[bi] = bj;
        used[bj] = true;
    }

    std::vector<int> order(assigned);
    for (int j = 0; j < next.size(); ++j)
        if (!used[j]) order.push_back(j);

    Spectrum out;
    out.energies.resize(next.size());
    out.states.resize(next.states.rows(), next.size());
    out.parities.resize(next.size());
    for (int k = 0; k < next.size(); ++k) {
        const int j = order[k];
        out.energies[k] = next.energies[j];
        out.parities[k] = next.parities[j];
        Vector v = next.states.col(j);
        if (k < n) {
            const Complex o = overlap(k, j);
            if (std::abs(o) > 0.0) v *= std::conj(o) / std::abs(o);
        }
        out.states.col(k) = v;
    }
    return out;
}

QuantumState QuantumState::pure(Vector amplitudes) { return QuantumState(std::move(amplitudes)); }

QuantumState QuantumState::density(Matrix rho) {
    if (rho.rows() != rho.cols()) throw ConfigError("QuantumState: density matrix must be square");
    return QuantumState(std::move(rho));
}

int QuantumState::dim() const {
    return is_pure() ? static_cast<int>(std::get<Vector>(data_).size())
                     : static_cast<int>(std::get<Matrix>(data_).rows());
}

const Vector& QuantumState::amplitudes() const {
    if (!is_pure()) throw std::logic_error("QuantumState: not a pure state");
    return std::get<Vector>(data_);
}

const Matrix& QuantumState::density_matrix() const {
    if (is_pure()) throw std::logic_error("QuantumState: not a density matrix");
    return std::get<Matrix>(data_);
}

Matrix QuantumState::to_density() const {
    if (is_pure()) {
        const auto& v = std::get<Vector>(data_);
        return v * v.adjoint();
    }
    return std::get<Matrix>(data_);
}

double QuantumState::trace() const {
    return is_pure() ? std::get<Vector>(data_).squaredNorm() : std::get<Matrix>(data_).trace().real();
}

double QuantumState::expectation(const Matrix& op) const {
    if (op.rows() != dim()) throw ConfigError("QuantumState: operator dimension mismatch");
    if (is_pure()) {
        const auto& v = std::get<Vector>(data_);
        return v.dot(op * v).real();
    }
    return (std::get<Matrix>(data_) * op).trace().real();
}

double QuantumState::mean_photon_number() const {
    double n = 0.0;
    if (is_pure()) {
        const auto& v = std::get<Vector>(data_);
        for (Eigen::Index k = 0; k < v.size(); ++k) n += k * std::norm(v[k]);
    } else {
        const auto& r = std::get<Matrix>(data_);
        for (Eigen::Index k = 0; k < r.rows(); ++k) n += k * r(k, k).real();
    }
    return n;
}

double QuantumState::parity() const {
    double p = 0.0;
    if (is_pure()) {
        const auto& v = std::get<Vector>(data_);
        for (Eigen::Index k = 0; k < v.size(); ++k) p += ((k % 2 == 0) ? 1.0 : -1.0) * std::norm(v[k]);
    } else {
        const auto& r = std::get<Matrix>(data_);
        for (Eigen::Index k = 0; k < r.rows(); ++k) p += ((k % 2 == 0) ? 1.0 : -1.0) * r(k, k).real();
    }
    return p;
}

void QuantumState::validate(double tol) const {
    if (is_pure()) {
        const double norm = std::get<Vector>(data_).norm();
        if (!(std::abs(norm - 1.0) <= tol))
            throw NumericalError("pure state norm " + std::to_string(norm) + " differs from 1");
        return;
    }
    const auto& r = std::get<Matrix>(data_);
    if (max_abs(r - r.adjoint()) > tol) throw NumericalError("density matrix is not Hermitian");
    const double tr = r.trace().real();
    if (!(std::abs(tr - 1.0) <= tol)) throw NumericalError("density trace " + std::to_string(tr) + " differs from 1");
    const Matrix herm = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol)
        throw NumericalError("density matrix is not positive semidefinite (min eigenvalue " +
                             std::to_string(solver.eigenvalues().minCoeff()) + ")");
}

QuantumState fock_state(int n, const FockBasis& basis) {
    if (n < 0 || n >= basis.dim()) throw ConfigError("fock_state: level outside basis");
    Vector v = Vector::Zero(basis.dim());
    v[n] = 1.0;
    return QuantumState::pure(std::move(v));
}

QuantumState coherent_state(Complex alpha, const FockBasis& basis) {
    check_coherent_truncation(alpha, basis);
    Vector c = coherent_amplitudes(alpha, basis.dim());
    c.normalize();
    return QuantumState::pure(std::move(c));
}

QuantumState cat_state(Complex alpha, Parity parity, const FockBasis& basis) {
    check_coherent_truncation(alpha, basis);
    if (alpha == Complex(0.0, 0.0)) return fock_state(parity == Parity::Even ? 0 : 1, basis);

    // |alpha> + s|-alpha> keeps only the Fock components with (-1)^n = s.
    Vector c = coherent_amplitudes(alpha, basis.dim());
    const int keep = parity == Parity::Even ? 0 : 1;
    for (int n = 0; n < basis.dim(); ++n) c[n] = (n % 2 == keep) ? 2.0 * c[n] : Complex(0.0, 0.0);
    const double norm = c.norm();
    if (!(norm > 0.0)) throw NumericalError("cat_state: vanishing norm");
    return QuantumState::pure(c / norm);
}

Matrix displacement_operator(Complex alpha, const FockBasis& basis, int pad) {
    if (pad < 0) pad = 40 + static_cast<int>(std::ceil(4.0 * std::norm(alpha)));
    const FockBasis big(basis.dim() + pad);
    const Matrix a = build_annihilation(big);
    const Matrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    const Matrix d = generator.exp();
    return d.topLeftCorner(basis.dim(), basis.dim());
}

QuantumState displaced_fock(Complex alpha, int n, const FockBasis& basis) {
    if (n < 0 || n >= basis.dim()) throw ConfigError("displaced_fock: level outside basis");
    const int pad = 40 + static_cast<int>(std::ceil(4.0 * std::norm(alpha)));
    const FockBasis big(basis.dim() + pad);
    const Matrix a = build_annihilation(big);
    const Matrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    const Vector column = generator.exp().col(n);

    const double total = column.squaredNorm();
    const double kept = column.head(basis.dim()).squaredNorm();
    if (total - kept > 1e-10 * total) {
        throw TruncationError("displaced_fock: " + std::to_string(total - kept) +
                              " of the norm lies outside the basis");
    }
    Vector v = column.head(basis.dim());
    v.normalize();
    return QuantumState::pure(std::move(v));
}

}  // namespace kerrcat
