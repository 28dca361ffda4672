#include "kerrcat/analysis.hpp"

#include "kerrcat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace kerrcat {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
constexpr double kLeakageTolerance = 1e-3;
constexpr double kBoundaryTolerance = 1e-4;
constexpr double kLobeThreshold = 0.4;

// Iterative evaluation of sum_{mn} rho_mn <n| D P D^dag |m> using the
// associated-Laguerre recurrences in the Fock index; `row` holds the current
// row of the scaled polynomial table.
struct LaguerreTables {
    explicit LaguerreTables(int d) : root(d), inv_root(d), re(d), im(d) {
        for (int k = 0; k < d; ++k) {
            root[k] = std::sqrt(static_cast<double>(k));
            inv_root[k] = k > 0 ? 1.0 / root[k] : 0.0;
        }
    }
    std::vector<double> root, inv_root, re, im;
};

// Written in real arithmetic: std::complex multiplication without -ffast-math
// goes through the NaN-aware library path and dominates the runtime.
double wigner_from_density(const Matrix& rho, Complex alpha, LaguerreTables& tab) {
    const int d = static_cast<int>(rho.rows());
    const double ar = 2.0 * alpha.real();
    const double ai = 2.0 * alpha.imag();
    double* re = tab.re.data();
    double* im = tab.im.data();
    const double* inv = tab.inv_root.data();

    re[0] = kTwoOverPi * std::exp(-2.0 * std::norm(alpha));
    im[0] = 0.0;
    double w = rho(0, 0).real() * re[0];
    for (int n = 1; n < d; ++n) {
        re[n] = (ar * re[n - 1] - ai * im[n - 1]) * inv[n];
        im[n] = (ar * im[n - 1] + ai * re[n - 1]) * inv[n];
        const Complex r = rho(n, 0);
        w += 2.0 * (r.real() * re[n] + r.imag() * im[n]);
    }
    for (int m = 1; m < d; ++m) {
        const double sm = tab.root[m];
        double prev_re = re[m];
        double prev_im = im[m];
        // conj(2 alpha) * row[m] - sqrt(m) row[m-1]
        re[m] = (ar * prev_re + ai * prev_im - sm * re[m - 1]) * inv[m];
        im[m] = (ar * prev_im - ai * prev_re - sm * im[m - 1]) * inv[m];
        w += rho(m, m).real() * re[m];
        // Column-major lower triangle: rho(n, m) = conj(rho(m, n)).
        const Complex* col = rho.col(m).data();
        for (int n = m + 1; n < d; ++n) {
            const double next_re = (ar * re[n - 1] - ai * im[n - 1] - sm * prev_re) * inv[n];
            const double next_im = (ar * im[n - 1] + ai * re[n - 1] - sm * prev_im) * inv[n];
            prev_re = re[n];
            prev_im = im[n];
            re[n] = next_re;
            im[n] = next_im;
            w += 2.0 * (col[n].real() * next_re + col[n].imag() * next_im);
        }
    }
    return w;
}

double boundary_max(const RealMatrix& v) {
    const Eigen::Index n = v.rows();
    double m = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        m = std::max({m, std::abs(v(0, k)), std::abs(v(n - 1, k)), std::abs(v(k, 0)), std::abs(v(k, n - 1))});
    }
    return m;
}

double parabolic_offset(double left, double mid, double right) {
    const double curvature = left - 2.0 * mid + right;
    if (curvature >= 0.0) return 0.0;
    return std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
}

double interpolate_at(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t hi = static_cast<std::size_t>(it - x.begin());
    const double f = (at - x[hi - 1]) / (x[hi] - x[hi - 1]);
    return y[hi - 1] + f * (y[hi] - y[hi - 1]);
}

std::vector<double> sign_changes(const std::vector<double>& t, const std::vector<double>& a,
                                 const std::vector<double>& b) {
    // Exact zeros are skipped; the crossing is placed between the surrounding
    // nonzero samples of opposite sign.
    std::vector<double> out;
    std::size_t last = 0;
    double last_diff = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = a[i] - b[i];
        if (d == 0.0) continue;
        if (last_diff != 0.0 && (d > 0.0) != (last_diff > 0.0)) {
            out.push_back(t[last] + (t[i] - t[last]) * last_diff / (last_diff - d));
        }
        last = i;
        last_diff = d;
    }
    return out;
}

}  // namespace

PhaseGrid::PhaseGrid(double half_width, int resolution) : PhaseGrid(half_width, half_width, resolution) {}

PhaseGrid::PhaseGrid(double x_half_width, double p_half_width, int resolution)
    : x_half_(x_half_width), p_half_(p_half_width), resolution_(resolution) {
    if (!(x_half_ > 0.0) || !(p_half_ > 0.0)) throw ConfigError("grid.half_width: must be > 0");
    if (resolution_ < 64) throw ConfigError("grid.resolution: must be >= 64");
}

PhaseGrid PhaseGrid::covering(const QuantumState& state, int resolution) {
    const double n = std::max(0.0, state.mean_photon_number());
    return PhaseGrid(std::max(5.0, std::sqrt(n) + 3.0), resolution);
}

double PhaseGrid::integrate(const RealMatrix& values) const {
    const int n = resolution_;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < n; ++j) {
            const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            sum += wi * wj * values(i, j);
        }
    }
    return sum * x_step() * p_step();
}

WignerMap wigner_unchecked(const QuantumState& state, const PhaseGrid& grid) {
    const Matrix rho = state.to_density();
    const int n = grid.resolution();
    WignerMap map{grid, RealMatrix(n, n)};
    LaguerreTables tab(static_cast<int>(rho.rows()));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) map.values(i, j) = wigner_from_density(rho, Complex(grid.x(i), grid.p(j)), tab);
    }
    return map;
}

WignerMap wigner(const QuantumState& state, const PhaseGrid& grid) {
    WignerMap map = wigner_unchecked(state, grid);
    const double leak = std::abs(map.integral() - state.trace());
    const double edge = boundary_max(map.values);
    if (leak > kLeakageTolerance || edge > kBoundaryTolerance) {
        const double current = std::max(grid.x_half_width(), grid.p_half_width());
        const double suggested =
            std::max(1.5 * current, std::sqrt(std::max(0.0, state.mean_photon_number())) + 4.0);
        throw GridTooSmallError("wigner: grid half-width " + std::to_string(current) +
                                    " does not cover the state (integral error " + std::to_string(leak) +
                                    ", boundary |W| " + std::to_string(edge) + "); try half-width " +
                                    std::to_string(suggested),
                                suggested);
    }
    return map;
}

double wigner_at(const QuantumState& state, Complex alpha) {
    const Matrix rho = state.to_density();
    LaguerreTables tab(static_cast<int>(rho.rows()));
    return wigner_from_density(rho, alpha, tab);
}

double wigner_displaced_parity(const QuantumState& state, Complex alpha) {
    const int d = state.dim();
    const int pad = 40 + static_cast<int>(std::ceil(4.0 * std::norm(alpha)));
    const FockBasis big(d + pad);

    Matrix rho = Matrix::Zero(d + pad, d + pad);
    rho.topLeftCorner(d, d) = state.to_density();
    // Tr[D P D^dag rho] = Tr[P D^dag rho D]
    const Matrix disp = displacement_operator(alpha, big);
    const Matrix shifted = disp.adjoint() * rho * disp;
    double parity_sum = 0.0;
    for (int k = 0; k < d + pad; ++k) parity_sum += ((k % 2 == 0) ? 1.0 : -1.0) * shifted(k, k).real();
    return kTwoOverPi * parity_sum;
}

double fidelity(const QuantumState& state, const QuantumState& target) {
    if (!target.is_pure()) throw ConfigError("fidelity: target must be a pure state");
    if (state.dim() != target.dim()) {
        throw ConfigError("fidelity: dimension mismatch (" + std::to_string(state.dim()) + " vs " +
                          std::to_string(target.dim()) + ")");
    }
    const Vector& psi = target.amplitudes();
    if (state.is_pure()) return std::norm(psi.dot(state.amplitudes()));
    return (psi.adjoint() * state.density_matrix() * psi)(0, 0).real();
}

double nonclassical_volume(const WignerMap& map) {
    return std::max(0.0, map.grid.integrate(map.values.cwiseAbs()) - 1.0);
}

double nonclassical_volume(const QuantumState& state, const PhaseGrid& grid) {
    return nonclassical_volume(wigner(state, grid));
}

double cat_size(const WignerMap& map) {
    const auto& v = map.values;
    const int n = map.grid.resolution();
    const double threshold = kLobeThreshold * v.maxCoeff();

    struct Peak {
        double x, p;
    };
    std::vector<Peak> peaks;
    for (int i = 1; i + 1 < n; ++i) {
        for (int j = 1; j + 1 < n; ++j) {
            const double w = v(i, j);
            if (w < threshold || w <= 0.0) continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di != 0 || dj != 0) && v(i + di, j + dj) > w) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max) continue;
            const double ox = parabolic_offset(v(i - 1, j), w, v(i + 1, j));
            const double op = parabolic_offset(v(i, j - 1), w, v(i, j + 1));
            const Peak peak{map.grid.x(i) + ox * map.grid.x_step(), map.grid.p(j) + op * map.grid.p_step()};
            // Plateaus produce neighbouring duplicates of one lobe.
            const bool duplicate = std::any_of(peaks.begin(), peaks.end(), [&](const Peak& q) {
                return std::hypot(q.x - peak.x, q.p - peak.p) < 2.0 * std::max(map.grid.x_step(), map.grid.p_step());
            });
            if (!duplicate) peaks.push_back(peak);
        }
    }
    if (peaks.size() < 2) {
        throw LobeDetectionError("cat_size: found " + std::to_string(peaks.size()) +
                                 " Wigner lobe(s) above 0.4 max(W); need two");
    }
    double best = 0.0;
    for (std::size_t a = 0; a < peaks.size(); ++a) {
        for (std::size_t b = a + 1; b < peaks.size(); ++b) {
            best = std::max(best, std::hypot(peaks[a].x - peaks[b].x, peaks[a].p - peaks[b].p));
        }
    }
    return best;
}

double cat_size(const QuantumState& state, const PhaseGrid& grid) { return cat_size(wigner(state, grid)); }

ProtocolReport protocol_report(const Trajectory& tpc, const Trajectory& spc, const QuantumState& target,
                               const PhaseGrid& grid, double eval_time, int sample_count) {
    if (tpc.times.empty() || spc.times.empty()) throw ConfigError("protocol_report: empty trajectory");
    if (sample_count < 2) throw ConfigError("protocol_report: sample_count must be >= 2");

    auto metrics = [&](const Trajectory& traj, std::vector<double>& f, std::vector<double>& delta) {
        for (const auto& state : traj.states) {
            f.push_back(fidelity(state, target));
            delta.push_back(nonclassical_volume(state, grid));
        }
    };
    std::vector<double> f_tpc, d_tpc, f_spc, d_spc;
    metrics(tpc, f_tpc, d_tpc);
    metrics(spc, f_spc, d_spc);

    ProtocolReport report;
    const double t_max = std::min(tpc.times.back(), spc.times.back());
    for (int k = 0; k < sample_count; ++k) {
        const double t = t_max * k / (sample_count - 1);
        report.times.push_back(t);
        report.fidelity_tpc.push_back(interpolate_at(tpc.times, f_tpc, t));
        report.fidelity_spc.push_back(interpolate_at(spc.times, f_spc, t));
        report.volume_tpc.push_back(interpolate_at(tpc.times, d_tpc, t));
        report.volume_spc.push_back(interpolate_at(spc.times, d_spc, t));
    }
    report.eval_time = eval_time;
    report.fidelity_tpc_at = interpolate_at(tpc.times, f_tpc, eval_time);
    report.fidelity_spc_at = interpolate_at(spc.times, f_spc, eval_time);
    report.volume_tpc_at = interpolate_at(tpc.times, d_tpc, eval_time);
    report.volume_spc_at = interpolate_at(spc.times, d_spc, eval_time);
    report.fidelity_crossings = sign_changes(report.times, report.fidelity_tpc, report.fidelity_spc);
    report.volume_crossings = sign_changes(report.times, report.volume_tpc, report.volume_spc);
    return report;
}

}  // namespace kerrcat
