#include "optoamp/stability.hpp"

#include "optoamp/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace optoamp {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Marginal: return "marginal";
        case Verdict::Unstable: return "unstable";
    }
    return "unstable";
}

const char* cell_flag_name(CellFlag flag) {
    switch (flag) {
        case CellFlag::Ok: return "ok";
        case CellFlag::Unstable: return "unstable";
        case CellFlag::Singular: return "singular";
        case CellFlag::NoPeak: return "nopeak";
        case CellFlag::Invalid: return "invalid";
    }
    return "invalid";
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return v;
}

namespace {

Verdict classify(double max_real) {
    if (max_real < -kMarginalTol) return Verdict::Stable;
    if (max_real <= kMarginalTol) return Verdict::Marginal;
    return Verdict::Unstable;
}

} // namespace

StabilityReport eigen_spectrum(const SystemParams& p) {
    validate_params(p);
    const Matrix6c m = build_drift_matrix(p).entries;

    Eigen::ComplexEigenSolver<Matrix6c> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw EigenSolverFailure("complex eigensolver did not converge");
    }
    const double resid = (m * solver.eigenvectors() -
                          solver.eigenvectors() * solver.eigenvalues().asDiagonal())
                             .norm();
    if (resid > 1e-10 * std::max(1.0, m.norm())) {
        throw EigenSolverFailure("eigen decomposition residual exceeds tolerance");
    }

    StabilityReport r;
    for (int k = 0; k < 6; ++k) {
        r.eigenvalues[k] = solver.eigenvalues()(k);
    }
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    r.max_real_part = r.eigenvalues[0].real();
    r.verdict       = classify(r.max_real_part);

    const RouthVerdict rh = routh_hurwitz(characteristic_polynomial(p));
    switch (rh) {
        case RouthVerdict::Stable:
            r.hurwitz_consistent = (r.verdict == Verdict::Stable);
            break;
        case RouthVerdict::Unstable:
            r.hurwitz_consistent = (r.verdict == Verdict::Unstable);
            break;
        case RouthVerdict::Degenerate:
            // Boundary case: the sign test makes no claim either way.
            r.hurwitz_consistent = true;
            break;
    }
    return r;
}

RealPolynomial characteristic_polynomial(const SystemParams& p) {
    validate_params(p);
    const Matrix6c m = build_drift_matrix(p).entries;

    // Faddeev-LeVerrier: A_1 = M, c_{n-k} = -tr(A_k)/k, A_{k+1} = M (A_k + c_{n-k} I).
    std::array<Complex, 7> c{};
    c[6] = 1.0;
    Matrix6c a = m;
    for (int k = 1; k <= 6; ++k) {
        c[6 - k] = -a.trace() / static_cast<double>(k);
        if (k < 6) {
            a = m * (a + c[6 - k] * Matrix6c::Identity());
        }
    }

    RealPolynomial poly;
    double scale = 1.0;
    for (const auto& ck : c) scale = std::max(scale, std::abs(ck));
    for (int k = 0; k < 7; ++k) {
        if (std::abs(c[k].imag()) > 1e-10 * scale) {
            throw EigenSolverFailure("characteristic polynomial has non-real coefficient");
        }
        poly.coeffs[k] = c[k].real();
    }
    return poly;
}

RouthVerdict routh_hurwitz(const RealPolynomial& poly) {
    // Descending coefficients d0..d6, normalized so d0 > 0.
    std::array<double, 7> d{};
    for (int k = 0; k < 7; ++k) d[k] = poly.coeffs[6 - k];
    if (d[0] == 0.0) {
        throw std::invalid_argument("routh_hurwitz: leading coefficient is zero");
    }
    if (d[0] < 0.0) {
        for (auto& v : d) v = -v;
    }

    double scale = 0.0;
    for (double v : d) scale = std::max(scale, std::abs(v));
    const double zero_tol = 1e-9 * scale;

    // Rows have at most 4 entries for degree 6.
    std::array<std::array<double, 4>, 7> rows{};
    rows[0] = {d[0], d[2], d[4], d[6]};
    rows[1] = {d[1], d[3], d[5], 0.0};

    for (int r = 1; r < 7; ++r) {
        const double head = rows[r][0];
        if (std::abs(head) <= zero_tol) {
            return RouthVerdict::Degenerate;
        }
        if (r == 6) break;
        for (int j = 0; j < 3; ++j) {
            rows[r + 1][j] = (head * rows[r - 1][j + 1] - rows[r - 1][0] * rows[r][j + 1]) / head;
        }
        rows[r + 1][3] = 0.0;
    }

    for (int r = 0; r < 7; ++r) {
        if (rows[r][0] < 0.0) {
            return RouthVerdict::Unstable;
        }
    }
    return RouthVerdict::Stable;
}

BoundaryPoint boundary_g1(double j, double kappa1, double gamma) {
    if (!(kappa1 > 0.0) || !(gamma > 0.0)) {
        throw NonPositiveRate("boundary_g1: kappa1 and gamma must be > 0");
    }
    if (j < 0.0) {
        throw NegativeValue("boundary_g1: j must be >= 0");
    }
    const double wm = SystemParams::omega_m;
    const double s  = 4.0 * j * j + gamma * gamma + gamma * kappa1;

    BoundaryPoint b;
    b.branch = Branch::G1;
    b.g_crit = std::sqrt(gamma * kappa1) *
               std::sqrt(s * s + 16.0 * wm * wm * (gamma + kappa1) * (gamma + kappa1)) /
               (8.0 * (gamma + kappa1) * wm);
    b.omega_crit = std::sqrt(j * j * gamma / (gamma + kappa1) + wm * wm);
    return b;
}

BoundaryPoint boundary_g2(double j, double kappa1, double gamma) {
    if (!(kappa1 > 0.0) || !(gamma > 0.0)) {
        throw NonPositiveRate("boundary_g2: kappa1 and gamma must be > 0");
    }
    if (j < 0.0) {
        throw NegativeValue("boundary_g2: j must be >= 0");
    }
    const double wm = SystemParams::omega_m;
    const double s  = 4.0 * j * j + gamma * gamma + gamma * kappa1;

    BoundaryPoint b;
    b.branch = Branch::G2;
    b.g_crit = std::sqrt(kappa1) *
               std::sqrt(s * s + 16.0 * gamma * gamma * wm * wm) /
               (8.0 * std::sqrt(gamma) * wm);
    b.omega_crit = std::sqrt(j * j + gamma * kappa1 / 4.0 + wm * wm);
    return b;
}

namespace {

struct MapCell {
    double code   = std::numeric_limits<double>::quiet_NaN();
    CellFlag flag = CellFlag::Ok;
};

MapCell verdict_cell(double j, double kappa1, double gamma, double g) {
    SystemParams p;
    p.delta1     = SystemParams::omega_m;
    p.delta2     = -SystemParams::omega_m;
    p.coupling_j = j;
    p.coupling_g = g;
    p.kappa1     = kappa1;
    p.kappa2     = 0.0;
    p.gamma      = gamma;
    MapCell cell;
    try {
        switch (eigen_spectrum(p).verdict) {
            case Verdict::Stable: cell.code = 0.0; break;
            case Verdict::Marginal: cell.code = 0.5; break;
            case Verdict::Unstable: cell.code = 1.0; break;
        }
    } catch (const std::exception&) {
        // Invalid cell parameters or solver failure; must not escape the
        // parallel region.
        cell.flag = CellFlag::Invalid;
    }
    return cell;
}

SweepGrid make_map_grid(std::span<const double> gamma_range, std::span<const double> g_range) {
    if (gamma_range.empty() || g_range.empty()) {
        throw EmptyGrid("stability_map: empty grid");
    }
    SweepGrid grid;
    grid.x_name      = "gamma";
    grid.y_name      = "g";
    grid.metric_name = "verdict";
    grid.x_axis.assign(gamma_range.begin(), gamma_range.end());
    grid.y_axis.assign(g_range.begin(), g_range.end());
    grid.cells.assign(grid.x_axis.size() * grid.y_axis.size(), 0.0);
    grid.flags.assign(grid.cells.size(), CellFlag::Ok);
    return grid;
}

} // namespace

SweepGrid stability_map_serial(double j, double kappa1,
                               std::span<const double> gamma_range,
                               std::span<const double> g_range) {
    SweepGrid grid = make_map_grid(gamma_range, g_range);
    for (std::size_t iy = 0; iy < grid.y_axis.size(); ++iy) {
        for (std::size_t ix = 0; ix < grid.x_axis.size(); ++ix) {
            const MapCell cell = verdict_cell(j, kappa1, grid.x_axis[ix], grid.y_axis[iy]);
            grid.cells[grid.index(iy, ix)] = cell.code;
            grid.flags[grid.index(iy, ix)] = cell.flag;
        }
    }
    return grid;
}

SweepGrid stability_map(double j, double kappa1,
                        std::span<const double> gamma_range,
                        std::span<const double> g_range,
                        int jobs) {
    SweepGrid grid = make_map_grid(gamma_range, g_range);
    const auto ncells = static_cast<std::ptrdiff_t>(grid.cells.size());
    const std::size_t nx = grid.x_axis.size();
    const int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (std::ptrdiff_t k = 0; k < ncells; ++k) {
        const std::size_t iy = static_cast<std::size_t>(k) / nx;
        const std::size_t ix = static_cast<std::size_t>(k) % nx;
        const MapCell cell = verdict_cell(j, kappa1, grid.x_axis[ix], grid.y_axis[iy]);
        grid.cells[k] = cell.code;
        grid.flags[k] = cell.flag;
    }
    return grid;
}

} // namespace optoamp
