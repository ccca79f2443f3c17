#include "optoamp/scattering.hpp"

#include "optoamp/errors.hpp"

#include <omp.h>

#include <cmath>
#include <limits>

namespace optoamp {

namespace {

Matrix6c resolvent_lhs(const SystemParams& p, double omega) {
    Matrix6c a = build_drift_matrix(p).entries;
    a.diagonal().array() += Complex(0.0, omega);
    return a;
}

Eigen::PartialPivLU<Matrix6c> guarded_lu(const Matrix6c& a, double omega) {
    Eigen::PartialPivLU<Matrix6c> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / kConditionGuard)) {
        throw NearSingular("iw + M is near-singular at omega = " + std::to_string(omega) +
                           " (condition estimate " +
                           std::to_string(rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity()) +
                           ")");
    }
    return lu;
}

} // namespace

ScatteringMatrixAtFrequency scattering_matrix(const SystemParams& p, double omega) {
    validate_params(p);
    const Matrix6c lhs = resolvent_lhs(p, omega);
    const Matrix6d l   = build_noise_matrix(p).entries;
    const auto lu      = guarded_lu(lhs, omega);

    const Matrix6c x = lu.solve(l.cast<Complex>());
    const double resid = (lhs * x - l.cast<Complex>()).norm();
    if (resid > 1e-10 * l.norm()) {
        throw NearSingular("solve residual " + std::to_string(resid) + " exceeds tolerance");
    }

    ScatteringMatrixAtFrequency out;
    out.omega   = omega;
    out.entries = Matrix6c::Identity() + l * x;
    return out;
}

ScatteringCoefficients coefficients(const SystemParams& p, double omega) {
    const auto u = scattering_matrix(p, omega);
    ScatteringCoefficients c;
    c.omega = omega;
    c.a = u.entries(0, 0);
    c.b = u.entries(0, 1);
    c.c = u.entries(0, 2);
    c.d = u.entries(0, 3);
    c.e = u.entries(0, 4);
    c.f = u.entries(0, 5);
    return c;
}

double power_gain(const SystemParams& p, double omega) {
    // Only A(w) = 1 + kappa1 [(iw+M)^{-1}]_00 is needed; solve a single column.
    validate_params(p);
    const Matrix6c lhs = resolvent_lhs(p, omega);
    const auto lu      = guarded_lu(lhs, omega);

    Vector6c rhs = Vector6c::Zero();
    rhs(0) = std::sqrt(p.kappa1);
    const Vector6c x = lu.solve(rhs);
    if ((lhs * x - rhs).norm() > 1e-10 * rhs.norm()) {
        throw NearSingular("solve residual exceeds tolerance");
    }
    const Complex a = 1.0 + std::sqrt(p.kappa1) * x(0);
    return std::norm(a);
}

ClosedFormGainTerms closed_form_terms(const SystemParams& p, double omega) {
    const Complex i(0.0, 1.0);
    const double wm = SystemParams::omega_m;
    const double d1 = p.delta1;
    const double d2 = p.delta2;
    const double j  = p.coupling_j;
    const double g  = p.coupling_g;
    const double k1 = p.kappa1;
    const double gm = p.gamma;
    const double w  = omega;

    ClosedFormGainTerms t;
    t.alpha = 4.0 * wm * wm + (gm - 2.0 * i * w) * (gm - 2.0 * i * w);
    t.beta  = d1 * (d2 * d2 - w * w) - d2 * j * j;
    t.rho   = t.alpha * (4.0 * j * j * j * j +
                         (d2 * d2 - w * w) * ((k1 - 2.0 * i * w) * (k1 - 2.0 * i * w) + 4.0 * d1 * d1) -
                         4.0 * i * j * j * w * (k1 - 2.0 * i * w) -
                         8.0 * d1 * d2 * j * j) +
              64.0 * g * g * wm * t.beta;
    return t;
}

double closed_form_gain(const SystemParams& p, double omega) {
    validate_params(p);
    if (p.kappa2 != 0.0) {
        throw Kappa2NotZero("closed-form gain is only defined for kappa2 = 0");
    }
    const Complex i(0.0, 1.0);
    const double wm = SystemParams::omega_m;
    const double d1 = p.delta1;
    const double d2 = p.delta2;
    const double j  = p.coupling_j;
    const double g  = p.coupling_g;
    const double k1 = p.kappa1;
    const double w  = omega;

    const ClosedFormGainTerms t = closed_form_terms(p, omega);
    if (std::abs(t.rho) < 1e-300) {
        throw DenominatorUnderflow("|rho(omega)| < 1e-300");
    }

    const Complex numer =
        2.0 * i * k1 * (-d2 - w) *
        ((-2.0 * j * j + (-d2 + w) * (-2.0 * d1 + i * k1 + 2.0 * w)) * t.alpha -
         16.0 * g * g * wm * (-d2 + w));

    return std::norm(1.0 + numer / t.rho);
}

std::vector<SpectrumPoint> gain_spectrum_serial(const SystemParams& p,
                                                std::span<const double> grid) {
    validate_params(p);
    if (grid.empty()) {
        throw EmptyGrid("gain_spectrum: empty frequency grid");
    }
    std::vector<SpectrumPoint> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out[k].omega = grid[k];
        try {
            out[k].gain = power_gain(p, grid[k]);
        } catch (const NearSingular&) {
            out[k].gain    = std::numeric_limits<double>::quiet_NaN();
            out[k].flagged = true;
        }
    }
    return out;
}

std::vector<SpectrumPoint> gain_spectrum(const SystemParams& p,
                                         std::span<const double> grid,
                                         int jobs) {
    validate_params(p);
    if (grid.empty()) {
        throw EmptyGrid("gain_spectrum: empty frequency grid");
    }
    std::vector<SpectrumPoint> out(grid.size());
    const int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(grid.size()); ++k) {
        out[k].omega = grid[k];
        try {
            out[k].gain = power_gain(p, grid[k]);
        } catch (const NearSingular&) {
            out[k].gain    = std::numeric_limits<double>::quiet_NaN();
            out[k].flagged = true;
        }
    }
    return out;
}

double added_noise(const SystemParams& p, double omega, double n_eff) {
    if (n_eff < 0.0) {
        throw std::invalid_argument("added_noise: n_eff must be >= 0");
    }
    const auto c = coefficients(p, omega);
    return (std::norm(c.f) / std::norm(c.a)) * (n_eff + 0.5);
}

double symplectic_defect(const SystemParams& p, double omega) {
    const auto u = scattering_matrix(p, omega);
    Vector6d kdiag;
    kdiag << 1, -1, 1, -1, 1, -1;
    const Matrix6c k = kdiag.cast<Complex>().asDiagonal();
    const Matrix6c defect = u.entries * k * u.entries.adjoint() - k;
    return defect.cwiseAbs().maxCoeff();
}

} // namespace optoamp
