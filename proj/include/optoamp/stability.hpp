#pragma once

// Dynamical stability of the drift matrix: eigenvalue classification, the
// Routh-Hurwitz sign test on the characteristic polynomial, and the analytic
// instability boundaries G(1), G(2) with their critical frequencies.

#include "optoamp/grid.hpp"
#include "optoamp/model.hpp"

#include <array>
#include <span>

namespace optoamp {

enum class Verdict { Stable, Marginal, Unstable };

const char* verdict_name(Verdict v);

// Tolerance band on the max real eigenvalue part separating the verdicts.
inline constexpr double kMarginalTol = 1e-9;

struct StabilityReport {
    std::array<Complex, 6> eigenvalues{}; // sorted by real part descending
    double max_real_part = 0.0;
    Verdict verdict      = Verdict::Stable;
    bool hurwitz_consistent = false;
};

// coeffs[k] multiplies lambda^k; coeffs[6] == 1 for a characteristic polynomial.
struct RealPolynomial {
    std::array<double, 7> coeffs{};
};

enum class RouthVerdict { Stable, Unstable, Degenerate };

enum class Branch { G1, G2 };

struct BoundaryPoint {
    double g_crit     = 0.0;
    double omega_crit = 0.0;
    Branch branch     = Branch::G1;
};

// Eigenvalues of M with a verdict per the tolerance band, plus a
// Routh-Hurwitz cross-check. Throws EigenSolverFailure on non-convergence.
StabilityReport eigen_spectrum(const SystemParams& p);

// det(lambda I - M) expanded by the Faddeev-LeVerrier recurrence. The
// conjugate-pair structure of M makes the coefficients real.
RealPolynomial characteristic_polynomial(const SystemParams& p);

// Sign test on the first column of the Routh array. Degenerate marks a
// (near-)zero first-column entry, i.e. a stability boundary; no
// epsilon-substitution is attempted there.
RouthVerdict routh_hurwitz(const RealPolynomial& poly);

// First instability boundary (kappa2 = 0, Delta1 = wm, Delta2 = -wm):
//   G(1) = sqrt(Gamma k1) sqrt((4J^2+Gamma^2+Gamma k1)^2 + 16 wm^2 (Gamma+k1)^2)
//          / (8 (Gamma+k1) wm)
//   w(1) = sqrt(J^2 Gamma/(Gamma+k1) + wm^2)
BoundaryPoint boundary_g1(double j, double kappa1, double gamma);

// Second boundary (separates two- from four-positive-root regimes; the system
// is unstable on both sides, so this is informational only):
//   G(2) = sqrt(k1) sqrt((4J^2+Gamma^2+Gamma k1)^2 + 16 Gamma^2 wm^2)
//          / (8 sqrt(Gamma) wm)
//   w(2) = sqrt(J^2 + Gamma k1/4 + wm^2)
BoundaryPoint boundary_g2(double j, double kappa1, double gamma);

// Per-cell eigenvalue verdict over a (Gamma, G) plane at fixed J, kappa1,
// with Delta1 = wm, Delta2 = -wm, kappa2 = 0. Cell values code the verdict:
// 0 stable, 0.5 marginal, 1 unstable.
SweepGrid stability_map_serial(double j, double kappa1,
                               std::span<const double> gamma_range,
                               std::span<const double> g_range);
SweepGrid stability_map(double j, double kappa1,
                        std::span<const double> gamma_range,
                        std::span<const double> g_range,
                        int jobs = 0);

} // namespace optoamp
