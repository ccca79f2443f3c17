#pragma once

// Frequency-domain input-output scattering of the linearized system:
// U(w) = 1 + L [iw + M]^{-1} L maps the input operator vector to the output
// vector, u_out[w] = U(w) u_in[w]. The first row of U gives the six
// amplification coefficients A..F of a1_out, and the power gain is |A|^2.

#include "optoamp/model.hpp"

#include <span>
#include <vector>

namespace optoamp {

struct ScatteringMatrixAtFrequency {
    double omega = 0.0;
    Matrix6c entries;
};

// Coefficients of a1_in, a1_in+, a2_in, a2_in+, b_in, b_in+ in a1_out.
struct ScatteringCoefficients {
    double omega = 0.0;
    Complex a, b, c, d, e, f;
};

// Ingredients of the closed-form power gain (kappa2 = 0):
//   alpha(w) = 4 wm^2 + (Gamma - 2iw)^2
//   beta(w)  = Delta1 (Delta2^2 - w^2) - Delta2 J^2
//   rho(w)   = full denominator of the gain fraction; rho = 0 marks the
//              critical points of instability.
struct ClosedFormGainTerms {
    Complex alpha, beta, rho;
};

struct SpectrumPoint {
    double omega = 0.0;
    double gain  = 0.0;
    bool flagged = false; // near-singular grid point, gain not meaningful
};

// Condition-number guard: a solve is rejected as NearSingular when the
// estimated condition number of iw + M exceeds this.
inline constexpr double kConditionGuard = 1e12;

ScatteringMatrixAtFrequency scattering_matrix(const SystemParams& p, double omega);

ScatteringCoefficients coefficients(const SystemParams& p, double omega);

double power_gain(const SystemParams& p, double omega);

ClosedFormGainTerms closed_form_terms(const SystemParams& p, double omega);

// Closed-form |A(w)|^2. Requires kappa2 = 0 (the formula is derived there);
// throws Kappa2NotZero otherwise, DenominatorUnderflow if |rho| < 1e-300.
double closed_form_gain(const SystemParams& p, double omega);

// Pointwise power gain over a frequency grid. Near-singular points are
// flagged, not fatal. The parallel version is bit-identical to the serial
// reference (cells are independent).
std::vector<SpectrumPoint> gain_spectrum_serial(const SystemParams& p,
                                                std::span<const double> grid);
std::vector<SpectrumPoint> gain_spectrum(const SystemParams& p,
                                         std::span<const double> grid,
                                         int jobs = 0);

// Added noise photon number referred to the input: (|F|^2/|A|^2)(n_eff + 1/2).
double added_noise(const SystemParams& p, double omega, double n_eff);

// Max-abs entry of U K U+ - K with K = diag(+1,-1,+1,-1,+1,-1); measures how
// well the scattering preserves bosonic commutators.
double symplectic_defect(const SystemParams& p, double omega);

} // namespace optoamp
