#pragma once

// Linearized two-cavity optomechanical model: effective parameter set and the
// drift / noise-coupling matrices of the fluctuation dynamics
//     du/dt = M u + L u_in
// in the doubled basis u = (da1, da1+, da2, da2+, db, db+)^T.
// All frequencies and rates are in units of the mechanical frequency w_m = 1.

#include <Eigen/Dense>

#include <complex>

namespace optoamp {

using Complex  = std::complex<double>;
using Matrix6c = Eigen::Matrix<Complex, 6, 6>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6c = Eigen::Matrix<Complex, 6, 1>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

// Effective linearized parameters. delta1, delta2 are the drive-frame
// detunings of the two cavities, coupling_j the inter-cavity coupling,
// coupling_g the drive-enhanced optomechanical coupling (real, nonnegative),
// kappa1/kappa2/gamma the decay rates of cavity 1, cavity 2 and the mechanics.
struct SystemParams {
    double delta1     = 1.0;
    double delta2     = -1.0;
    double coupling_j = 0.0;
    double coupling_g = 0.0;
    double kappa1     = 0.1;
    double kappa2     = 0.0;
    double gamma      = 0.1;

    // Normalization constant; everything is expressed in units of it.
    static constexpr double omega_m = 1.0;
};

struct DriftMatrix {
    Matrix6c entries;
};

// diag(sqrt(k1), sqrt(k1), sqrt(k2), sqrt(k2), sqrt(Gamma), sqrt(Gamma))
struct NoiseCouplingMatrix {
    Matrix6d entries;

    Vector6d diagonal() const { return entries.diagonal(); }
};

// Returns the params unchanged if all invariants hold.
// Throws NonPositiveRate if kappa1 <= 0 or gamma <= 0,
// NegativeValue if kappa2, coupling_j or coupling_g is negative.
SystemParams validate_params(const SystemParams& raw);

DriftMatrix build_drift_matrix(const SystemParams& p);

NoiseCouplingMatrix build_noise_matrix(const SystemParams& p);

} // namespace optoamp
