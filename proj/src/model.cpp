#include "optoamp/model.hpp"

#include "optoamp/errors.hpp"

#include <cmath>

namespace optoamp {

SystemParams validate_params(const SystemParams& raw) {
    if (!(raw.kappa1 > 0.0)) {
        throw NonPositiveRate("kappa1 must be > 0");
    }
    if (!(raw.gamma > 0.0)) {
        throw NonPositiveRate("gamma must be > 0");
    }
    if (raw.kappa2 < 0.0) {
        throw NegativeValue("kappa2 must be >= 0");
    }
    if (raw.coupling_j < 0.0) {
        throw NegativeValue("coupling_j must be >= 0");
    }
    if (raw.coupling_g < 0.0) {
        throw NegativeValue("coupling_g must be >= 0");
    }
    return raw;
}

DriftMatrix build_drift_matrix(const SystemParams& p) {
    const Complex i(0.0, 1.0);
    const double wm = SystemParams::omega_m;

    Matrix6c m = Matrix6c::Zero();

    // Row pairs (2k, 2k+1) hold a mode and its conjugate.
    m(0, 0) = i * p.delta1 - 0.5 * p.kappa1;
    m(0, 2) = -i * p.coupling_j;
    m(0, 4) = i * p.coupling_g;
    m(0, 5) = i * p.coupling_g;

    m(1, 1) = -i * p.delta1 - 0.5 * p.kappa1;
    m(1, 3) = i * p.coupling_j;
    m(1, 4) = -i * p.coupling_g;
    m(1, 5) = -i * p.coupling_g;

    m(2, 0) = -i * p.coupling_j;
    m(2, 2) = i * p.delta2 - 0.5 * p.kappa2;

    m(3, 1) = i * p.coupling_j;
    m(3, 3) = -i * p.delta2 - 0.5 * p.kappa2;

    m(4, 0) = i * p.coupling_g;
    m(4, 1) = i * p.coupling_g;
    m(4, 4) = -i * wm - 0.5 * p.gamma;

    m(5, 0) = -i * p.coupling_g;
    m(5, 1) = -i * p.coupling_g;
    m(5, 5) = i * wm - 0.5 * p.gamma;

    return DriftMatrix{m};
}

NoiseCouplingMatrix build_noise_matrix(const SystemParams& p) {
    Matrix6d l = Matrix6d::Zero();
    const double sk1 = std::sqrt(p.kappa1);
    const double sk2 = std::sqrt(p.kappa2);
    const double sg  = std::sqrt(p.gamma);
    l(0, 0) = sk1;
    l(1, 1) = sk1;
    l(2, 2) = sk2;
    l(3, 3) = sk2;
    l(4, 4) = sg;
    l(5, 5) = sg;
    return NoiseCouplingMatrix{l};
}

} // namespace optoamp
