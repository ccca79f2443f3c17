#pragma once

// Independent time-domain verification of the frequency-domain scattering:
// integrates du/dt = M u + L s(t) with a classical coherent probe in the
// cavity-1 input, forms the output via u_out = u_in - L u, and extracts the
// e^{-iwt} / e^{+iwt} tone coefficients of the port-1 output by least squares.
// For a linear system these coefficients equal the scattering coefficients,
// so the probe never touches the frequency-domain solve it checks.

#include "optoamp/model.hpp"

#include <span>
#include <vector>

namespace optoamp {

struct ProbeResult {
    double omega = 0.0;
    Complex a_est;          // coefficient of amplitude * e^{-iwt} in the output
    Complex b_est;          // coefficient of conj(amplitude) * e^{+iwt}
    double settle_time = 0.0;
    double residual    = 0.0; // max |y - fit| / max |y| over the window
};

// Integrates the driven Langevin ODE from u0 with an adaptive
// Dormand-Prince 5(4) scheme (abs/rel tolerance 1e-10), returning u at the
// requested sample times. `max_step` caps the step size. Throws StepTooLarge
// if the state norm grows beyond any physically possible stable response.
std::vector<Vector6c> integrate_trajectory(const SystemParams& p, const Vector6c& u0,
                                           Complex amplitude, double omega,
                                           std::span<const double> sample_times,
                                           double max_step);

// Runs a probe pair (amplitude and i*amplitude) so the two tones separate at
// every frequency including w = 0, and fits tones plus decaying eigenmode
// terms over the measurement window; the eigenmode terms absorb the residual
// transient, so `settle` does not have to outlast the slowest mode.
// Growing modes are rejected as NotStable; marginal (undamped but bounded)
// systems are allowed, near-singular probe frequencies are the caller's
// problem there.
ProbeResult time_domain_probe(const SystemParams& p, double omega, double amplitude,
                              double settle, double measure, double dt);

struct DefectEntry {
    double omega = 0.0;
    Complex a_fd, b_fd; // frequency-domain A(w) and the e^{+iwt} counterpart conj(U10(w))
    Complex a_td, b_td; // time-domain estimates
    double defect = 0.0;
    bool skipped  = false; // near-singular frequency, excluded from the summary
};

struct DefectReport {
    std::vector<DefectEntry> entries;
    double max_defect  = 0.0;
    double mean_defect = 0.0;
    std::size_t evaluated = 0;
};

struct ProbeSettings {
    double amplitude = 1.0;
    double settle    = 60.0;
    double measure   = 150.0;
    double dt        = 0.05;
};

DefectReport compare_scattering(const SystemParams& p, std::span<const double> omegas,
                                const ProbeSettings& settings = {});

} // namespace optoamp
