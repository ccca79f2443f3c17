#pragma once

// Gain-peak metrics. Near the first instability boundary the power gain is a
// Lorentzian |1 + kappa/(x + a)|^2 in the deviation x of omega from -|w(1)|;
// kappa and a have closed forms in (J, kappa1, Gamma, delta) with
// G = G(1) - delta. The bandwidth is 2 Im[a] and the gain-bandwidth product
// is |kappa|. The numeric counterparts come from direct peak extraction on
// |A(w)|^2, which also covers kappa2 != 0 where the closed forms do not hold.

#include "optoamp/model.hpp"

namespace optoamp {

struct LorentzianFit {
    Complex kappa_gbw;   // gain-bandwidth product (complex form; |kappa| is the product)
    Complex a_shift;     // pole offset; -Re[a] shifts the peak, 2 Im[a] is the bandwidth
    double xi    = 0.0;  // Gamma + 4 J^2/(Gamma + kappa1)
    double sigma = 0.0;  // sqrt(wm^2 + J^2 Gamma/(Gamma + kappa1)) == w(1)
    double delta = 0.0;  // boundary offset, G = G(1) - delta
};

struct PeakMetrics {
    double omega_peak  = 0.0;
    double gain_max    = 0.0;
    double fwhm        = 0.0;
    double gbw_numeric = 0.0; // sqrt(gain_max) * fwhm / 2
};

struct LorentzianComparison {
    LorentzianFit analytic;
    PeakMetrics numeric;
    double rel_gbw         = 0.0; // | |kappa| - gbw_numeric | / |kappa|
    double rel_bandwidth   = 0.0; // | 2 Im[a] - fwhm | / 2 Im[a]
    double rel_peak_offset = 0.0; // | (-Re[a]) - (omega_peak + sigma) | / |Re[a]|
};

// Closed-form kappa and a. Requires delta > 0 and positive rates.
LorentzianFit lorentzian_params(double j, double kappa1, double gamma, double delta);

// Locates the unique maximum of power_gain inside [bracket_lo, bracket_hi]:
// 2001-point coarse scan, golden-section refinement to 1e-10, FWHM by
// bisection on the half-max crossings to 1e-12.
// Throws NoPeakInBracket / MultiplePeaks when the samples are not unimodal.
PeakMetrics find_peak(const SystemParams& p, double bracket_lo, double bracket_hi);

// Center frequency of the amplifier, -|w(1)| = -sqrt(J^2 Gamma/(Gamma+kappa1) + wm^2).
double center_frequency(double j, double kappa1, double gamma);

// Builds the kappa2 = 0 operating point G = G(1) - delta and compares the
// analytic Lorentzian parameters with the numerically extracted peak.
LorentzianComparison lorentzian_vs_numeric(double j, double kappa1, double gamma, double delta);

} // namespace optoamp
