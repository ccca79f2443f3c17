#include "optoamp/metrics.hpp"

#include "optoamp/errors.hpp"
#include "optoamp/scattering.hpp"
#include "optoamp/stability.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace optoamp {

LorentzianFit lorentzian_params(double j, double kappa1, double gamma, double delta) {
    if (!(kappa1 > 0.0) || !(gamma > 0.0)) {
        throw NonPositiveRate("lorentzian_params: kappa1 and gamma must be > 0");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("lorentzian_params: delta must be > 0");
    }
    const Complex i(0.0, 1.0);
    const double wm = SystemParams::omega_m;

    LorentzianFit fit;
    fit.delta = delta;
    fit.xi    = gamma + 4.0 * j * j / (gamma + kappa1);
    fit.sigma = std::sqrt(wm * wm + j * j * gamma / (gamma + kappa1));

    const Complex bracket = (gamma + kappa1) * (gamma + kappa1) * (4.0 * i * fit.sigma + gamma) -
                            4.0 * j * j * (gamma - kappa1);

    fit.kappa_gbw = i * kappa1 * j * j * gamma * (fit.xi - 4.0 * i * wm) *
                    (gamma * fit.xi + 8.0 * wm * wm + 8.0 * wm * fit.sigma) /
                    (4.0 * wm * fit.xi * fit.sigma * bracket);

    fit.a_shift = -8.0 * j * j * wm * std::sqrt(gamma) * std::sqrt(kappa1) *
                  std::sqrt(fit.xi * fit.xi + 16.0 * wm * wm) * delta /
                  (fit.xi * fit.sigma * bracket);
    return fit;
}

namespace {

constexpr std::size_t kCoarsePoints = 2001;

// Golden-section maximization of power_gain on (lo, hi), assumed unimodal.
double golden_max(const SystemParams& p, double lo, double hi, double xtol) {
    const double invphi  = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = invphi * invphi;
    double a = lo, b = hi;
    double h = b - a;
    double c = a + invphi2 * h;
    double d = a + invphi * h;
    double fc = power_gain(p, c);
    double fd = power_gain(p, d);
    while (h > xtol) {
        if (fc > fd) {
            b  = d;
            d  = c;
            fd = fc;
            h  = b - a;
            c  = a + invphi2 * h;
            fc = power_gain(p, c);
        } else {
            a  = c;
            c  = d;
            fc = fd;
            h  = b - a;
            d  = a + invphi * h;
            fd = power_gain(p, d);
        }
    }
    return 0.5 * (a + b);
}

// Walk outward from the peak until the gain drops below `half`, then bisect
// the crossing to 1e-12.
double half_crossing(const SystemParams& p, double omega_peak, double half,
                     double step0, int direction) {
    double step  = step0;
    double above = omega_peak;
    double below = 0.0;
    bool found   = false;
    for (int k = 0; k < 80; ++k) {
        const double w = omega_peak + direction * step;
        if (power_gain(p, w) < half) {
            below = w;
            found = true;
            break;
        }
        above = w;
        step *= 2.0;
    }
    if (!found) {
        throw NoPeakInBracket("half-max crossing not found within search range");
    }
    for (int k = 0; k < 200 && std::abs(above - below) > 1e-12; ++k) {
        const double mid = 0.5 * (above + below);
        if (power_gain(p, mid) >= half) {
            above = mid;
        } else {
            below = mid;
        }
    }
    return 0.5 * (above + below);
}

} // namespace

PeakMetrics find_peak(const SystemParams& p, double bracket_lo, double bracket_hi) {
    validate_params(p);
    if (!(bracket_lo < bracket_hi)) {
        throw std::invalid_argument("find_peak: bracket_lo must be < bracket_hi");
    }

    const double spacing = (bracket_hi - bracket_lo) / static_cast<double>(kCoarsePoints - 1);
    std::vector<double> gain(kCoarsePoints);
    for (std::size_t k = 0; k < kCoarsePoints; ++k) {
        gain[k] = power_gain(p, bracket_lo + spacing * static_cast<double>(k));
    }

    std::size_t imax = 0;
    for (std::size_t k = 1; k < kCoarsePoints; ++k) {
        if (gain[k] > gain[imax]) imax = k;
    }
    if (imax == 0 || imax == kCoarsePoints - 1) {
        throw NoPeakInBracket("coarse maximum sits on the bracket edge");
    }

    // Non-unimodal samples: more than one interior local maximum of comparable height.
    std::size_t n_peaks = 0;
    for (std::size_t k = 1; k + 1 < kCoarsePoints; ++k) {
        if (gain[k] > gain[k - 1] && gain[k] > gain[k + 1] && gain[k] >= 0.5 * gain[imax]) {
            ++n_peaks;
        }
    }
    if (n_peaks > 1) {
        throw MultiplePeaks("bracket contains more than one comparable local maximum");
    }

    PeakMetrics m;
    m.omega_peak = golden_max(p,
                              bracket_lo + spacing * static_cast<double>(imax - 1),
                              bracket_lo + spacing * static_cast<double>(imax + 1),
                              1e-10);
    m.gain_max = power_gain(p, m.omega_peak);

    const double half  = 0.5 * m.gain_max;
    const double right = half_crossing(p, m.omega_peak, half, spacing, +1);
    const double left  = half_crossing(p, m.omega_peak, half, spacing, -1);
    m.fwhm        = right - left;
    m.gbw_numeric = std::sqrt(m.gain_max) * m.fwhm / 2.0;
    return m;
}

double center_frequency(double j, double kappa1, double gamma) {
    if (!(kappa1 > 0.0) || !(gamma > 0.0)) {
        throw NonPositiveRate("center_frequency: rates must be > 0");
    }
    const double wm = SystemParams::omega_m;
    return -std::sqrt(j * j * gamma / (gamma + kappa1) + wm * wm);
}

LorentzianComparison lorentzian_vs_numeric(double j, double kappa1, double gamma, double delta) {
    LorentzianComparison cmp;
    cmp.analytic = lorentzian_params(j, kappa1, gamma, delta);

    SystemParams p;
    p.delta1     = SystemParams::omega_m;
    p.delta2     = -SystemParams::omega_m;
    p.coupling_j = j;
    p.coupling_g = boundary_g1(j, kappa1, gamma).g_crit - delta;
    p.kappa1     = kappa1;
    p.kappa2     = 0.0;
    p.gamma      = gamma;
    if (p.coupling_g < 0.0) {
        throw NotStable("lorentzian_vs_numeric: delta exceeds G(1)");
    }
    if (eigen_spectrum(p).verdict != Verdict::Stable) {
        throw NotStable("lorentzian_vs_numeric: operating point is not stable");
    }

    const double center = -cmp.analytic.sigma;
    cmp.numeric = find_peak(p, center - 0.15, center + 0.15);

    const double kappa_abs = std::abs(cmp.analytic.kappa_gbw);
    const double bw        = 2.0 * cmp.analytic.a_shift.imag();
    const double offset    = -cmp.analytic.a_shift.real();
    cmp.rel_gbw         = std::abs(kappa_abs - cmp.numeric.gbw_numeric) / kappa_abs;
    cmp.rel_bandwidth   = std::abs(bw - cmp.numeric.fwhm) / std::abs(bw);
    cmp.rel_peak_offset = std::abs(offset - (cmp.numeric.omega_peak + cmp.analytic.sigma)) /
                          std::max(std::abs(offset), 1e-300);
    return cmp;
}

} // namespace optoamp
