#pragma once

// Scalar metrics over 2-D parameter planes, marching-squares contour
// extraction, and the center-frequency tunability curve.

#include "optoamp/grid.hpp"
#include "optoamp/model.hpp"

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace optoamp {

enum class SweepMetric {
    GbwAnalytic,  // |kappa| from the closed form, G = G(1) - delta per cell
    GbwNumeric,   // sqrt(gain_max) * fwhm / 2 from find_peak, same G policy
    BOverAAtPeak, // |B(w_p)| / |A(w_p)| with w_p from find_peak, same G policy
    VerdictCode,  // eigenvalue verdict of the cell params as given (0/0.5/1)
};

// Accepts gbw_analytic | gbw_numeric | b_over_a_at_peak | verdict.
SweepMetric parse_metric(std::string_view name);
const char* metric_name(SweepMetric metric);

// Axis over one of the parameters j | kappa1 | kappa2 | gamma | g.
struct AxisSpec {
    std::string param;
    std::vector<double> values;
};

// Per-cell metric over the (x, y) plane; remaining parameters come from
// `base`. For the boundary-referenced metrics G is re-derived per cell as
// boundary_g1(j, kappa1, gamma) - delta, so the axis parameter "g" is only
// meaningful with the verdict metric. Unstable or singular cells are flagged,
// not fatal. Parallel and serial versions produce bit-identical grids.
SweepGrid sweep_plane_serial(const SystemParams& base, const AxisSpec& x, const AxisSpec& y,
                             SweepMetric metric, double delta = 1e-4);
SweepGrid sweep_plane(const SystemParams& base, const AxisSpec& x, const AxisSpec& y,
                      SweepMetric metric, double delta = 1e-4, int jobs = 0);

struct Polyline {
    std::vector<std::array<double, 2>> points;
    bool closed = false;
};

// Marching-squares level set with linear interpolation along edges; saddle
// cells are resolved by the cell-center value. Squares touching flagged cells
// are skipped, which breaks contours there.
std::vector<Polyline> extract_contour(const SweepGrid& grid, double level);

// (J, center_frequency) pairs over a J grid.
std::vector<std::pair<double, double>> tune_curve(double kappa1, double gamma,
                                                  std::span<const double> j_grid);

} // namespace optoamp
