#include "optoamp/sweep.hpp"

#include "optoamp/errors.hpp"
#include "optoamp/metrics.hpp"
#include "optoamp/scattering.hpp"
#include "optoamp/stability.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace optoamp {

SweepMetric parse_metric(std::string_view name) {
    if (name == "gbw_analytic") return SweepMetric::GbwAnalytic;
    if (name == "gbw_numeric") return SweepMetric::GbwNumeric;
    if (name == "b_over_a_at_peak") return SweepMetric::BOverAAtPeak;
    if (name == "verdict") return SweepMetric::VerdictCode;
    throw UnknownMetric("unknown sweep metric: " + std::string(name));
}

const char* metric_name(SweepMetric metric) {
    switch (metric) {
        case SweepMetric::GbwAnalytic: return "gbw_analytic";
        case SweepMetric::GbwNumeric: return "gbw_numeric";
        case SweepMetric::BOverAAtPeak: return "b_over_a_at_peak";
        case SweepMetric::VerdictCode: return "verdict";
    }
    return "verdict";
}

namespace {

void apply_param(SystemParams& p, const std::string& name, double value) {
    if (name == "j") {
        p.coupling_j = value;
    } else if (name == "kappa1") {
        p.kappa1 = value;
    } else if (name == "kappa2") {
        p.kappa2 = value;
    } else if (name == "gamma") {
        p.gamma = value;
    } else if (name == "g") {
        p.coupling_g = value;
    } else {
        throw UnknownParam("unknown sweep parameter: " + name);
    }
}

struct CellResult {
    double value  = std::numeric_limits<double>::quiet_NaN();
    CellFlag flag = CellFlag::Ok;
};

CellResult eval_cell(SystemParams p, SweepMetric metric, double delta) {
    CellResult out;
    try {
        validate_params(p);
        if (metric == SweepMetric::VerdictCode) {
            switch (eigen_spectrum(p).verdict) {
                case Verdict::Stable: out.value = 0.0; break;
                case Verdict::Marginal: out.value = 0.5; break;
                case Verdict::Unstable: out.value = 1.0; break;
            }
            return out;
        }

        // Boundary-referenced metrics pin G just below the first instability.
        const double g1 = boundary_g1(p.coupling_j, p.kappa1, p.gamma).g_crit;
        p.coupling_g    = g1 - delta;
        if (p.coupling_g < 0.0) {
            out.flag = CellFlag::Invalid;
            return out;
        }

        if (metric == SweepMetric::GbwAnalytic) {
            out.value = std::abs(
                lorentzian_params(p.coupling_j, p.kappa1, p.gamma, delta).kappa_gbw);
            if (eigen_spectrum(p).verdict == Verdict::Unstable) {
                out.flag = CellFlag::Unstable;
            }
            return out;
        }

        if (eigen_spectrum(p).verdict != Verdict::Stable) {
            out.flag = CellFlag::Unstable;
            return out;
        }
        const double center = center_frequency(p.coupling_j, p.kappa1, p.gamma);
        const PeakMetrics peak = find_peak(p, center - 0.15, center + 0.15);
        if (metric == SweepMetric::GbwNumeric) {
            out.value = peak.gbw_numeric;
        } else {
            const auto c = coefficients(p, peak.omega_peak);
            out.value    = std::abs(c.b) / std::abs(c.a);
        }
    } catch (const NearSingular&) {
        out.flag = CellFlag::Singular;
    } catch (const NoPeakInBracket&) {
        out.flag = CellFlag::NoPeak;
    } catch (const MultiplePeaks&) {
        out.flag = CellFlag::NoPeak;
    } catch (const std::exception&) {
        // Anything else (invalid cell parameters, solver failure) must not
        // escape the parallel region; the flag records the dead cell.
        out.flag = CellFlag::Invalid;
    }
    if (out.flag != CellFlag::Ok) {
        out.value = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

SweepGrid make_sweep_grid(const SystemParams& base, const AxisSpec& x, const AxisSpec& y,
                          SweepMetric metric) {
    if (x.values.empty() || y.values.empty()) {
        throw EmptyGrid("sweep_plane: empty axis grid");
    }
    {
        // Reject unknown axis names up front.
        SystemParams probe = base;
        apply_param(probe, x.param, x.values.front());
        apply_param(probe, y.param, y.values.front());
    }
    if (metric != SweepMetric::VerdictCode && (x.param == "g" || y.param == "g")) {
        throw std::invalid_argument(
            "sweep_plane: axis 'g' conflicts with a metric that derives G from the boundary");
    }
    SweepGrid grid;
    grid.x_name      = x.param;
    grid.y_name      = y.param;
    grid.x_axis      = x.values;
    grid.y_axis      = y.values;
    grid.metric_name = metric_name(metric);
    grid.cells.assign(x.values.size() * y.values.size(),
                      std::numeric_limits<double>::quiet_NaN());
    grid.flags.assign(grid.cells.size(), CellFlag::Ok);
    return grid;
}

} // namespace

SweepGrid sweep_plane_serial(const SystemParams& base, const AxisSpec& x, const AxisSpec& y,
                             SweepMetric metric, double delta) {
    SweepGrid grid = make_sweep_grid(base, x, y, metric);
    for (std::size_t iy = 0; iy < grid.y_axis.size(); ++iy) {
        for (std::size_t ix = 0; ix < grid.x_axis.size(); ++ix) {
            SystemParams p = base;
            apply_param(p, x.param, grid.x_axis[ix]);
            apply_param(p, y.param, grid.y_axis[iy]);
            const CellResult r              = eval_cell(p, metric, delta);
            grid.cells[grid.index(iy, ix)]  = r.value;
            grid.flags[grid.index(iy, ix)]  = r.flag;
        }
    }
    return grid;
}

SweepGrid sweep_plane(const SystemParams& base, const AxisSpec& x, const AxisSpec& y,
                      SweepMetric metric, double delta, int jobs) {
    SweepGrid grid = make_sweep_grid(base, x, y, metric);
    const auto ncells  = static_cast<std::ptrdiff_t>(grid.cells.size());
    const std::size_t nx = grid.x_axis.size();
    const int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
    for (std::ptrdiff_t k = 0; k < ncells; ++k) {
        const std::size_t iy = static_cast<std::size_t>(k) / nx;
        const std::size_t ix = static_cast<std::size_t>(k) % nx;
        SystemParams p = base;
        apply_param(p, grid.x_name, grid.x_axis[ix]);
        apply_param(p, grid.y_name, grid.y_axis[iy]);
        const CellResult r = eval_cell(p, metric, delta);
        grid.cells[k]      = r.value;
        grid.flags[k]      = r.flag;
    }
    return grid;
}

namespace {

// Endpoint identity of a contour vertex: it lies on a horizontal or vertical
// grid edge. Keying by the edge (not the interpolated coordinates) makes the
// chaining exact.
struct EdgeKey {
    int horizontal = 0; // 1 if the edge runs along x
    int ix = 0, iy = 0; // lower-left node of the edge
    auto operator<=>(const EdgeKey&) const = default;
};

struct Segment {
    EdgeKey a, b;
    std::array<double, 2> pa{}, pb{};
};

std::array<double, 2> interp_on_edge(const SweepGrid& g, const EdgeKey& e, double level) {
    const double x0 = g.x_axis[e.ix];
    const double y0 = g.y_axis[e.iy];
    if (e.horizontal) {
        const double v0 = g.at(e.iy, e.ix);
        const double v1 = g.at(e.iy, e.ix + 1);
        const double t  = (level - v0) / (v1 - v0);
        return {x0 + t * (g.x_axis[e.ix + 1] - x0), y0};
    }
    const double v0 = g.at(e.iy, e.ix);
    const double v1 = g.at(e.iy + 1, e.ix);
    const double t  = (level - v0) / (v1 - v0);
    return {x0, y0 + t * (g.y_axis[e.iy + 1] - y0)};
}

} // namespace

std::vector<Polyline> extract_contour(const SweepGrid& grid, double level) {
    const std::size_t nx = grid.x_axis.size();
    const std::size_t ny = grid.y_axis.size();
    if (nx == 0 || ny == 0) {
        throw EmptyGrid("extract_contour: empty grid");
    }

    std::vector<Segment> segments;
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const double v00 = grid.at(iy, ix);
            const double v10 = grid.at(iy, ix + 1);
            const double v01 = grid.at(iy + 1, ix);
            const double v11 = grid.at(iy + 1, ix + 1);
            if (grid.flag_at(iy, ix) != CellFlag::Ok ||
                grid.flag_at(iy, ix + 1) != CellFlag::Ok ||
                grid.flag_at(iy + 1, ix) != CellFlag::Ok ||
                grid.flag_at(iy + 1, ix + 1) != CellFlag::Ok ||
                std::isnan(v00) || std::isnan(v10) || std::isnan(v01) || std::isnan(v11)) {
                continue;
            }

            int code = 0;
            if (v00 >= level) code |= 1;
            if (v10 >= level) code |= 2;
            if (v11 >= level) code |= 4;
            if (v01 >= level) code |= 8;
            if (code == 0 || code == 15) continue;

            const int i = static_cast<int>(ix), j = static_cast<int>(iy);
            const EdgeKey bottom{1, i, j};
            const EdgeKey top{1, i, j + 1};
            const EdgeKey left{0, i, j};
            const EdgeKey right{0, i + 1, j};

            auto emit = [&](EdgeKey a, EdgeKey b) {
                segments.push_back({a, b,
                                    interp_on_edge(grid, a, level),
                                    interp_on_edge(grid, b, level)});
            };

            switch (code) {
                case 1: case 14: emit(left, bottom); break;
                case 2: case 13: emit(bottom, right); break;
                case 3: case 12: emit(left, right); break;
                case 4: case 11: emit(right, top); break;
                case 6: case 9:  emit(bottom, top); break;
                case 7: case 8:  emit(left, top); break;
                case 5: case 10: {
                    // Saddle: disambiguate with the cell-center value.
                    const double center = 0.25 * (v00 + v10 + v01 + v11);
                    const bool center_above = center >= level;
                    if ((code == 5) == center_above) {
                        emit(left, top);
                        emit(bottom, right);
                    } else {
                        emit(left, bottom);
                        emit(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // Chain segments into polylines through shared edge keys.
    std::multimap<EdgeKey, std::size_t> by_end;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_end.insert({segments[s].a, s});
        by_end.insert({segments[s].b, s});
    }
    std::vector<bool> used(segments.size(), false);

    auto take_next = [&](const EdgeKey& key, std::size_t& seg_out) {
        auto [lo, hi] = by_end.equal_range(key);
        for (auto it = lo; it != hi; ++it) {
            if (!used[it->second]) {
                seg_out = it->second;
                return true;
            }
        }
        return false;
    };

    std::vector<Polyline> polylines;
    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;

        std::vector<EdgeKey> keys{segments[s0].a, segments[s0].b};
        std::vector<std::array<double, 2>> pts{segments[s0].pa, segments[s0].pb};

        // Extend forward from the tail, then backward from the head.
        for (int dir = 0; dir < 2; ++dir) {
            while (true) {
                const EdgeKey& tip = dir == 0 ? keys.back() : keys.front();
                std::size_t s;
                if (!take_next(tip, s)) break;
                used[s] = true;
                const bool from_a   = segments[s].a == tip;
                const EdgeKey nk    = from_a ? segments[s].b : segments[s].a;
                const auto np       = from_a ? segments[s].pb : segments[s].pa;
                if (dir == 0) {
                    keys.push_back(nk);
                    pts.push_back(np);
                } else {
                    keys.insert(keys.begin(), nk);
                    pts.insert(pts.begin(), np);
                }
            }
        }

        Polyline line;
        line.closed = keys.size() > 2 && keys.front() == keys.back();
        if (line.closed) {
            pts.pop_back();
        }
        line.points = std::move(pts);
        polylines.push_back(std::move(line));
    }
    return polylines;
}

std::vector<std::pair<double, double>> tune_curve(double kappa1, double gamma,
                                                  std::span<const double> j_grid) {
    if (j_grid.empty()) {
        throw EmptyGrid("tune_curve: empty J grid");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(j_grid.size());
    for (double j : j_grid) {
        if (j < 0.0) {
            throw NegativeValue("tune_curve: j must be >= 0");
        }
        out.emplace_back(j, center_frequency(j, kappa1, gamma));
    }
    return out;
}

} // namespace optoamp
