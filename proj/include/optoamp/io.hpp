#pragma once

// File formats for results: CSV with a header row, LF line endings and
// 17-significant-digit decimals (round-trips doubles bit-exactly), plus JSON
// serialization of SystemParams and sweep grids.

#include "optoamp/grid.hpp"
#include "optoamp/model.hpp"
#include "optoamp/oracle.hpp"
#include "optoamp/scattering.hpp"
#include "optoamp/stability.hpp"
#include "optoamp/sweep.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace optoamp::io {

// Shortest decimal with up to 17 significant digits.
std::string format_double(double value);

SystemParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const SystemParams& p);

struct RatioRow {
    double omega = 0.0;
    double b_over_a = 0.0, c_over_a = 0.0, d_over_a = 0.0, e_over_a = 0.0, f_over_a = 0.0;
};

void write_spectrum_csv(const std::string& path, const std::vector<SpectrumPoint>& points);
void write_ratios_csv(const std::string& path, const std::vector<RatioRow>& rows);

// `gamma,g,verdict` with verdict in {stable, marginal, unstable}.
void write_verdict_map_csv(const std::string& path, const SweepGrid& grid);

// `gamma,g_crit,omega_crit,branch`.
void write_boundary_csv(const std::string& path,
                        const std::vector<std::pair<double, BoundaryPoint>>& rows);

// Long form `x,y,value,flag`.
void write_sweep_csv(const std::string& path, const SweepGrid& grid);

// Compact JSON: axes plus row-major values (null for flagged cells).
void write_sweep_json(const std::string& path, const SweepGrid& grid);

// `polyline_id,x,y`.
void write_contours_csv(const std::string& path, const std::vector<Polyline>& lines);

void write_tune_csv(const std::string& path,
                    const std::vector<std::pair<double, double>>& rows);

nlohmann::json defect_report_to_json(const DefectReport& report);

} // namespace optoamp::io
