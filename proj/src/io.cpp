#include "optoamp/io.hpp"

#include "optoamp/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace optoamp::io {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

SystemParams params_from_json(const nlohmann::json& j) {
    static const char* const keys[] = {"delta1", "delta2", "j", "g", "kappa1", "kappa2", "gamma"};
    if (!j.is_object()) {
        throw std::invalid_argument("params must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : keys) {
            if (key == k) known = true;
        }
        if (!known) {
            throw std::invalid_argument("unknown params key: " + key);
        }
        if (!value.is_number()) {
            throw std::invalid_argument("params key '" + key + "' must be a number");
        }
    }
    for (const char* k : keys) {
        if (!j.contains(k)) {
            throw std::invalid_argument(std::string("missing params key: ") + k);
        }
    }
    SystemParams p;
    p.delta1     = j.at("delta1").get<double>();
    p.delta2     = j.at("delta2").get<double>();
    p.coupling_j = j.at("j").get<double>();
    p.coupling_g = j.at("g").get<double>();
    p.kappa1     = j.at("kappa1").get<double>();
    p.kappa2     = j.at("kappa2").get<double>();
    p.gamma      = j.at("gamma").get<double>();
    return p;
}

nlohmann::json params_to_json(const SystemParams& p) {
    return nlohmann::json{{"delta1", p.delta1}, {"delta2", p.delta2},
                          {"j", p.coupling_j},  {"g", p.coupling_g},
                          {"kappa1", p.kappa1}, {"kappa2", p.kappa2},
                          {"gamma", p.gamma}};
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    return out;
}

} // namespace

void write_spectrum_csv(const std::string& path, const std::vector<SpectrumPoint>& points) {
    auto out = open_out(path);
    out << "omega,gain\n";
    for (const auto& pt : points) {
        out << format_double(pt.omega) << ','
            << (pt.flagged ? "nan" : format_double(pt.gain)) << '\n';
    }
}

void write_ratios_csv(const std::string& path, const std::vector<RatioRow>& rows) {
    auto out = open_out(path);
    out << "omega,abs_B_over_A,abs_C_over_A,abs_D_over_A,abs_E_over_A,abs_F_over_A\n";
    for (const auto& r : rows) {
        out << format_double(r.omega) << ',' << format_double(r.b_over_a) << ','
            << format_double(r.c_over_a) << ',' << format_double(r.d_over_a) << ','
            << format_double(r.e_over_a) << ',' << format_double(r.f_over_a) << '\n';
    }
}

void write_verdict_map_csv(const std::string& path, const SweepGrid& grid) {
    auto out = open_out(path);
    out << "gamma,g,verdict\n";
    for (std::size_t iy = 0; iy < grid.y_axis.size(); ++iy) {
        for (std::size_t ix = 0; ix < grid.x_axis.size(); ++ix) {
            const double code = grid.at(iy, ix);
            const char* word  = code < 0.25 ? "stable" : (code < 0.75 ? "marginal" : "unstable");
            out << format_double(grid.x_axis[ix]) << ',' << format_double(grid.y_axis[iy])
                << ',' << word << '\n';
        }
    }
}

void write_boundary_csv(const std::string& path,
                        const std::vector<std::pair<double, BoundaryPoint>>& rows) {
    auto out = open_out(path);
    out << "gamma,g_crit,omega_crit,branch\n";
    for (const auto& [gamma, bp] : rows) {
        out << format_double(gamma) << ',' << format_double(bp.g_crit) << ','
            << format_double(bp.omega_crit) << ','
            << (bp.branch == Branch::G1 ? "G1" : "G2") << '\n';
    }
}

void write_sweep_csv(const std::string& path, const SweepGrid& grid) {
    auto out = open_out(path);
    out << grid.x_name << ',' << grid.y_name << ",value,flag\n";
    for (std::size_t iy = 0; iy < grid.y_axis.size(); ++iy) {
        for (std::size_t ix = 0; ix < grid.x_axis.size(); ++ix) {
            const double v = grid.at(iy, ix);
            out << format_double(grid.x_axis[ix]) << ',' << format_double(grid.y_axis[iy])
                << ',' << (std::isnan(v) ? "nan" : format_double(v)) << ','
                << cell_flag_name(grid.flag_at(iy, ix)) << '\n';
        }
    }
}

void write_sweep_json(const std::string& path, const SweepGrid& grid) {
    nlohmann::json j;
    j["metric"] = grid.metric_name;
    j["x"]      = {{"name", grid.x_name}, {"values", grid.x_axis}};
    j["y"]      = {{"name", grid.y_name}, {"values", grid.y_axis}};
    nlohmann::json values = nlohmann::json::array();
    nlohmann::json flags  = nlohmann::json::array();
    for (std::size_t k = 0; k < grid.cells.size(); ++k) {
        if (std::isnan(grid.cells[k])) {
            values.push_back(nullptr);
        } else {
            values.push_back(grid.cells[k]);
        }
        flags.push_back(cell_flag_name(grid.flags[k]));
    }
    j["values"] = std::move(values);
    j["flags"]  = std::move(flags);

    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_contours_csv(const std::string& path, const std::vector<Polyline>& lines) {
    auto out = open_out(path);
    out << "polyline_id,x,y\n";
    for (std::size_t id = 0; id < lines.size(); ++id) {
        for (const auto& pt : lines[id].points) {
            out << id << ',' << format_double(pt[0]) << ',' << format_double(pt[1]) << '\n';
        }
    }
}

void write_tune_csv(const std::string& path,
                    const std::vector<std::pair<double, double>>& rows) {
    auto out = open_out(path);
    out << "j,center_frequency\n";
    for (const auto& [j, f] : rows) {
        out << format_double(j) << ',' << format_double(f) << '\n';
    }
}

nlohmann::json defect_report_to_json(const DefectReport& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& entry : report.entries) {
        nlohmann::json e;
        e["omega"]   = entry.omega;
        e["skipped"] = entry.skipped;
        if (!entry.skipped) {
            e["a_fd"]   = {entry.a_fd.real(), entry.a_fd.imag()};
            e["a_td"]   = {entry.a_td.real(), entry.a_td.imag()};
            e["b_fd"]   = {entry.b_fd.real(), entry.b_fd.imag()};
            e["b_td"]   = {entry.b_td.real(), entry.b_td.imag()};
            e["defect"] = entry.defect;
        }
        entries.push_back(std::move(e));
    }
    return nlohmann::json{{"entries", std::move(entries)},
                          {"summary",
                           {{"max_defect", report.max_defect},
                            {"mean_defect", report.mean_defect},
                            {"evaluated", report.evaluated}}}};
}

} // namespace optoamp::io
