#include "optoamp/cli.hpp"

#include "optoamp/errors.hpp"
#include "optoamp/io.hpp"
#include "optoamp/metrics.hpp"
#include "optoamp/oracle.hpp"
#include "optoamp/scattering.hpp"
#include "optoamp/stability.hpp"
#include "optoamp/sweep.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace optoamp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kVerifyThreshold = 1e-4;

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (key == k) known = true;
        }
        if (!known) {
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
        }
    }
}

double get_number(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key)) {
        throw ConfigError(std::string("missing key '") + key + "' in " + where);
    }
    if (!obj.at(key).is_number()) {
        throw ConfigError(std::string("key '") + key + "' in " + where + " must be a number");
    }
    return obj.at(key).get<double>();
}

std::size_t get_count(const json& obj, const char* where, const char* key) {
    const double v = get_number(obj, where, key);
    if (v < 1.0 || v != std::floor(v)) {
        throw ConfigError(std::string("key '") + key + "' in " + where +
                          " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

GridSpec1D get_grid(const json& obj, const char* where, const char* lo, const char* hi,
                    const char* points) {
    GridSpec1D g;
    g.lo     = get_number(obj, where, lo);
    g.hi     = get_number(obj, where, hi);
    g.points = get_count(obj, where, points);
    if (g.points > 1 && !(g.lo < g.hi)) {
        throw ConfigError(std::string(where) + ": grid bounds must satisfy lo < hi");
    }
    return g;
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }

    require_keys(j, "config",
                 {"schema_version", "params", "delta", "n_eff", "spectrum", "fit", "stability",
                  "sweep", "tune", "verify"});
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != kSchemaVersion) {
        throw ConfigError("config must carry schema_version = 1");
    }
    if (!j.contains("params")) {
        throw ConfigError("config must carry a params object");
    }

    RunConfig cfg;
    try {
        cfg.params = validate_params(io::params_from_json(j.at("params")));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid params: ") + e.what());
    }

    if (j.contains("delta")) {
        if (!j.at("delta").is_number()) throw ConfigError("delta must be a number");
        cfg.delta = j.at("delta").get<double>();
        if (!(cfg.delta > 0.0)) throw ConfigError("delta must be > 0");
    }
    if (j.contains("n_eff")) {
        if (!j.at("n_eff").is_number()) throw ConfigError("n_eff must be a number");
        cfg.n_eff = j.at("n_eff").get<double>();
        if (cfg.n_eff < 0.0) throw ConfigError("n_eff must be >= 0");
    }

    if (j.contains("spectrum")) {
        const auto& b = j.at("spectrum");
        require_keys(b, "spectrum", {"omega_min", "omega_max", "points"});
        cfg.spectrum = SpectrumConfig{get_grid(b, "spectrum", "omega_min", "omega_max", "points")};
    }
    if (j.contains("fit")) {
        const auto& b = j.at("fit");
        require_keys(b, "fit", {"bracket_lo", "bracket_hi"});
        FitConfig f;
        if (b.contains("bracket_lo")) f.bracket_lo = get_number(b, "fit", "bracket_lo");
        if (b.contains("bracket_hi")) f.bracket_hi = get_number(b, "fit", "bracket_hi");
        if (f.bracket_lo.has_value() != f.bracket_hi.has_value()) {
            throw ConfigError("fit: bracket_lo and bracket_hi must be given together");
        }
        if (f.bracket_lo && !(*f.bracket_lo < *f.bracket_hi)) {
            throw ConfigError("fit: bracket_lo must be < bracket_hi");
        }
        cfg.fit = f;
    }
    if (j.contains("stability")) {
        const auto& b = j.at("stability");
        require_keys(b, "stability",
                     {"gamma_min", "gamma_max", "gamma_points", "g_min", "g_max", "g_points"});
        StabilityConfig s;
        s.gamma = get_grid(b, "stability", "gamma_min", "gamma_max", "gamma_points");
        s.g     = get_grid(b, "stability", "g_min", "g_max", "g_points");
        if (!(s.gamma.lo > 0.0)) {
            throw ConfigError("stability: gamma grid must be positive");
        }
        if (s.g.lo < 0.0) {
            throw ConfigError("stability: g grid must be nonnegative");
        }
        cfg.stability = s;
    }
    if (j.contains("sweep")) {
        const auto& b = j.at("sweep");
        require_keys(b, "sweep",
                     {"x_param", "x_min", "x_max", "x_points", "y_param", "y_min", "y_max",
                      "y_points", "metric", "contour_levels"});
        SweepConfig s;
        if (!b.contains("x_param") || !b.at("x_param").is_string() || !b.contains("y_param") ||
            !b.at("y_param").is_string() || !b.contains("metric") || !b.at("metric").is_string()) {
            throw ConfigError("sweep: x_param, y_param and metric must be strings");
        }
        s.x_param = b.at("x_param").get<std::string>();
        s.y_param = b.at("y_param").get<std::string>();
        s.metric  = b.at("metric").get<std::string>();
        try {
            parse_metric(s.metric);
        } catch (const UnknownMetric& e) {
            throw ConfigError(e.what());
        }
        s.x = get_grid(b, "sweep", "x_min", "x_max", "x_points");
        s.y = get_grid(b, "sweep", "y_min", "y_max", "y_points");
        if (b.contains("contour_levels")) {
            if (!b.at("contour_levels").is_array()) {
                throw ConfigError("sweep: contour_levels must be an array of numbers");
            }
            for (const auto& v : b.at("contour_levels")) {
                if (!v.is_number()) {
                    throw ConfigError("sweep: contour_levels must be an array of numbers");
                }
                s.contour_levels.push_back(v.get<double>());
            }
        }
        cfg.sweep = s;
    }
    if (j.contains("tune")) {
        const auto& b = j.at("tune");
        require_keys(b, "tune", {"j_min", "j_max", "points"});
        TuneConfig t;
        t.j = get_grid(b, "tune", "j_min", "j_max", "points");
        if (t.j.lo < 0.0) {
            throw ConfigError("tune: j grid must be nonnegative");
        }
        cfg.tune = t;
    }
    if (j.contains("verify")) {
        const auto& b = j.at("verify");
        require_keys(b, "verify", {"omegas", "amplitude", "settle", "measure", "dt"});
        VerifyConfig v;
        if (!b.contains("omegas") || !b.at("omegas").is_array() || b.at("omegas").empty()) {
            throw ConfigError("verify: omegas must be a nonempty array of numbers");
        }
        for (const auto& w : b.at("omegas")) {
            if (!w.is_number()) {
                throw ConfigError("verify: omegas must be a nonempty array of numbers");
            }
            v.omegas.push_back(w.get<double>());
        }
        if (b.contains("amplitude")) v.amplitude = get_number(b, "verify", "amplitude");
        if (b.contains("settle")) v.settle = get_number(b, "verify", "settle");
        if (b.contains("measure")) v.measure = get_number(b, "verify", "measure");
        if (b.contains("dt")) v.dt = get_number(b, "verify", "dt");
        if (!(v.amplitude > 0.0) || !(v.measure > 0.0) || !(v.dt > 0.0) || v.settle < 0.0) {
            throw ConfigError("verify: amplitude/measure/dt must be > 0, settle >= 0");
        }
        cfg.verify = v;
    }
    return cfg;
}

namespace {

std::vector<double> expand(const GridSpec1D& g) { return linspace(g.lo, g.hi, g.points); }

// Creates the output directory and truncates the target files up front so a
// non-writable path fails before any computation starts.
void prepare_outputs(const std::string& out_dir, const std::vector<std::string>& names) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    for (const auto& name : names) {
        std::ofstream probe(fs::path(out_dir) / name, std::ios::binary | std::ios::trunc);
        if (!probe) {
            throw ConfigError("output path not writable: " + (fs::path(out_dir) / name).string());
        }
    }
}

std::string out_path(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

int cmd_spectrum(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    if (!cfg.spectrum) {
        throw ConfigError("spectrum command requires a 'spectrum' config block");
    }
    prepare_outputs(out_dir, {"spectrum.csv"});
    const auto grid   = expand(cfg.spectrum->omega);
    const auto points = gain_spectrum(cfg.params, grid, jobs);
    io::write_spectrum_csv(out_path(out_dir, "spectrum.csv"), points);

    const SpectrumPoint* best = nullptr;
    for (const auto& pt : points) {
        if (!pt.flagged && (best == nullptr || pt.gain > best->gain)) best = &pt;
    }
    if (best != nullptr) {
        std::cout << "peak omega=" << io::format_double(best->omega)
                  << " gain=" << io::format_double(best->gain) << "\n";
    } else {
        std::cout << "peak omega=nan gain=nan\n";
    }
    return 0;
}

int cmd_ratios(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    if (!cfg.spectrum) {
        throw ConfigError("ratios command requires a 'spectrum' config block");
    }
    prepare_outputs(out_dir, {"ratios.csv"});
    const auto grid = expand(cfg.spectrum->omega);
    std::vector<io::RatioRow> rows(grid.size());
    bool singular = false;
#pragma omp parallel for schedule(static) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(grid.size()); ++k) {
        try {
            const auto c      = coefficients(cfg.params, grid[k]);
            const double absa = std::abs(c.a);
            rows[k] = {grid[k], std::abs(c.b) / absa, std::abs(c.c) / absa, std::abs(c.d) / absa,
                       std::abs(c.e) / absa, std::abs(c.f) / absa};
        } catch (const std::exception&) {
            singular = true;
        }
    }
    if (singular) {
        throw NearSingular("ratios: grid contains a near-singular frequency");
    }
    io::write_ratios_csv(out_path(out_dir, "ratios.csv"), rows);
    return 0;
}

int cmd_stability(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    if (!cfg.stability) {
        throw ConfigError("stability command requires a 'stability' config block");
    }
    prepare_outputs(out_dir, {"stability_map.csv", "boundary_curves.csv"});
    const auto gammas = expand(cfg.stability->gamma);
    const auto gs     = expand(cfg.stability->g);
    const auto grid = stability_map(cfg.params.coupling_j, cfg.params.kappa1, gammas, gs, jobs);
    io::write_verdict_map_csv(out_path(out_dir, "stability_map.csv"), grid);

    std::vector<std::pair<double, BoundaryPoint>> curves;
    curves.reserve(2 * gammas.size());
    for (double gamma : gammas) {
        curves.emplace_back(gamma, boundary_g1(cfg.params.coupling_j, cfg.params.kappa1, gamma));
    }
    for (double gamma : gammas) {
        curves.emplace_back(gamma, boundary_g2(cfg.params.coupling_j, cfg.params.kappa1, gamma));
    }
    io::write_boundary_csv(out_path(out_dir, "boundary_curves.csv"), curves);
    return 0;
}

int cmd_fit(const RunConfig& cfg, const std::string& out_dir, int) {
    prepare_outputs(out_dir, {"fit.json"});
    const SystemParams& p = cfg.params;

    double lo, hi;
    if (cfg.fit && cfg.fit->bracket_lo) {
        lo = *cfg.fit->bracket_lo;
        hi = *cfg.fit->bracket_hi;
    } else {
        const double center = center_frequency(p.coupling_j, p.kappa1, p.gamma);
        lo = center - 0.15;
        hi = center + 0.15;
    }
    const PeakMetrics peak = find_peak(p, lo, hi);

    json out;
    out["numeric"] = {{"gbw", peak.gbw_numeric},
                      {"fwhm", peak.fwhm},
                      {"omega_peak", peak.omega_peak}};
    if (p.kappa2 == 0.0) {
        const double g1 = boundary_g1(p.coupling_j, p.kappa1, p.gamma).g_crit;
        const double delta_eff = g1 - p.coupling_g;
        if (!(delta_eff > 0.0)) {
            throw NotStable("fit: G must lie below the first instability boundary");
        }
        const LorentzianFit fit =
            lorentzian_params(p.coupling_j, p.kappa1, p.gamma, delta_eff);
        const double kappa_abs = std::abs(fit.kappa_gbw);
        const double bandwidth = 2.0 * fit.a_shift.imag();
        const double offset    = -fit.a_shift.real();
        out["delta"]    = delta_eff;
        out["analytic"] = {{"kappa_abs", kappa_abs},
                           {"bandwidth", bandwidth},
                           {"peak_offset", offset}};
        out["rel_diff"] = {
            {"gbw", std::abs(kappa_abs - peak.gbw_numeric) / kappa_abs},
            {"bandwidth", std::abs(bandwidth - peak.fwhm) / std::abs(bandwidth)},
            {"peak_offset",
             std::abs(offset - (peak.omega_peak + fit.sigma)) / std::max(std::abs(offset), 1e-300)}};
    }
    out["noise"] = {{"n_eff", cfg.n_eff},
                    {"added_photons_at_peak", added_noise(p, peak.omega_peak, cfg.n_eff)}};

    std::ofstream f(out_path(out_dir, "fit.json"), std::ios::binary);
    f << out.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    if (!cfg.sweep) {
        throw ConfigError("sweep command requires a 'sweep' config block");
    }
    std::vector<std::string> names{"sweep_grid.csv", "sweep_grid.json"};
    for (std::size_t k = 0; k < cfg.sweep->contour_levels.size(); ++k) {
        names.push_back("contour_" + std::to_string(k) + ".csv");
    }
    prepare_outputs(out_dir, names);

    AxisSpec x{cfg.sweep->x_param, expand(cfg.sweep->x)};
    AxisSpec y{cfg.sweep->y_param, expand(cfg.sweep->y)};
    const SweepGrid grid =
        sweep_plane(cfg.params, x, y, parse_metric(cfg.sweep->metric), cfg.delta, jobs);
    io::write_sweep_csv(out_path(out_dir, "sweep_grid.csv"), grid);
    io::write_sweep_json(out_path(out_dir, "sweep_grid.json"), grid);
    for (std::size_t k = 0; k < cfg.sweep->contour_levels.size(); ++k) {
        const auto lines = extract_contour(grid, cfg.sweep->contour_levels[k]);
        io::write_contours_csv(out_path(out_dir, "contour_" + std::to_string(k) + ".csv"), lines);
    }
    return 0;
}

int cmd_tune(const RunConfig& cfg, const std::string& out_dir, int) {
    if (!cfg.tune) {
        throw ConfigError("tune command requires a 'tune' config block");
    }
    prepare_outputs(out_dir, {"tune.csv"});
    const auto grid = expand(cfg.tune->j);
    const auto rows = tune_curve(cfg.params.kappa1, cfg.params.gamma, grid);
    io::write_tune_csv(out_path(out_dir, "tune.csv"), rows);
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& out_dir, int) {
    if (!cfg.verify) {
        throw ConfigError("verify command requires a 'verify' config block");
    }
    prepare_outputs(out_dir, {"verify.json"});
    ProbeSettings settings;
    settings.amplitude = cfg.verify->amplitude;
    settings.settle    = cfg.verify->settle;
    settings.measure   = cfg.verify->measure;
    settings.dt        = cfg.verify->dt;
    const DefectReport report = compare_scattering(cfg.params, cfg.verify->omegas, settings);

    json out            = io::defect_report_to_json(report);
    out["threshold"]    = kVerifyThreshold;
    const bool passed   = report.evaluated > 0 && report.max_defect < kVerifyThreshold;
    out["passed"]       = passed;
    std::ofstream f(out_path(out_dir, "verify.json"), std::ios::binary);
    f << out.dump(2) << '\n';

    if (report.evaluated == 0) {
        throw NearSingular("verify: all probe frequencies were near-singular");
    }
    return passed ? 0 : 1;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"two-cavity optomechanical amplifier analyzer"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int jobs            = 0;

    const char* const names[] = {"spectrum", "ratios", "stability", "fit",
                                 "sweep", "tune", "verify"};
    const char* const descriptions[] = {
        "power gain over a frequency grid (CSV)",
        "|B..F|/|A| coefficient ratios over a frequency grid (CSV)",
        "stability verdict map and analytic boundary curves (CSV)",
        "Lorentzian fit vs numeric peak metrics (JSON)",
        "2-D parameter-plane sweep with optional contours (CSV/JSON)",
        "center frequency as a function of J (CSV)",
        "time-domain vs frequency-domain scattering check (JSON)"};
    for (int k = 0; k < 7; ++k) {
        auto* sub = app.add_subcommand(names[k], descriptions[k]);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory (default: .)");
        sub->add_option("--jobs", jobs, "worker threads (default: logical cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    if (jobs > 0) {
        omp_set_num_threads(jobs);
    }
    try {
        const RunConfig cfg = load_config(config_path);
        if (command == "spectrum") return cmd_spectrum(cfg, out_dir, jobs);
        if (command == "ratios") return cmd_ratios(cfg, out_dir, jobs);
        if (command == "stability") return cmd_stability(cfg, out_dir, jobs);
        if (command == "fit") return cmd_fit(cfg, out_dir, jobs);
        if (command == "sweep") return cmd_sweep(cfg, out_dir, jobs);
        if (command == "tune") return cmd_tune(cfg, out_dir, jobs);
        if (command == "verify") return cmd_verify(cfg, out_dir, jobs);
        std::cerr << "error: unknown command " << command << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace optoamp::cli
