// Timing comparison of the serial reference kernels against their OpenMP
// counterparts. Run without arguments for full sizes, --quick for a smoke run.

#include "optoamp/scattering.hpp"
#include "optoamp/stability.hpp"
#include "optoamp/sweep.hpp"

#include <chrono>
#include <cstring>
#include <iostream>

using namespace optoamp;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::steady_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::steady_clock::now() - t0).count();
}

SystemParams resolved_point() {
    SystemParams p;
    p.delta1     = 1.0;
    p.delta2     = -1.0;
    p.coupling_j = 1.0;
    p.coupling_g = 0.2561;
    p.kappa1     = 0.1;
    p.kappa2     = 0.0;
    p.gamma      = 0.1;
    return p;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::cout << name << ": serial " << serial_ms << " ms, parallel " << parallel_ms
              << " ms, speedup " << serial_ms / parallel_ms << "\n";
}

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const SystemParams p = resolved_point();

    {
        const auto grid = linspace(-3.0, 3.0, quick ? 2001 : 200001);
        auto t0 = chrono::steady_clock::now();
        const auto serial = gain_spectrum_serial(p, grid);
        const double ts = ms_since(t0);
        t0 = chrono::steady_clock::now();
        const auto parallel = gain_spectrum(p, grid);
        const double tp = ms_since(t0);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (serial[k].gain != parallel[k].gain) {
                std::cerr << "gain_spectrum mismatch at index " << k << "\n";
                return 1;
            }
        }
        report("gain_spectrum", ts, tp);
    }

    {
        const auto gammas = linspace(0.05, 1.0, quick ? 11 : 101);
        const auto gs     = linspace(0.0, 3.0, quick ? 11 : 101);
        auto t0 = chrono::steady_clock::now();
        const auto serial = stability_map_serial(3.0, 0.1, gammas, gs);
        const double ts = ms_since(t0);
        t0 = chrono::steady_clock::now();
        const auto parallel = stability_map(3.0, 0.1, gammas, gs);
        const double tp = ms_since(t0);
        if (serial.cells != parallel.cells) {
            std::cerr << "stability_map mismatch\n";
            return 1;
        }
        report("stability_map", ts, tp);
    }

    {
        const AxisSpec x{"j", linspace(0.5, 3.0, quick ? 5 : 21)};
        const AxisSpec y{"kappa1", linspace(0.05, 0.5, quick ? 5 : 21)};
        auto t0 = chrono::steady_clock::now();
        const auto serial = sweep_plane_serial(p, x, y, SweepMetric::GbwNumeric);
        const double ts = ms_since(t0);
        t0 = chrono::steady_clock::now();
        const auto parallel = sweep_plane(p, x, y, SweepMetric::GbwNumeric);
        const double tp = ms_since(t0);
        for (std::size_t k = 0; k < serial.cells.size(); ++k) {
            const bool both_nan = std::isnan(serial.cells[k]) && std::isnan(parallel.cells[k]);
            if (!both_nan && serial.cells[k] != parallel.cells[k]) {
                std::cerr << "sweep_plane mismatch at index " << k << "\n";
                return 1;
            }
        }
        report("sweep_plane(gbw_numeric)", ts, tp);
    }

    return 0;
}
