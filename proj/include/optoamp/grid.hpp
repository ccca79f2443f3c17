#pragma once

// 2-D parameter-plane result grid shared by the stability map and the sweep
// module. Cells are stored row-major, one row per y value; flagged cells
// carry a reason code and a NaN value.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace optoamp {

enum class CellFlag : std::uint8_t {
    Ok = 0,
    Unstable,     // cell parameters are dynamically unstable
    Singular,     // near-singular solve at this cell
    NoPeak,       // peak search failed for a peak-based metric
    Invalid,      // cell parameters violate an invariant
};

const char* cell_flag_name(CellFlag flag);

struct SweepGrid {
    std::string x_name;
    std::string y_name;
    std::vector<double> x_axis;
    std::vector<double> y_axis;
    std::vector<double> cells;    // size y_axis.size() * x_axis.size()
    std::vector<CellFlag> flags;  // same layout as cells
    std::string metric_name;

    std::size_t index(std::size_t iy, std::size_t ix) const { return iy * x_axis.size() + ix; }
    double at(std::size_t iy, std::size_t ix) const { return cells[index(iy, ix)]; }
    CellFlag flag_at(std::size_t iy, std::size_t ix) const { return flags[index(iy, ix)]; }
};

// Uniformly spaced closed interval, n >= 1 points (n == 1 yields {lo}).
std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace optoamp
