#pragma once

// Output-of-interest extraction from a finished simulation: point samples
// (bilinear on wse_max), area aggregates, and full wse_max maps on the
// study's common analysis grid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "swegsa/campaign/config.hpp"
#include "swegsa/campaign/scenario.hpp"
#include "swegsa/grid.hpp"
#include "swegsa/swe/types.hpp"

namespace swegsa::campaign {

class OutOfDomain : public std::runtime_error {
public:
    explicit OutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline double bilinear_wse(const swe::SimulationOutput& sim, double x, double y) {
    const Grid& g = sim.grid;
    // position in cell-center coordinates
    const double fx = (x - g.xll) / g.cellsize - 0.5;
    const double fy = (y - g.yll) / g.cellsize - 0.5;
    const double fr = (g.nrows - 1) - fy;  // row coordinate, 0 = north
    int c0 = static_cast<int>(std::floor(fx));
    int r0 = static_cast<int>(std::floor(fr));
    c0 = std::clamp(c0, 0, g.ncols - 2 >= 0 ? g.ncols - 2 : 0);
    r0 = std::clamp(r0, 0, g.nrows - 2 >= 0 ? g.nrows - 2 : 0);
    const int c1 = std::min(c0 + 1, g.ncols - 1);
    const int r1 = std::min(r0 + 1, g.nrows - 1);
    const double tx = std::clamp(fx - c0, 0.0, 1.0);
    const double ty = std::clamp(fr - r0, 0.0, 1.0);
    const double v00 = sim.wse_max[g.index(r0, c0)];
    const double v01 = sim.wse_max[g.index(r0, c1)];
    const double v10 = sim.wse_max[g.index(r1, c0)];
    const double v11 = sim.wse_max[g.index(r1, c1)];
    return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11);
}

}  // namespace detail

/// Scalar probes (Point, AreaMean, AreaMax) over wse_max.
inline double extract_output(const swe::SimulationOutput& sim, const Probe& probe) {
    const Grid& g = sim.grid;
    switch (probe.kind) {
        case Probe::Kind::Point:
            if (!g.contains(probe.x0, probe.y0))
                throw OutOfDomain("point probe outside the domain");
            return detail::bilinear_wse(sim, probe.x0, probe.y0);
        case Probe::Kind::AreaMean:
        case Probe::Kind::AreaMax: {
            double acc = probe.kind == Probe::Kind::AreaMax
                             ? -std::numeric_limits<double>::infinity()
                             : 0.0;
            long count = 0;
            for (int row = 0; row < g.nrows; ++row) {
                const double y = g.y_of(row);
                if (y < probe.y0 || y > probe.y1) continue;
                for (int col = 0; col < g.ncols; ++col) {
                    const double x = g.x_of(col);
                    if (x < probe.x0 || x > probe.x1) continue;
                    const double v = sim.wse_max[g.index(row, col)];
                    if (probe.kind == Probe::Kind::AreaMax) acc = std::max(acc, v);
                    else acc += v;
                    ++count;
                }
            }
            if (count == 0) throw OutOfDomain("area probe covers no cell centres");
            return probe.kind == Probe::Kind::AreaMax ? acc : acc / count;
        }
        case Probe::Kind::FullMap:
            throw std::invalid_argument("extract_output: FullMap probes yield a raster");
    }
    throw std::invalid_argument("extract_output: unknown probe kind");
}

/// wse_max raster with never-wet cells masked NODATA, aggregated onto the
/// common analysis grid by block max so runs at different Var R resolutions
/// stay comparable. analysis_res <= run resolution keeps the native grid.
inline Raster extract_full_map(const swe::SimulationOutput& sim, double h_dry,
                               double analysis_res) {
    const Grid& g = sim.grid;
    Raster native(g, 0.0);
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        native.values[c] = sim.hmax[c] > h_dry ? sim.wse_max[c] : native.nodata;
    if (!(analysis_res > g.cellsize)) return native;

    const double wx = g.width(), wy = g.height();
    const int ncols = static_cast<int>(std::llround(wx / analysis_res));
    const int nrows = static_cast<int>(std::llround(wy / analysis_res));
    if (ncols < 1 || nrows < 1 || std::fabs(wx / analysis_res - ncols) > 1e-9 * ncols ||
        std::fabs(wy / analysis_res - nrows) > 1e-9 * nrows)
        throw IncompatibleExtent("analysis resolution does not divide the domain extent");

    Raster out(Grid(ncols, nrows, analysis_res, g.xll, g.yll), 0.0, native.nodata);
    for (int row = 0; row < nrows; ++row) {
        const int r0 = static_cast<int>(row * analysis_res / g.cellsize);
        const int r1 = std::min(g.nrows, static_cast<int>(std::ceil((row + 1) * analysis_res / g.cellsize)));
        for (int col = 0; col < ncols; ++col) {
            const int c0 = static_cast<int>(col * analysis_res / g.cellsize);
            const int c1 = std::min(g.ncols, static_cast<int>(std::ceil((col + 1) * analysis_res / g.cellsize)));
            double best = out.nodata;
            bool any = false;
            for (int r = r0; r < r1; ++r) {
                for (int c = c0; c < c1; ++c) {
                    const double v = native.at(r, c);
                    if (v == native.nodata) continue;
                    best = any ? std::max(best, v) : v;
                    any = true;
                }
            }
            out.at(row, col) = any ? best : out.nodata;
        }
    }
    return out;
}

}  // namespace swegsa::campaign
