#pragma once

// Shared test fixtures: a synthetic valley DEM pair (raw terrain S1 and a
// variant with building blocks S2), bumpy lake-at-rest states, and a
// self-cleaning temporary directory.

#include <unistd.h>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swegsa/grid.hpp"
#include "swegsa/rng.hpp"
#include "swegsa/swe/types.hpp"

namespace fixtures {

using swegsa::Grid;
using swegsa::Raster;

/// Sloping valley with a parabolic cross-section: flow axis north -> south.
inline Raster valley_dem(int ncols = 100, int nrows = 150, double cellsize = 1.0) {
    Raster dem(Grid(ncols, nrows, cellsize, 0.0, 0.0));
    for (int row = 0; row < nrows; ++row) {
        const double y = dem.grid.y_of(row);
        for (int col = 0; col < ncols; ++col) {
            const double x = dem.grid.x_of(col);
            const double cross = 0.002 * (x - 50.0) * (x - 50.0);
            dem.at(row, col) = 0.02 * y + cross;
        }
    }
    return dem;
}

struct Rect {
    double x0, y0, x1, y1;
};

inline const std::array<Rect, 4>& building_footprints() {
    static const std::array<Rect, 4> rects = {Rect{24, 58, 34, 70}, Rect{66, 58, 76, 70},
                                              Rect{24, 88, 34, 100}, Rect{66, 88, 76, 100}};
    return rects;
}

/// S2 variant: S1 plus 3 m building blocks on the floodplain.
inline Raster valley_dem_s2(const Raster& s1) {
    Raster dem = s1;
    for (int row = 0; row < dem.grid.nrows; ++row) {
        const double y = dem.grid.y_of(row);
        for (int col = 0; col < dem.grid.ncols; ++col) {
            const double x = dem.grid.x_of(col);
            for (const auto& r : building_footprints())
                if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1) dem.at(row, col) += 3.0;
        }
    }
    return dem;
}

/// Random bumpy bed with z quantized to multiples of 2^-20 in [0, zmax], so
/// that depth = level - z is exact in double arithmetic.
inline swegsa::swe::Topography bumpy_bed(const Grid& grid, double zmax, std::uint64_t seed) {
    swegsa::swe::Topography topo(grid, std::vector<double>(grid.cell_count(), 0.0));
    swegsa::CounterRng rng(seed);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double u = rng.uniform01(7, c);
        const double quantized = std::floor(u * zmax * 1048576.0) / 1048576.0;
        topo.z[c] = quantized;
    }
    return topo;
}

/// Lake at rest over the given bed: h = level - z (exact for quantized z).
inline swegsa::swe::FlowState lake_at_rest(const swegsa::swe::Topography& topo, double level) {
    swegsa::swe::FlowState state(topo.grid);
    for (std::size_t c = 0; c < topo.z.size(); ++c)
        state.h[c] = std::max(0.0, level - topo.z[c]);
    return state;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        namespace fs = std::filesystem;
        static std::atomic<int> counter{0};
        path_ = (fs::temp_directory_path() /
                 ("swegsa_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1))))
                    .string();
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::string& path() const { return path_; }
    std::string sub(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

}  // namespace fixtures
