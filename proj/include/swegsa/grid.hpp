#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace swegsa {

/// Georeferenced regular grid of square cells. Row 0 is the northernmost
/// row (ESRI ASCII order); column 0 is the westernmost.
struct Grid {
    int ncols = 0;
    int nrows = 0;
    double cellsize = 0.0;
    double xll = 0.0;  // x of the lower-left corner
    double yll = 0.0;  // y of the lower-left corner

    Grid() = default;
    Grid(int nc, int nr, double cs, double x0 = 0.0, double y0 = 0.0)
        : ncols(nc), nrows(nr), cellsize(cs), xll(x0), yll(y0) {
        if (ncols < 1 || nrows < 1)
            throw std::invalid_argument("Grid: ncols and nrows must be >= 1");
        if (!(cellsize > 0.0))
            throw std::invalid_argument("Grid: cellsize must be positive");
    }

    bool operator==(const Grid&) const = default;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
    }
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * ncols + col;
    }

    // Cell-center coordinates.
    double x_of(int col) const { return xll + (col + 0.5) * cellsize; }
    double y_of(int row) const { return yll + (nrows - 1 - row + 0.5) * cellsize; }

    double width() const { return ncols * cellsize; }
    double height() const { return nrows * cellsize; }

    int col_of_x(double x) const { return static_cast<int>((x - xll) / cellsize); }
    int row_of_y(double y) const { return nrows - 1 - static_cast<int>((y - yll) / cellsize); }

    bool contains(double x, double y) const {
        return x >= xll && x <= xll + width() && y >= yll && y <= yll + height();
    }
};

class GridMismatch : public std::runtime_error {
public:
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Dense raster layer on a Grid. Cells holding the nodata sentinel are masked.
struct Raster {
    Grid grid;
    std::vector<double> values;
    double nodata = -9999.0;

    Raster() = default;
    explicit Raster(const Grid& g, double fill = 0.0, double nd = -9999.0)
        : grid(g), values(g.cell_count(), fill), nodata(nd) {}

    double& at(int row, int col) { return values[grid.index(row, col)]; }
    double at(int row, int col) const { return values[grid.index(row, col)]; }
    bool is_nodata(int row, int col) const { return at(row, col) == nodata; }
    void set_nodata(int row, int col) { at(row, col) = nodata; }

    std::size_t size() const { return values.size(); }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b))
        throw GridMismatch(std::string(what) + ": grids differ");
}

}  // namespace swegsa
