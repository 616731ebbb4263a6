#pragma once

// Per-cell Sobol index maps from stacks of output rasters (one raster per
// model run). Cells that are NODATA in any run, or whose output variance is
// below the floor, are masked NODATA in every index raster.

#include <vector>

#include "swegsa/grid.hpp"
#include "swegsa/gsa/estimators.hpp"

namespace swegsa::gsa {

struct SobolMap {
    Grid grid;
    std::vector<Raster> s1;  // one raster per parameter, clamped first-order indices
    std::vector<Raster> st;  // total-order
    Raster mask;             // 1 where estimates exist, NODATA elsewhere
};

struct RasterStacks {
    std::vector<Raster> ya;                     // n rasters
    std::vector<Raster> yb;                     // n rasters
    std::vector<std::vector<Raster>> yab;       // p stacks of n rasters
};

inline SobolMap sobol_map(const RasterStacks& stacks) {
    if (stacks.ya.empty() || stacks.ya.size() != stacks.yb.size())
        throw std::invalid_argument("sobol_map: need matching non-empty A/B stacks");
    const Grid grid = stacks.ya.front().grid;
    const int n = static_cast<int>(stacks.ya.size());
    const int p = static_cast<int>(stacks.yab.size());
    auto check = [&](const Raster& r) { require_same_grid(r.grid, grid, "sobol_map"); };
    for (const auto& r : stacks.ya) check(r);
    for (const auto& r : stacks.yb) check(r);
    for (const auto& stack : stacks.yab) {
        if (static_cast<int>(stack.size()) != n)
            throw std::invalid_argument("sobol_map: A_B stack size differs from n");
        for (const auto& r : stack) check(r);
    }

    SobolMap map;
    map.grid = grid;
    map.mask = Raster(grid, 0.0);
    for (int i = 0; i < p; ++i) {
        map.s1.emplace_back(grid, 0.0);
        map.st.emplace_back(grid, 0.0);
    }

    PickFreezeOutputs out;
    out.ya.resize(n);
    out.yb.resize(n);
    out.yab.assign(p, std::vector<double>(n));
    const std::size_t cells = grid.cell_count();
    for (std::size_t c = 0; c < cells; ++c) {
        bool masked = false;
        for (int j = 0; j < n && !masked; ++j) {
            const double a = stacks.ya[j].values[c];
            const double b = stacks.yb[j].values[c];
            if (a == stacks.ya[j].nodata || b == stacks.yb[j].nodata) masked = true;
            out.ya[j] = a;
            out.yb[j] = b;
            for (int i = 0; i < p && !masked; ++i) {
                const double ab = stacks.yab[i][j].values[c];
                if (ab == stacks.yab[i][j].nodata) masked = true;
                out.yab[i][j] = ab;
            }
        }
        if (!masked) {
            std::vector<double> s1, st;
            double var = 0, mean = 0;
            bool degenerate = false;
            detail::point_estimates(out, nullptr, s1, st, var, mean, degenerate);
            if (degenerate) masked = true;
            else {
                for (int i = 0; i < p; ++i) {
                    map.s1[i].values[c] = clamp_index(s1[i]);
                    map.st[i].values[c] = clamp_index(st[i]);
                }
                map.mask.values[c] = 1.0;
            }
        }
        if (masked) {
            for (int i = 0; i < p; ++i) {
                map.s1[i].values[c] = map.s1[i].nodata;
                map.st[i].values[c] = map.st[i].nodata;
            }
            map.mask.values[c] = map.mask.nodata;
        }
    }
    return map;
}

}  // namespace swegsa::gsa
