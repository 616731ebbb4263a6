#pragma once

// Scenario realization: turn one sampled parameter row into concrete solver
// inputs. Pipeline: select structure-level DEM, add a seeded error grid,
// resample to the drawn resolution.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "swegsa/campaign/config.hpp"
#include "swegsa/grid.hpp"
#include "swegsa/rng.hpp"

namespace swegsa::campaign {

class MissingVariant : public std::runtime_error {
public:
    explicit MissingVariant(const std::string& what) : std::runtime_error(what) {}
};

class IncompatibleExtent : public std::runtime_error {
public:
    explicit IncompatibleExtent(const std::string& what) : std::runtime_error(what) {}
};

/// i.i.d. per-cell N(0, sigma) draws; deterministic per (grid, seed).
inline Raster generate_error_grid(const Grid& grid, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("generate_error_grid: sigma must be >= 0");
    Raster r(grid, 0.0);
    if (sigma == 0.0) return r;
    CounterRng rng(seed);
    const std::size_t cells = grid.cell_count();
    for (std::size_t c = 0; c < cells; ++c) r.values[c] = sigma * rng.normal(0, c);
    return r;
}

inline Raster apply_error(const Raster& dem, const Raster& error) {
    require_same_grid(dem.grid, error.grid, "apply_error");
    Raster out = dem;
    for (std::size_t c = 0; c < out.values.size(); ++c) out.values[c] += error.values[c];
    return out;
}

/// Pre-built DEM variants (S1..S4) are registered inputs, keyed by label.
using DemRegistry = std::map<std::string, Raster>;

inline const Raster& select_structure_level(const std::string& level, const DemRegistry& dems) {
    auto it = dems.find(level);
    if (it == dems.end())
        throw MissingVariant("no DEM registered for structure level '" + level + "'");
    return it->second;
}

/// Block area-weighted mean onto a coarser grid with the same extent. Edge
/// blocks use partial source-cell weights when resolutions do not divide.
inline Raster resample_dem(const Raster& src, double target_res) {
    const Grid& g = src.grid;
    if (!(target_res > 0.0)) throw IncompatibleExtent("target resolution must be positive");
    if (target_res < g.cellsize)
        throw IncompatibleExtent("target resolution is finer than the source");
    if (target_res == g.cellsize) return src;

    const double wx = g.width(), wy = g.height();
    const double ncols_f = wx / target_res, nrows_f = wy / target_res;
    const int ncols = static_cast<int>(std::llround(ncols_f));
    const int nrows = static_cast<int>(std::llround(nrows_f));
    const double tol = 1e-9;
    if (ncols < 1 || nrows < 1 || std::fabs(ncols_f - ncols) > tol * ncols_f ||
        std::fabs(nrows_f - nrows) > tol * nrows_f)
        throw IncompatibleExtent("target resolution does not divide the domain extent");

    Raster out(Grid(ncols, nrows, target_res, g.xll, g.yll), 0.0, src.nodata);
    const double rs = g.cellsize;
    // overlap of [a0,a1] with source cell k: both measured from the same
    // (north/west) corner so rows and columns use identical arithmetic
    auto accumulate_axis = [&](double a0, double a1, int src_count, auto&& fn) {
        int k0 = static_cast<int>(a0 / rs);
        int k1 = static_cast<int>(std::ceil(a1 / rs)) - 1;
        k0 = std::max(0, k0);
        k1 = std::min(src_count - 1, k1);
        for (int k = k0; k <= k1; ++k) {
            const double lo = std::max(a0, k * rs);
            const double hi = std::min(a1, (k + 1) * rs);
            if (hi > lo) fn(k, hi - lo);
        }
    };
    for (int row = 0; row < nrows; ++row) {
        const double y0 = row * target_res, y1 = (row + 1) * target_res;
        for (int col = 0; col < ncols; ++col) {
            const double x0 = col * target_res, x1 = (col + 1) * target_res;
            double wsum = 0.0, acc = 0.0;
            accumulate_axis(y0, y1, g.nrows, [&](int sr, double wr) {
                accumulate_axis(x0, x1, g.ncols, [&](int sc, double wc) {
                    const double v = src.at(sr, sc);
                    if (v == src.nodata) return;
                    const double w = wr * wc;
                    wsum += w;
                    acc += w * v;
                });
            });
            out.at(row, col) = wsum > 0.0 ? acc / wsum : out.nodata;
        }
    }
    return out;
}

struct Scenario {
    std::string run_id;
    std::vector<double> values;  // realized parameter row
    Raster dem;
    double resolution = 0.0;
    std::string structure_level;
    double manning_override = -1.0;  // <= 0 keeps the configured friction
    std::uint64_t checksum = 0;
};

namespace detail {

inline std::uint64_t error_grid_seed(std::uint64_t study_seed, double value) {
    Fnv1a h;
    h.add_u64(study_seed);
    h.add_string("error-grid");
    h.add_double(value);
    return h.h;
}

inline std::uint64_t scenario_checksum(const StudyConfig& cfg, const Scenario& s) {
    Fnv1a h;
    h.add_u64(cfg.seed);
    h.add_string(s.run_id);
    for (double v : s.values) h.add_double(v);
    h.add_double(s.resolution);
    h.add_string(s.structure_level);
    h.add_double(s.manning_override);
    h.add_double(cfg.scenario.t_end);
    h.add_u64(static_cast<std::uint64_t>(cfg.scenario.solver.order));
    h.add_u64(static_cast<std::uint64_t>(cfg.scenario.solver.flux));
    h.add_u64(s.dem.grid.cell_count());
    for (double v : s.dem.values) h.add_double(v);
    return h.h;
}

}  // namespace detail

/// Deterministic scenario pipeline for one design row:
/// select_structure_level -> apply_error(generate_error_grid) -> resample_dem.
inline Scenario realize_scenario(const StudyConfig& cfg, const DemRegistry& dems,
                                 const std::vector<double>& row, const std::string& run_id) {
    const ScenarioSpec& sc = cfg.scenario;
    Scenario out;
    out.run_id = run_id;
    out.values = row;

    // structure level
    if (!sc.structure_param.empty()) {
        const int idx = cfg.param_index(sc.structure_param);
        const auto& dist = cfg.parameters[idx].dist;
        const auto* cat = std::get_if<gsa::Categorical>(&dist);
        if (!cat)
            throw ConfigError("structure_param '" + sc.structure_param +
                              "' must be a categorical parameter");
        const int level = static_cast<int>(row[idx]);
        if (level < 0 || level >= static_cast<int>(cat->labels.size()))
            throw MissingVariant("structure level index out of range");
        out.structure_level = cat->labels[level];
    } else {
        out.structure_level = dems.count("S1") ? "S1" : dems.begin()->first;
    }
    Raster dem = select_structure_level(out.structure_level, dems);

    // topographic error
    if (!sc.error_param.empty() && sc.error_sigma > 0.0) {
        const int idx = cfg.param_index(sc.error_param);
        const std::uint64_t seed = detail::error_grid_seed(cfg.seed, row[idx]);
        dem = apply_error(dem, generate_error_grid(dem.grid, sc.error_sigma, seed));
    }

    // resolution
    out.resolution = dem.grid.cellsize;
    if (!sc.resolution_param.empty()) {
        const int idx = cfg.param_index(sc.resolution_param);
        out.resolution = row[idx];
        dem = resample_dem(dem, out.resolution);
    }
    out.dem = std::move(dem);

    if (!sc.manning_param.empty()) {
        const int idx = cfg.param_index(sc.manning_param);
        out.manning_override = row[idx];
    }
    out.checksum = detail::scenario_checksum(cfg, out);
    return out;
}

/// Load every DEM variant referenced by the configuration. All registered
/// variants must share one georeference.
template <typename Loader>
DemRegistry load_dem_registry(const StudyConfig& cfg, Loader&& load) {
    DemRegistry dems;
    for (const auto& [label, path] : cfg.scenario.dem_paths)
        dems.emplace(label, load(cfg.resolve_path(path)));
    if (dems.empty()) {
        if (cfg.scenario.default_dem.empty())
            throw ConfigError("key 'dem': no DEM registered in [scenario]");
        dems.emplace("S1", load(cfg.resolve_path(cfg.scenario.default_dem)));
    }
    const Grid& ref = dems.begin()->second.grid;
    for (const auto& [label, raster] : dems)
        if (!(raster.grid == ref))
            throw ConfigError("DEM variant '" + label + "' georeference differs from the others");
    return dems;
}

}  // namespace swegsa::campaign
