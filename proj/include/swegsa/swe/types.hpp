#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swegsa/grid.hpp"

namespace swegsa::swe {

enum class FluxScheme { Hll, Rusanov };
enum class FrictionLaw { None, Manning, Strickler, Chezy };
enum class BoundaryKind { Wall, FreeOutflow, ImposedDischarge, ImposedDepth };

// Side order matches the row-0-is-north raster convention.
enum class Side : int { North = 0, East = 1, South = 2, West = 3 };

struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::Wall;
    double value = 0.0;  // unit discharge q [m^2/s] or imposed depth [m]
};

struct SolverConfig {
    FluxScheme flux = FluxScheme::Hll;
    int order = 2;            // 1 or 2 (MUSCL + Heun)
    double cfl = 0.0;         // <= 0 selects the default: 0.8 (order 1), 0.5 (order 2)
    double g = 9.81;
    double h_dry = 1e-10;
    double dt_max = 1.0;
    long long step_cap = 100000000;
    std::array<BoundarySpec, 4> boundary{};
    double mass_interval = 0.0;  // seconds between mass samples; 0 selects t_end/200

    double effective_cfl() const { return cfl > 0.0 ? cfl : (order >= 2 ? 0.5 : 0.8); }

    void validate() const {
        if (order != 1 && order != 2) throw std::invalid_argument("SolverConfig: order must be 1 or 2");
        if (cfl > 1.0) throw std::invalid_argument("SolverConfig: cfl must be in (0,1]");
        if (!(g > 0.0)) throw std::invalid_argument("SolverConfig: g must be positive");
        if (!(h_dry > 0.0)) throw std::invalid_argument("SolverConfig: h_dry must be positive");
    }
};

struct FrictionModel {
    FrictionLaw law = FrictionLaw::None;
    double coefficient = 0.0;        // uniform Manning n, Strickler K or Chezy C
    std::vector<double> per_cell;    // optional per-cell coefficient, row-major

    double coeff_at(std::size_t cell) const {
        return per_cell.empty() ? coefficient : per_cell[cell];
    }
    void validate(std::size_t cells) const {
        if (law == FrictionLaw::None) return;
        if (per_cell.empty()) {
            if (!(coefficient > 0.0))
                throw std::invalid_argument("FrictionModel: coefficient must be positive");
        } else if (per_cell.size() != cells) {
            throw std::invalid_argument("FrictionModel: per-cell coefficient size mismatch");
        }
    }
};

struct Topography {
    Grid grid;
    std::vector<double> z;

    Topography() = default;
    explicit Topography(const Raster& r) : grid(r.grid), z(r.values) {}
    Topography(const Grid& g, std::vector<double> zv) : grid(g), z(std::move(zv)) {}
};

struct FlowState {
    Grid grid;
    std::vector<double> h, u, v;
    double t = 0.0;

    FlowState() = default;
    explicit FlowState(const Grid& g)
        : grid(g), h(g.cell_count(), 0.0), u(g.cell_count(), 0.0), v(g.cell_count(), 0.0) {}
};

struct MassSample {
    double t;
    double volume;
};

struct SimulationOutput {
    Grid grid;
    std::vector<double> hmax;     // per-cell max depth over the run
    std::vector<double> wse_max;  // per-cell max of h+z (== z + hmax)
    FlowState final_state;
    std::vector<MassSample> mass_series;
    long long dt_count = 0;
};

/// Piecewise-linear discharge hydrograph; constant beyond the endpoints.
struct Hydrograph {
    std::vector<std::pair<double, double>> points;  // (t, q), t strictly increasing

    double at(double t) const {
        if (points.empty()) return 0.0;
        if (t <= points.front().first) return points.front().second;
        if (t >= points.back().first) return points.back().second;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (t <= points[i].first) {
                const auto& [t0, q0] = points[i - 1];
                const auto& [t1, q1] = points[i];
                return q0 + (q1 - q0) * (t - t0) / (t1 - t0);
            }
        }
        return points.back().second;
    }
};

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(int row, int col, double t)
        : std::runtime_error("non-finite value at cell (row " + std::to_string(row) +
                             ", col " + std::to_string(col) + ") at t=" + std::to_string(t)),
          row(row), col(col), t(t) {}
    int row, col;
    double t;
};

class TimeoutError : public std::runtime_error {
public:
    explicit TimeoutError(long long steps)
        : std::runtime_error("step cap of " + std::to_string(steps) +
                             " exceeded (CFL collapse?)") {}
};

}  // namespace swegsa::swe
