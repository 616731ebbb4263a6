#include <catch2/catch_amalgamated.hpp>

#include "support/fixtures.hpp"
#include "swegsa/campaign/probe.hpp"

using namespace swegsa;
using namespace swegsa::campaign;

namespace {

swe::SimulationOutput fake_output(const Grid& grid, double base) {
    swe::SimulationOutput out;
    out.grid = grid;
    out.hmax.resize(grid.cell_count());
    out.wse_max.resize(grid.cell_count());
    for (int row = 0; row < grid.nrows; ++row) {
        for (int col = 0; col < grid.ncols; ++col) {
            const std::size_t c = grid.index(row, col);
            out.hmax[c] = 1.0;
            out.wse_max[c] = base + 0.1 * col + 0.01 * row;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("point probe at a cell centre returns that cell exactly") {
    const Grid grid(10, 8, 2.0);
    const auto sim = fake_output(grid, 5.0);
    Probe p;
    p.kind = Probe::Kind::Point;
    p.x0 = grid.x_of(4);
    p.y0 = grid.y_of(3);
    CHECK(extract_output(sim, p) == sim.wse_max[grid.index(3, 4)]);
}

TEST_CASE("area max dominates area mean; uniform field returns the constant") {
    const Grid grid(12, 12, 1.0);
    auto sim = fake_output(grid, 2.0);
    Probe mean{Probe::Kind::AreaMean, 2.0, 2.0, 9.0, 9.0};
    Probe amax{Probe::Kind::AreaMax, 2.0, 2.0, 9.0, 9.0};
    CHECK(extract_output(sim, amax) >= extract_output(sim, mean));

    for (auto& v : sim.wse_max) v = 3.5;
    Probe pt{Probe::Kind::Point, 6.0, 6.0, 0, 0};
    CHECK(extract_output(sim, pt) == 3.5);
    CHECK(extract_output(sim, mean) == 3.5);
    CHECK(extract_output(sim, amax) == 3.5);
}

TEST_CASE("probes outside the domain are rejected") {
    const Grid grid(10, 10, 1.0);
    const auto sim = fake_output(grid, 0.0);
    Probe p{Probe::Kind::Point, 55.0, 5.0, 0, 0};
    CHECK_THROWS_AS(extract_output(sim, p), OutOfDomain);
    Probe area{Probe::Kind::AreaMean, 40.0, 40.0, 41.0, 41.0};
    CHECK_THROWS_AS(extract_output(sim, area), OutOfDomain);
}

TEST_CASE("full map masks never-wet cells and aggregates by block max") {
    const Grid grid(10, 10, 1.0);
    swe::SimulationOutput sim;
    sim.grid = grid;
    sim.hmax.assign(grid.cell_count(), 0.0);
    sim.wse_max.assign(grid.cell_count(), 0.0);
    for (int row = 0; row < 10; ++row) {
        for (int col = 0; col < 10; ++col) {
            const std::size_t c = grid.index(row, col);
            if (col < 5) {  // west half wet
                sim.hmax[c] = 0.5;
                sim.wse_max[c] = 10.0 + row + 0.1 * col;
            } else {
                sim.hmax[c] = 0.0;  // never wet
                sim.wse_max[c] = 99.0;
            }
        }
    }
    SECTION("native resolution") {
        const Raster map = extract_full_map(sim, 1e-10, 0.0);
        CHECK(map.at(3, 2) == 10.0 + 3 + 0.2);
        CHECK(map.is_nodata(3, 7));
    }
    SECTION("5 m analysis grid takes the block max and keeps NODATA blocks") {
        const Raster map = extract_full_map(sim, 1e-10, 5.0);
        REQUIRE(map.grid.ncols == 2);
        REQUIRE(map.grid.nrows == 2);
        // NW block: rows 0..4, cols 0..4 -> max at row 4, col 4
        CHECK(map.at(0, 0) == 10.0 + 4 + 0.4);
        CHECK(map.is_nodata(0, 1));
        CHECK(map.is_nodata(1, 1));
    }
}
