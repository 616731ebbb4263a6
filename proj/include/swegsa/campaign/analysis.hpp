#pragma once

// Bridge from campaign result tables back to the estimators: gather scalar
// probe outputs into pick-freeze vectors, load full-map stacks, and write
// the analysis artifacts (Sobol table, convergence, histogram, scatter).

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swegsa/ascii_grid.hpp"
#include "swegsa/campaign/runner.hpp"
#include "swegsa/csv.hpp"
#include "swegsa/gsa/design.hpp"
#include "swegsa/gsa/diagnostics.hpp"
#include "swegsa/gsa/estimators.hpp"
#include "swegsa/gsa/sobol_map.hpp"

namespace swegsa::campaign {

namespace detail {

// matrix/row -> value of one column, validated against the design shape.
class TableIndex {
public:
    TableIndex(const CsvTable& table, const gsa::SampleDesign& design) {
        const int c_matrix = csv_column(table, "matrix");
        const int c_row = csv_column(table, "row");
        if (c_matrix < 0 || c_row < 0)
            throw IoError("results table lacks the matrix/row columns");
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            rows_[{row[c_matrix], static_cast<int>(csv_parse_double(row[c_row]))}] = r;
        }
        expected_ = static_cast<std::size_t>(design.total_runs());
        if (rows_.size() != expected_)
            throw IoError("results table has " + std::to_string(rows_.size()) +
                          " runs, design expects " + std::to_string(expected_));
    }

    std::size_t row(const std::string& matrix, int index) const {
        auto it = rows_.find({matrix, index});
        if (it == rows_.end())
            throw IoError("results table is missing run " + matrix + "/" + std::to_string(index));
        return it->second;
    }

private:
    std::map<std::pair<std::string, int>, std::size_t> rows_;
    std::size_t expected_ = 0;
};

}  // namespace detail

/// Scalar probe outputs rearranged into (Y_A, Y_B, Y_AB^i) vectors.
inline gsa::PickFreezeOutputs gather_outputs(const CsvTable& table,
                                             const gsa::SampleDesign& design,
                                             const std::string& probe) {
    const int col = csv_column(table, probe);
    if (col < 0) throw IoError("results table has no column '" + probe + "'");
    detail::TableIndex index(table, design);
    auto value = [&](const std::string& matrix, int row) {
        const std::string& cell = table.rows[index.row(matrix, row)][col];
        if (cell.empty()) throw IoError("run " + matrix + "/" + std::to_string(row) + " has no output (failed?)");
        return csv_parse_double(cell);
    };
    gsa::PickFreezeOutputs out;
    out.ya.resize(design.n);
    out.yb.resize(design.n);
    out.yab.assign(design.p(), std::vector<double>(design.n));
    for (int row = 0; row < design.n; ++row) {
        out.ya[row] = value("A", row);
        out.yb[row] = value("B", row);
        for (int i = 0; i < design.p(); ++i) out.yab[i][row] = value("AB" + std::to_string(i + 1), row);
    }
    return out;
}

/// Realized values of one parameter across the A rows (for scatter plots).
inline std::vector<double> gather_param_column(const CsvTable& table,
                                               const gsa::SampleDesign& design,
                                               const std::string& param) {
    const int col = csv_column(table, param);
    if (col < 0) throw IoError("results table has no column '" + param + "'");
    detail::TableIndex index(table, design);
    std::vector<double> values(design.n);
    for (int row = 0; row < design.n; ++row)
        values[row] = csv_parse_double(table.rows[index.row("A", row)][col]);
    return values;
}

/// Load the per-run full-map rasters referenced by the results table.
inline gsa::RasterStacks load_map_stacks(const CsvTable& table, const gsa::SampleDesign& design,
                                         const std::string& probe, const std::string& base_dir) {
    namespace fs = std::filesystem;
    const int col = csv_column(table, probe);
    if (col < 0) throw IoError("results table has no column '" + probe + "'");
    detail::TableIndex index(table, design);
    auto load = [&](const std::string& matrix, int row) {
        const std::string& rel = table.rows[index.row(matrix, row)][col];
        if (rel.empty()) throw IoError("run " + matrix + "/" + std::to_string(row) + " has no map (failed?)");
        return read_ascii_grid((fs::path(base_dir) / rel).string());
    };
    gsa::RasterStacks stacks;
    stacks.yab.resize(design.p());
    for (int row = 0; row < design.n; ++row) {
        stacks.ya.push_back(load("A", row));
        stacks.yb.push_back(load("B", row));
        for (int i = 0; i < design.p(); ++i)
            stacks.yab[i].push_back(load("AB" + std::to_string(i + 1), row));
    }
    return stacks;
}

inline CsvTable sobol_result_table(const gsa::SobolResult& res,
                                   const std::vector<gsa::InputParameter>& params) {
    CsvTable t;
    t.header = {"param", "S1",     "S1_lo",  "S1_hi", "ST", "ST_lo",
                "ST_hi", "varY",   "n",      "degenerate", "S1_raw", "ST_raw"};
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& ix = res.index[i];
        t.rows.push_back({params[i].name, csv_double(ix.s1), csv_double(ix.s1_lo),
                          csv_double(ix.s1_hi), csv_double(ix.st), csv_double(ix.st_lo),
                          csv_double(ix.st_hi), csv_double(res.var_y),
                          std::to_string(res.n_used), res.degenerate ? "true" : "false",
                          csv_double(ix.s1_raw), csv_double(ix.st_raw)});
    }
    return t;
}

inline CsvTable convergence_table(const gsa::ConvergenceSeries& series,
                                  const std::vector<gsa::InputParameter>& params) {
    CsvTable t;
    t.header = {"N", "mean", "ci_half_width"};
    for (const auto& prm : params) t.header.push_back("S1_" + prm.name);
    for (const auto& cp : series.checkpoints) {
        std::vector<std::string> row = {std::to_string(cp.n), csv_double(cp.mean),
                                        csv_double(cp.ci_half_width)};
        for (double s : cp.s1) row.push_back(csv_double(s));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable histogram_table(const gsa::Histogram& h) {
    CsvTable t;
    t.header = {"bin_lo", "bin_hi", "count"};
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
        t.rows.push_back({csv_double(h.edges[b]), csv_double(h.edges[b + 1]),
                          std::to_string(h.counts[b])});
    return t;
}

inline CsvTable scatter_table(const std::vector<gsa::ScatterPoint>& pts,
                              const std::string& param, const std::string& probe) {
    CsvTable t;
    t.header = {param, probe};
    for (const auto& p : pts) t.rows.push_back({csv_double(p.x), csv_double(p.y)});
    return t;
}

/// Default convergence checkpoints: powers of two up to n, always ending at n.
inline std::vector<int> default_checkpoints(int n) {
    std::vector<int> cps;
    for (int c = 8; c < n; c *= 2) cps.push_back(c);
    if (cps.empty() || cps.back() != n) cps.push_back(n);
    return cps;
}

}  // namespace swegsa::campaign
