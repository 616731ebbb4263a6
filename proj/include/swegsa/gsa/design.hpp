#pragma once

// Pick-freeze sample designs: matrices A and B of independent draws plus the
// derived A_B^(i) rows (A with column i taken from B). Column j of A uses
// counter stream 2j, of B stream 2j+1, so regeneration order never matters.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "swegsa/csv.hpp"
#include "swegsa/gsa/distributions.hpp"
#include "swegsa/rng.hpp"

namespace swegsa::gsa {

struct SampleDesign {
    std::vector<InputParameter> params;
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<double> a;  // n x p row-major
    std::vector<double> b;

    int p() const { return static_cast<int>(params.size()); }
    double a_at(int row, int col) const { return a[static_cast<std::size_t>(row) * p() + col]; }
    double b_at(int row, int col) const { return b[static_cast<std::size_t>(row) * p() + col]; }

    /// Row of A_B^(i): A's row with column i replaced by B's.
    std::vector<double> ab_row(int i, int row) const {
        std::vector<double> r(p());
        for (int c = 0; c < p(); ++c) r[c] = a_at(row, c);
        r[i] = b_at(row, i);
        return r;
    }

    /// Total model evaluations the design implies: n (p + 2).
    long long total_runs() const { return static_cast<long long>(n) * (p() + 2); }
};

inline SampleDesign sample(const std::vector<InputParameter>& params, int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample: n must be >= 2");
    if (params.empty()) throw std::invalid_argument("sample: no parameters");
    for (std::size_t i = 0; i < params.size(); ++i) {
        validate(params[i].dist, params[i].name);
        for (std::size_t k = 0; k < i; ++k)
            if (params[k].name == params[i].name)
                throw InvalidDistribution("duplicate parameter name '" + params[i].name + "'");
    }
    SampleDesign d;
    d.params = params;
    d.n = n;
    d.seed = seed;
    const int p = d.p();
    d.a.resize(static_cast<std::size_t>(n) * p);
    d.b.resize(static_cast<std::size_t>(n) * p);
    CounterRng rng(seed);
    for (int j = 0; j < p; ++j) {
        for (int row = 0; row < n; ++row) {
            d.a[static_cast<std::size_t>(row) * p + j] =
                quantile(params[j].dist, rng.uniform01(2ull * j, row));
            d.b[static_cast<std::size_t>(row) * p + j] =
                quantile(params[j].dist, rng.uniform01(2ull * j + 1, row));
        }
    }
    return d;
}

namespace detail {

inline CsvTable matrix_table(const SampleDesign& d, const std::vector<double>& m) {
    CsvTable t;
    for (const auto& prm : d.params) t.header.push_back(prm.name);
    const int p = d.p();
    for (int row = 0; row < d.n; ++row) {
        std::vector<std::string> r(p);
        for (int c = 0; c < p; ++c) r[c] = csv_double(m[static_cast<std::size_t>(row) * p + c]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

}  // namespace detail

inline void save_design(const SampleDesign& d, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_csv(detail::matrix_table(d, d.a), dir + "/A.csv");
    write_csv(detail::matrix_table(d, d.b), dir + "/B.csv");
    CsvTable meta;
    meta.header = {"name", "distribution"};
    for (const auto& prm : d.params) meta.rows.push_back({prm.name, describe(prm.dist)});
    write_csv(meta, dir + "/parameters.csv");
    CsvTable info;
    info.header = {"n", "seed"};
    info.rows.push_back({std::to_string(d.n), std::to_string(d.seed)});
    write_csv(info, dir + "/design.csv");
}

inline SampleDesign load_design(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir + "/A.csv") || !fs::exists(dir + "/B.csv") ||
        !fs::exists(dir + "/design.csv"))
        throw IoError("design directory '" + dir + "' is missing A.csv/B.csv/design.csv");
    SampleDesign d;
    const CsvTable meta = read_csv(dir + "/parameters.csv");
    for (const auto& row : meta.rows)
        d.params.push_back({row.at(0), parse_distribution(row.at(1))});
    const CsvTable info = read_csv(dir + "/design.csv");
    d.n = static_cast<int>(csv_parse_double(info.rows.at(0).at(0)));
    d.seed = static_cast<std::uint64_t>(std::stoull(info.rows.at(0).at(1)));
    const int p = d.p();
    auto load_matrix = [&](const std::string& path, std::vector<double>& m) {
        const CsvTable t = read_csv(path);
        if (static_cast<int>(t.header.size()) != p || static_cast<int>(t.rows.size()) != d.n)
            throw IoError(path + ": matrix shape does not match the design");
        m.resize(static_cast<std::size_t>(d.n) * p);
        for (int row = 0; row < d.n; ++row)
            for (int c = 0; c < p; ++c)
                m[static_cast<std::size_t>(row) * p + c] = csv_parse_double(t.rows[row][c]);
    };
    load_matrix(dir + "/A.csv", d.a);
    load_matrix(dir + "/B.csv", d.b);
    return d;
}

}  // namespace swegsa::gsa
