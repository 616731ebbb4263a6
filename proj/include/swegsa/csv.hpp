#pragma once

// Minimal CSV tables with RFC-style quoting. Values are kept as strings;
// numeric cells use shortest round-trip formatting.

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "swegsa/ascii_grid.hpp"  // IoError, ParseError, format_double

namespace swegsa {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_double(double v) {
    std::string s;
    detail::format_double(s, v);
    return s;
}

inline double csv_parse_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw IoError("not a number: '" + s + "'");
    return v;
}

namespace detail {

inline void csv_append_field(std::string& out, const std::string& f) {
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
        out += f;
        return;
    }
    out += '"';
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

}  // namespace detail

inline void write_csv(const CsvTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    std::string line;
    auto emit_row = [&](const std::vector<std::string>& row) {
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ',';
            detail::csv_append_field(line, row[i]);
        }
        line += '\n';
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    };
    emit_row(t.header);
    for (const auto& row : t.rows) emit_row(row);
    if (!out) throw IoError("write failed for " + path);
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    CsvTable t;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    long line = 1;
    auto end_field = [&]() { row.push_back(field); field.clear(); };
    auto end_row = [&]() {
        end_field();
        if (!any) { t.header = row; any = true; }
        else t.rows.push_back(row);
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') { field += '"'; ++i; }
                else quoted = false;
            } else field += c;
            if (c == '\n') ++line;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() || !row.empty()) end_row();
            ++line;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw ParseError(path, line, "unterminated quote");
    if (!field.empty() || !row.empty()) end_row();
    return t;
}

inline int csv_column(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace swegsa
