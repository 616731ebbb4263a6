#pragma once

// ESRI ASCII grid reader/writer. Header keys are matched case-insensitively;
// values are written with shortest round-trip formatting so write->read is
// bit-exact. Rows stream through a small buffer, north row first.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "swegsa/grid.hpp"

namespace swegsa {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, long line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}
    long line_number;
};

class HeaderMismatch : public std::runtime_error {
public:
    explicit HeaderMismatch(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Buffered whitespace-delimited token reader that tracks line numbers.
class TokenReader {
public:
    explicit TokenReader(const std::string& path)
        : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open " + path);
        in_.rdbuf()->pubsetbuf(nullptr, 0);
        fill();
    }

    bool next(std::string& tok) {
        tok.clear();
        // skip whitespace
        for (;;) {
            if (pos_ == len_ && !fill()) return false;
            char c = buf_[pos_];
            if (c == '\n') ++line_;
            if (!std::isspace(static_cast<unsigned char>(c))) break;
            ++pos_;
        }
        while (pos_ < len_ || fill()) {
            char c = buf_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) break;
            tok.push_back(c);
            ++pos_;
        }
        return true;
    }

    double next_double(const char* what) {
        std::string tok;
        if (!next(tok))
            throw ParseError(path_, line_, std::string("unexpected end of file, expected ") + what);
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw ParseError(path_, line_, "bad numeric value '" + tok + "' for " + what);
        return v;
    }

    long line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    bool fill() {
        if (pos_ < len_) return true;
        in_.read(buf_, sizeof buf_);
        len_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        return len_ > 0;
    }

    std::string path_;
    std::ifstream in_;
    char buf_[1 << 16];
    std::size_t pos_ = 0, len_ = 0;
    long line_ = 1;
};

inline void format_double(std::string& out, double v) {
    char tmp[32];
    auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    (void)ec;
    out.append(tmp, p);
}

}  // namespace detail

inline Raster read_ascii_grid(const std::string& path) {
    detail::TokenReader rd(path);

    long ncols = -1, nrows = -1;
    double xll = 0, yll = 0, cellsize = 0, nodata = -9999.0;
    bool have_xll = false, have_yll = false, have_cs = false;

    std::string tok;
    // Header: key/value pairs until the first token that is not a known key.
    double first_value = 0.0;
    bool pending_value = false;
    for (;;) {
        if (!rd.next(tok)) break;
        std::string key = detail::lower(tok);
        if (key == "ncols") ncols = static_cast<long>(rd.next_double("ncols"));
        else if (key == "nrows") nrows = static_cast<long>(rd.next_double("nrows"));
        else if (key == "xllcorner") { xll = rd.next_double("xllcorner"); have_xll = true; }
        else if (key == "yllcorner") { yll = rd.next_double("yllcorner"); have_yll = true; }
        else if (key == "cellsize") { cellsize = rd.next_double("cellsize"); have_cs = true; }
        else if (key == "nodata_value") nodata = rd.next_double("NODATA_value");
        else {
            // first data token
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw ParseError(path, rd.line(), "unknown header key '" + tok + "'");
            first_value = v;
            pending_value = true;
            break;
        }
    }

    if (ncols < 0) throw HeaderMismatch(path + ": missing header key ncols");
    if (nrows < 0) throw HeaderMismatch(path + ": missing header key nrows");
    if (!have_xll) throw HeaderMismatch(path + ": missing header key xllcorner");
    if (!have_yll) throw HeaderMismatch(path + ": missing header key yllcorner");
    if (!have_cs) throw HeaderMismatch(path + ": missing header key cellsize");
    if (ncols < 1 || nrows < 1)
        throw ParseError(path, rd.line(), "ncols/nrows must be >= 1");
    if (!(cellsize > 0))
        throw ParseError(path, rd.line(), "cellsize must be positive");

    Raster r(Grid(static_cast<int>(ncols), static_cast<int>(nrows), cellsize, xll, yll),
             0.0, nodata);
    std::size_t n = r.grid.cell_count();
    std::size_t i = 0;
    if (pending_value) r.values[i++] = first_value;
    while (i < n) r.values[i++] = rd.next_double("grid value");
    if (rd.next(tok))
        throw ParseError(path, rd.line(), "trailing data after " + std::to_string(n) + " values");
    return r;
}

inline void write_ascii_grid(const Raster& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);

    std::string buf;
    buf.reserve(static_cast<std::size_t>(r.grid.ncols) * 26 + 128);
    buf += "ncols " + std::to_string(r.grid.ncols) + "\n";
    buf += "nrows " + std::to_string(r.grid.nrows) + "\n";
    buf += "xllcorner ";     detail::format_double(buf, r.grid.xll);      buf += '\n';
    buf += "yllcorner ";     detail::format_double(buf, r.grid.yll);      buf += '\n';
    buf += "cellsize ";      detail::format_double(buf, r.grid.cellsize); buf += '\n';
    buf += "NODATA_value ";  detail::format_double(buf, r.nodata);        buf += '\n';
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));

    // one row buffered at a time
    for (int row = 0; row < r.grid.nrows; ++row) {
        buf.clear();
        for (int col = 0; col < r.grid.ncols; ++col) {
            if (col) buf += ' ';
            detail::format_double(buf, r.at(row, col));
        }
        buf += '\n';
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace swegsa
