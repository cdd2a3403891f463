#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccx/grid.hpp"

namespace ccx {

enum class GridFormat { csv, bin, pgm };

namespace detail {

[[noreturn]] inline void io_fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt_g17(xs[i]);
    }
    return out;
}

inline std::vector<double> split_list(const std::string& s, const std::string& path) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        const std::string tok = s.substr(pos, next - pos);
        if (tok.empty()) io_fail(path, "empty entry in header list");
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            io_fail(path, "bad number '" + tok + "' in header");
        }
        if (used != tok.size()) io_fail(path, "bad number '" + tok + "' in header");
        out.push_back(v);
        pos = next + 1;
    }
    return out;
}

}  // namespace detail

/// Text format. First line:
///   # ccx-grid d=<dims> origin=<coords> spacing=<steps>
/// then one comma-separated row per line of the last axis, %.17g so reruns
/// are byte-identical and round-trips are exact.
inline void write_grid_csv(const std::string& path, const ScalarGrid& g) {
    validate_grid(g);
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) detail::io_fail(path, "cannot open for writing");
    std::vector<double> dims_d(g.dims.begin(), g.dims.end());
    out << "# ccx-grid d=" << detail::join_list(dims_d) << " origin=" << detail::join_list(g.origin)
        << " spacing=" << detail::join_list(g.spacing) << "\n";
    const std::size_t row = g.dims.back();
    for (std::size_t i = 0; i < g.values.size(); i += row) {
        for (std::size_t j = 0; j < row; ++j) {
            if (j) out << ',';
            out << detail::fmt_g17(g.values[i + j]);
        }
        out << "\n";
    }
    if (!out) detail::io_fail(path, "write failed");
}

inline ScalarGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::io_fail(path, "cannot open for reading");
    std::string header;
    if (!std::getline(in, header)) detail::io_fail(path, "empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const std::string magic = "# ccx-grid ";
    if (header.rfind(magic, 0) != 0) detail::io_fail(path, "missing grid header");

    GridSpec spec;
    std::istringstream hs(header.substr(magic.size()));
    std::string tok;
    bool saw_d = false, saw_o = false, saw_s = false;
    while (hs >> tok) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string::npos) detail::io_fail(path, "bad header token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        if (key != "d" && key != "origin" && key != "spacing")
            detail::io_fail(path, "unknown header key '" + key + "'");
        const std::vector<double> vals = detail::split_list(tok.substr(eq + 1), path);
        if (key == "d") {
            for (double v : vals) {
                if (v < 1 || v != std::floor(v)) detail::io_fail(path, "bad dimension in header");
                spec.dims.push_back(static_cast<std::size_t>(v));
            }
            saw_d = true;
        } else if (key == "origin") {
            spec.origin = vals;
            saw_o = true;
        } else {
            spec.spacing = vals;
            saw_s = true;
        }
    }
    if (!saw_d || !saw_o || !saw_s) detail::io_fail(path, "header missing d=, origin= or spacing=");
    try {
        validate_spec(spec);
    } catch (const std::exception& e) {
        detail::io_fail(path, e.what());
    }

    ScalarGrid g = make_grid(spec, 0.0);
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t pos = 0;
        while (pos < line.size()) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) next = line.size();
            std::string cell = line.substr(pos, next - pos);
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.erase(cell.begin());
            while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
            if (!cell.empty()) {
                if (count >= g.values.size()) detail::io_fail(path, "more values than the header's dimensions");
                std::size_t used = 0;
                double v;
                try {
                    v = std::stod(cell, &used);
                } catch (const std::exception&) {
                    detail::io_fail(path, "bad value '" + cell + "'");
                }
                if (used != cell.size()) detail::io_fail(path, "bad value '" + cell + "'");
                g.values[count++] = v;
            }
            pos = next + 1;
        }
    }
    if (count != g.values.size())
        detail::io_fail(path, "expected " + std::to_string(g.values.size()) + " values, found " + std::to_string(count));
    try {
        validate_grid(g);
    } catch (const std::exception& e) {
        detail::io_fail(path, e.what());
    }
    return g;
}

/// Little-endian binary format: "CCXG", u32 axis count, then per axis
/// u64 dim + f64 origin + f64 spacing, then the f64 values row-major.
inline void write_grid_bin(const std::string& path, const ScalarGrid& g) {
    validate_grid(g);
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::io_fail(path, "cannot open for writing");
    out.write("CCXG", 4);
    const std::uint32_t axes = static_cast<std::uint32_t>(g.dims.size());
    out.write(reinterpret_cast<const char*>(&axes), sizeof axes);
    for (std::size_t a = 0; a < g.dims.size(); ++a) {
        const std::uint64_t dim = g.dims[a];
        out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
        out.write(reinterpret_cast<const char*>(&g.origin[a]), sizeof(double));
        out.write(reinterpret_cast<const char*>(&g.spacing[a]), sizeof(double));
    }
    out.write(reinterpret_cast<const char*>(g.values.data()),
              static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    if (!out) detail::io_fail(path, "write failed");
}

inline ScalarGrid read_grid_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::io_fail(path, "cannot open for reading");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "CCXG", 4) != 0) detail::io_fail(path, "not a ccx binary grid");
    std::uint32_t axes = 0;
    if (!in.read(reinterpret_cast<char*>(&axes), sizeof axes) || axes == 0 || axes > 16)
        detail::io_fail(path, "bad axis count");
    GridSpec spec;
    for (std::uint32_t a = 0; a < axes; ++a) {
        std::uint64_t dim = 0;
        double origin = 0.0, spacing = 0.0;
        if (!in.read(reinterpret_cast<char*>(&dim), sizeof dim) ||
            !in.read(reinterpret_cast<char*>(&origin), sizeof origin) ||
            !in.read(reinterpret_cast<char*>(&spacing), sizeof spacing))
            detail::io_fail(path, "truncated header");
        spec.dims.push_back(static_cast<std::size_t>(dim));
        spec.origin.push_back(origin);
        spec.spacing.push_back(spacing);
    }
    try {
        validate_spec(spec);
    } catch (const std::exception& e) {
        detail::io_fail(path, e.what());
    }
    ScalarGrid g = make_grid(spec, 0.0);
    if (!in.read(reinterpret_cast<char*>(g.values.data()),
                 static_cast<std::streamsize>(g.values.size() * sizeof(double))))
        detail::io_fail(path, "truncated values");
    char extra;
    if (in.read(&extra, 1)) detail::io_fail(path, "trailing bytes after values");
    try {
        validate_grid(g);
    } catch (const std::exception& e) {
        detail::io_fail(path, e.what());
    }
    return g;
}

/// 8-bit PGM (P5) of a 2D grid, min-max rescaled to 0..255; the scale is
/// recorded in a comment so the mapping is recoverable. Constant grids map
/// to 0. Lossy: meant for eyeballing maps, not for round-trips.
inline void write_grid_pgm(const std::string& path, const ScalarGrid& g) {
    validate_grid(g);
    if (g.dims.size() != 2) throw std::invalid_argument("pgm output needs a 2D grid");
    double lo = g.values.front(), hi = g.values.front();
    for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::io_fail(path, "cannot open for writing");
    out << "P5\n# ccx min=" << detail::fmt_g17(lo) << " max=" << detail::fmt_g17(hi) << "\n"
        << g.dims[1] << " " << g.dims[0] << "\n255\n";
    const double span = hi - lo;
    for (double v : g.values) {
        const double t = span > 0.0 ? (v - lo) / span : 0.0;
        const int b = static_cast<int>(std::lround(t * 255.0));
        out.put(static_cast<char>(std::clamp(b, 0, 255)));
    }
    if (!out) detail::io_fail(path, "write failed");
}

namespace detail {

inline int pgm_next_int(std::istream& in, const std::string& path) {
    // Skips whitespace and '#' comment lines between header fields.
    for (;;) {
        const int c = in.peek();
        if (c == EOF) io_fail(path, "truncated pgm header");
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        break;
    }
    int v = 0;
    if (!(in >> v)) io_fail(path, "bad pgm header field");
    return v;
}

}  // namespace detail

/// Reads P2 (ascii) or P5 (binary) PGM as a 2D grid of raw sample values,
/// origin 0 and unit spacing. Useful for mask input: nonzero = site.
inline ScalarGrid read_grid_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::io_fail(path, "cannot open for reading");
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 != 'P' || (m1 != '2' && m1 != '5')) detail::io_fail(path, "not a P2/P5 pgm");
    const bool binary = m1 == '5';
    const int width = detail::pgm_next_int(in, path);
    const int height = detail::pgm_next_int(in, path);
    const int maxval = detail::pgm_next_int(in, path);
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) detail::io_fail(path, "bad pgm dimensions");

    GridSpec spec;
    spec.dims = {static_cast<std::size_t>(height), static_cast<std::size_t>(width)};
    spec.origin = {0.0, 0.0};
    spec.spacing = {1.0, 1.0};
    ScalarGrid g = make_grid(spec, 0.0);
    if (binary) {
        in.get();  // single whitespace after maxval
        const bool wide = maxval > 255;
        for (double& v : g.values) {
            int b0 = in.get();
            if (b0 == EOF) detail::io_fail(path, "truncated pgm data");
            if (wide) {
                const int b1 = in.get();
                if (b1 == EOF) detail::io_fail(path, "truncated pgm data");
                b0 = b0 * 256 + b1;
            }
            v = b0;
        }
    } else {
        for (double& v : g.values) {
            int x;
            if (!(in >> x)) detail::io_fail(path, "truncated pgm data");
            v = x;
        }
    }
    return g;
}

inline void write_grid(const std::string& path, const ScalarGrid& g, GridFormat fmt) {
    switch (fmt) {
        case GridFormat::csv: write_grid_csv(path, g); return;
        case GridFormat::bin: write_grid_bin(path, g); return;
        case GridFormat::pgm: write_grid_pgm(path, g); return;
    }
    throw std::logic_error("write_grid: unreachable");
}

/// Dispatch on content: binary magic, pgm magic, else csv.
inline ScalarGrid read_grid(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) detail::io_fail(path, "cannot open for reading");
    char head[4] = {0, 0, 0, 0};
    probe.read(head, 4);
    probe.close();
    if (std::memcmp(head, "CCXG", 4) == 0) return read_grid_bin(path);
    if (head[0] == 'P' && (head[1] == '2' || head[1] == '5')) return read_grid_pgm(path);
    return read_grid_csv(path);
}

/// Point lists: one comma-separated point per line, '#' lines are comments.
inline void write_points_csv(const std::string& path, const std::vector<Point>& pts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::io_fail(path, "cannot open for writing");
    for (const Point& p : pts) out << detail::join_list(p) << "\n";
    if (!out) detail::io_fail(path, "write failed");
}

inline std::vector<Point> read_points_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::io_fail(path, "cannot open for reading");
    std::vector<Point> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        pts.push_back(detail::split_list(line.substr(first), path));
    }
    if (pts.empty()) detail::io_fail(path, "no points found");
    const std::size_t d = pts.front().size();
    for (const Point& p : pts)
        if (p.size() != d) detail::io_fail(path, "inconsistent point dimensions");
    return pts;
}

}  // namespace ccx
