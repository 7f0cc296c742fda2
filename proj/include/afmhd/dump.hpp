#pragma once

#include "afmhd/ct.hpp"
#include "afmhd/field.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/physics.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace afmhd::io {

// ============================================================================
// Format
// ============================================================================
//
// One UTF-8 JSON object on the first line, terminated by '\n', followed by
// the arrays named in header["variables"], in that order. Each array holds
// nx·ny little-endian float64 values over interior nodes, η outer and ξ
// inner. Nothing follows the last array.

inline constexpr char const* schema_name = "afmhd-field-dump";
inline constexpr int schema_version = 1;

struct io_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/** x, y, the eight conserved variables, A and p. */
inline auto standard_variables() -> std::vector<std::string>
{
    return {"x", "y", "rho", "mx", "my", "mz", "E", "B1", "B2", "B3", "A", "p"};
}

inline auto derived_variables() -> std::vector<std::string> { return {"absB", "divB", "log_rho"}; }

struct dump_meta
{
    std::string problem;
    double gamma = default_gamma;
    bool derived = false; // append |B|, div B, ln ρ
};

struct dump
{
    nlohmann::json header;
    int nx = 0, ny = 0;
    double time = 0.0;
    long step = 0;
    std::vector<std::string> variables;
    std::map<std::string, std::vector<double>> arrays;

    auto at(std::string const& name) const -> std::vector<double> const&
    {
        auto it = arrays.find(name);
        if (it == arrays.end()) throw io_error("dump has no variable '" + name + "'");
        return it->second;
    }
};

// ============================================================================
// Building
// ============================================================================

/**
 * Snapshot of the interior of s. With meta.derived set, ghosts of B must be
 * filled because div B uses centred differences.
 */
inline auto make_dump(field_state const& s, curvilinear_grid const& g, dump_meta const& meta) -> dump
{
    dump d;
    d.nx = g.nx;
    d.ny = g.ny;
    d.time = s.time;
    d.step = s.step;
    d.variables = standard_variables();
    if (meta.derived)
        for (auto const& v : derived_variables()) d.variables.push_back(v);

    std::size_t n = std::size_t(g.nx) * std::size_t(g.ny);
    for (auto const& v : d.variables) d.arrays[v].reserve(n);
    array2d<double> div;
    if (meta.derived) div = ct::divergence(s, g);

    char const* cons_names[8] = {"rho", "mx", "my", "mz", "E", "B1", "B2", "B3"};
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        auto const& q = s.q(i, j);
        d.arrays["x"].push_back(g.x(i, j));
        d.arrays["y"].push_back(g.y(i, j));
        for (int k = 0; k < 8; ++k) d.arrays[cons_names[k]].push_back(q[k]);
        d.arrays["A"].push_back(s.a(i, j));
        d.arrays["p"].push_back(pressure(q, meta.gamma));
        if (meta.derived) {
            d.arrays["absB"].push_back(std::sqrt(q[5] * q[5] + q[6] * q[6] + q[7] * q[7]));
            d.arrays["divB"].push_back(div(i, j));
            d.arrays["log_rho"].push_back(std::log(q[0]));
        }
    });

    d.header = {{"schema", schema_name},
                {"version", schema_version},
                {"problem", meta.problem},
                {"time", s.time},
                {"step", s.step},
                {"nx", g.nx},
                {"ny", g.ny},
                {"ghost", curvilinear_grid::ghost},
                {"gamma", meta.gamma},
                {"mapping", g.mapping_kind},
                {"dtype", "float64-le"},
                {"order", "eta-outer"},
                {"variables", d.variables},
                {"grid_checksum", g.checksum()}};
    return d;
}

// ============================================================================
// Reading and writing
// ============================================================================

namespace detail {

inline auto to_le(double v) -> std::uint64_t
{
    auto u = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    return u;
}

inline auto from_le(std::uint64_t u) -> double
{
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    return std::bit_cast<double>(u);
}

} // namespace detail

inline void write_dump(dump const& d, std::string const& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << d.header.dump() << '\n';
    std::vector<std::uint64_t> buf;
    for (auto const& name : d.variables) {
        auto const& a = d.at(name);
        if (a.size() != std::size_t(d.nx) * std::size_t(d.ny)) throw io_error("array '" + name + "' has the wrong length");
        buf.resize(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) buf[k] = detail::to_le(a[k]);
        out.write(reinterpret_cast<char const*>(buf.data()), std::streamsize(buf.size() * 8));
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

inline auto read_dump(std::string const& path) -> dump
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error("'" + path + "' has no header line");
    dump d;
    try {
        d.header = nlohmann::json::parse(line);
        if (d.header.at("schema") != schema_name) throw io_error("'" + path + "' is not a field dump");
        if (d.header.at("version").get<int>() != schema_version)
            throw io_error("'" + path + "' has unsupported schema version " + d.header.at("version").dump());
        d.nx = d.header.at("nx").get<int>();
        d.ny = d.header.at("ny").get<int>();
        d.time = d.header.at("time").get<double>();
        d.step = d.header.at("step").get<long>();
        d.variables = d.header.at("variables").get<std::vector<std::string>>();
    } catch (nlohmann::json::exception const& e) {
        throw io_error("bad header in '" + path + "': " + e.what());
    }
    if (d.nx <= 0 || d.ny <= 0) throw io_error("bad grid size in '" + path + "'");
    std::size_t n = std::size_t(d.nx) * std::size_t(d.ny);
    std::vector<std::uint64_t> buf(n);
    for (auto const& name : d.variables) {
        in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(n * 8));
        if (in.gcount() != std::streamsize(n * 8)) throw io_error("'" + path + "' is truncated in array '" + name + "'");
        auto& a = d.arrays[name];
        a.resize(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = detail::from_le(buf[k]);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw io_error("'" + path + "' has trailing bytes");
    return d;
}

inline void emit_dump(field_state const& s, curvilinear_grid const& g, dump_meta const& meta, std::string const& path)
{
    write_dump(make_dump(s, g, meta), path);
}

/** Interior q, A, time and step of a dump; ghosts are left zero. */
inline auto load_field(dump const& d) -> field_state
{
    field_state s(d.nx, d.ny);
    s.time = d.time;
    s.step = d.step;
    char const* cons_names[8] = {"rho", "mx", "my", "mz", "E", "B1", "B2", "B3"};
    std::vector<std::vector<double> const*> c;
    for (auto const* name : cons_names) c.push_back(&d.at(name));
    auto const& a = d.at("A");
    std::size_t k = 0;
    for_each_interior(d.nx, d.ny, [&](int i, int j) {
        for (int v = 0; v < 8; ++v) s.q(i, j)[v] = (*c[v])[k];
        s.a(i, j) = a[k];
        ++k;
    });
    return s;
}

} // namespace afmhd::io
