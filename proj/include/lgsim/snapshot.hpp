#pragma once

// LGSIM1 snapshot files.
//
//   LGSIM1 <field-kind> d=<d> L=<L>
//
// followed by the (2L+1)^d values of the window. The last axis is the
// outermost loop and axis 0 the innermost, so a d = 2 file has one line per
// row y = -L..L, each listing x = -L..L separated by single spaces. For
// d >= 3 each (x_2, ..., x_{d-1}) slab of rows is followed by an empty line.
// Integral fields are written as integers, real fields with 17 significant
// digits.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "lattice.hpp"
#include "region.hpp"

namespace lgsim {

struct Snapshot {
    std::string kind;
    GridWindow window;
    std::vector<double> values;

    [[nodiscard]] double at(const Point& p) const { return window.contains(p) ? values[window.index(p)] : 0.0; }
};

namespace detail {

template <class T>
void write_value(std::ostream& os, T v)
{
    if constexpr (std::is_integral_v<T>) {
        os << static_cast<long long>(v);
    } else {
        char buf[40];
        const int n = std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v));
        os.write(buf, n);
    }
}

}  // namespace detail

/// Writes `values` (laid out on `from`) cropped or padded to the window
/// of half-width `L_out`. Sites outside `from` are written as `fill`.
template <class T>
void write_snapshot(std::ostream& os, const std::string& kind, const GridWindow& from,
                    const std::vector<T>& values, std::int32_t L_out, T fill = T{})
{
    const GridWindow out(from.dim(), L_out);
    os << "LGSIM1 " << kind << " d=" << out.dim() << " L=" << out.half_width() << '\n';
    const auto side = out.side();
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Point p = out.point(k);
        const T v = from.contains(p) ? values[from.index(p)] : fill;
        detail::write_value(os, v);
        const bool row_end = (static_cast<std::int64_t>(k) + 1) % side == 0;
        os << (row_end ? '\n' : ' ');
        if (row_end && out.dim() >= 3 && (static_cast<std::int64_t>(k) + 1) % (side * side) == 0) os << '\n';
    }
}

template <class T>
void write_snapshot(std::ostream& os, const std::string& kind, const Field<T>& field)
{
    write_snapshot(os, kind, field.window, field.values, field.window.half_width());
}

inline void write_region(std::ostream& os, const Region& region, std::int32_t L_out)
{
    write_snapshot(os, "region", region.window(), region.mask(), L_out, std::uint8_t{0});
}

inline void write_region(std::ostream& os, const Region& region)
{
    write_region(os, region, std::max<std::int32_t>(region.max_abs_coord(), 0));
}

inline Snapshot read_snapshot(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("snapshot: empty input");
    std::istringstream header(line);
    std::string magic, kind, dtok, ltok;
    header >> magic >> kind >> dtok >> ltok;
    if (magic != "LGSIM1" || dtok.rfind("d=", 0) != 0 || ltok.rfind("L=", 0) != 0)
        throw ConfigError("snapshot: bad header '" + line + "'");
    const int d = std::stoi(dtok.substr(2));
    const int L = std::stoi(ltok.substr(2));
    Snapshot snap{kind, GridWindow(d, L), {}};
    snap.values.reserve(snap.window.size());
    std::string tok;
    while (snap.values.size() < snap.window.size() && (is >> tok)) {
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{}) throw ConfigError("snapshot: bad value '" + tok + "'");
        snap.values.push_back(v);
    }
    if (snap.values.size() != snap.window.size()) throw ConfigError("snapshot: truncated data");
    return snap;
}

inline Snapshot read_snapshot_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
    return read_snapshot(in);
}

/// Nonzero sites of a snapshot (values > 0 for the rotor kind, where -1
/// marks an unoccupied site).
inline Region region_from_snapshot(const Snapshot& snap)
{
    Region r(snap.window);
    const bool rotor_kind = snap.kind == "rotors";
    for (std::size_t k = 0; k < snap.values.size(); ++k) {
        const double v = snap.values[k];
        r.mask()[k] = rotor_kind ? (v >= 0.0) : (v != 0.0);
    }
    return r;
}

}  // namespace lgsim
