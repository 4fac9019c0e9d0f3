#pragma once

// Shape statistics of finite lattice regions: radii with witness points,
// symmetric difference with a ball, and simple connectivity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "region.hpp"

namespace lgsim {

struct Radius {
    double value = 0.0;
    Point witness{};
};

/// min |y| over y not in the region; B_rho is inside the region iff
/// rho <= this value.
inline Radius inradius(const Region& region)
{
    const int d = region.dim();
    if (!region.contains(Point::origin(d))) throw ConfigError("inradius: region does not contain the origin");
    // the nearest absent site lies in the window or just outside it
    const GridWindow& w = region.window();
    std::int64_t best = std::int64_t{w.half_width() + 1} * (w.half_width() + 1);
    Point witness = Point::axis(d, 0, w.half_width() + 1);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (region.contains_index(k)) continue;
        const Point p = w.point(k);
        const auto n2 = p.norm2();
        if (n2 < best || (n2 == best && p < witness)) {
            best = n2;
            witness = p;
        }
    }
    return {std::sqrt(static_cast<double>(best)), witness};
}

/// max |x| over members; the region lies in B_rho iff rho > this value.
inline Radius outradius(const Region& region)
{
    const int d = region.dim();
    const GridWindow& w = region.window();
    std::int64_t best = -1;
    Point witness = Point::origin(d);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!region.contains_index(k)) continue;
        const Point p = w.point(k);
        const auto n2 = p.norm2();
        if (n2 > best || (n2 == best && p < witness)) {
            best = n2;
            witness = p;
        }
    }
    if (best < 0) throw ConfigError("outradius: empty region");
    return {std::sqrt(static_cast<double>(best)), witness};
}

/// |region symmetric-difference B_r|.
inline std::int64_t symdiff_ball(const Region& region, double r)
{
    const int d = region.dim();
    const Region ball = Region::ball(d, r);
    std::int64_t n = 0;
    for (const Point& p : region.points())
        if (!in_ball(p, r)) ++n;
    for (const Point& p : ball.points())
        if (!region.contains(p)) ++n;
    return n;
}

/// True iff the complement of the region is connected, counting everything
/// outside its bounding box as one component (any d >= 2).
inline bool simply_connected(const Region& region)
{
    const int d = region.dim();
    std::vector<Point> pts = region.points();
    if (pts.empty()) return true;
    Point lo = pts.front(), hi = pts.front();
    for (const Point& p : pts)
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    // padded box [lo - 1, hi + 1], flat indexed
    std::array<std::int64_t, kMaxDim> side{}, stride{};
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) {
        side[static_cast<std::size_t>(i)] = hi[i] - lo[i] + 3;
        stride[static_cast<std::size_t>(i)] = total;
        total *= side[static_cast<std::size_t>(i)];
    }
    auto index = [&](const Point& p) {
        std::int64_t k = 0;
        for (int i = 0; i < d; ++i) k += (p[i] - lo[i] + 1) * stride[static_cast<std::size_t>(i)];
        return static_cast<std::size_t>(k);
    };
    std::vector<std::uint8_t> state(static_cast<std::size_t>(total), 0);  // 0 free, 1 member, 2 reached
    for (const Point& p : pts) state[index(p)] = 1;
    std::size_t free_cells = static_cast<std::size_t>(total) - pts.size();

    std::deque<std::size_t> queue{0};  // the corner cell is padding, hence outside
    state[0] = 2;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        auto rem = static_cast<std::int64_t>(k);
        std::array<std::int64_t, kMaxDim> c{};
        for (int i = 0; i < d; ++i) {
            c[static_cast<std::size_t>(i)] = rem % side[static_cast<std::size_t>(i)];
            rem /= side[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < d; ++i) {
            for (int s : {-1, 1}) {
                const std::int64_t v = c[static_cast<std::size_t>(i)] + s;
                if (v < 0 || v >= side[static_cast<std::size_t>(i)]) continue;
                const auto n = static_cast<std::size_t>(static_cast<std::int64_t>(k) + s * stride[static_cast<std::size_t>(i)]);
                if (state[n] != 0) continue;
                state[n] = 2;
                ++reached;
                queue.push_back(n);
            }
        }
    }
    return reached == free_cells;
}

// ---------------------------------------------------------------------------
// Reports

enum class Model { Rotor, Divisible, Sandpile };

inline Model parse_model(const std::string& s)
{
    if (s == "rotor") return Model::Rotor;
    if (s == "divisible") return Model::Divisible;
    if (s == "sandpile") return Model::Sandpile;
    throw ConfigError("unknown model '" + s + "'");
}

inline std::string to_string(Model m)
{
    switch (m) {
    case Model::Rotor: return "rotor";
    case Model::Divisible: return "divisible";
    case Model::Sandpile: return "sandpile";
    }
    return "?";
}

/// Parameters a verdict needs beyond the region itself.
struct ShapeParams {
    double size = 0.0;  ///< n (rotor, sandpile) or m (divisible)
    int H = 0;          ///< sandpile hole depth
    double eps = 0.1;   ///< sandpile outer-bound epsilon
};

/// Normalised deviation of a region from the ball of the model's scale.
struct ShapeVerdict {
    std::string inner_name;  ///< what inner_stat measures
    std::string outer_name;
    double inner_stat = 0.0;
    double outer_stat = 0.0;
};

struct ShapeReport {
    std::int64_t volume = 0;
    double r_nominal = 0.0;  ///< (volume / omega_d)^{1/d}
    double r_model = 0.0;    ///< radius implied by the model size
    Radius in;
    Radius out;
    std::int64_t symdiff = 0;  ///< against B_{r_nominal}
    std::optional<bool> simply_connected;
    ShapeVerdict verdict;
};

/// Sandpile radii constants c1 = (2d-1+H)^{-1/d}, c1' = (d-eps+H)^{-1/d}.
inline double sandpile_c1(int d, int H) { return std::pow(2.0 * d - 1.0 + H, -1.0 / d); }
inline double sandpile_c1_outer(int d, int H, double eps) { return std::pow(d - eps + H, -1.0 / d); }

/// Model-specific statistics whose boundedness across a size sweep is the
/// property form of the shape theorems:
///   rotor:     (r - in) / log r and (out - r) / (r^{1-1/d} log r)
///   divisible: r - in and out - r
///   sandpile:  c1 r - in and out - c1' r
inline ShapeVerdict shape_verdict(Model model, int d, double r, const Radius& in, const Radius& out, const ShapeParams& p)
{
    ShapeVerdict v;
    switch (model) {
    case Model::Rotor: {
        const double lr = std::log(std::max(r, 2.0));
        v.inner_name = "(r-in)/log r";
        v.outer_name = "(out-r)/(r^(1-1/d) log r)";
        v.inner_stat = (r - in.value) / lr;
        v.outer_stat = (out.value - r) / (std::pow(r, 1.0 - 1.0 / d) * lr);
        break;
    }
    case Model::Divisible:
        v.inner_name = "r-in";
        v.outer_name = "out-r";
        v.inner_stat = r - in.value;
        v.outer_stat = out.value - r;
        break;
    case Model::Sandpile:
        v.inner_name = "c1 r-in";
        v.outer_name = "out-c1' r";
        v.inner_stat = sandpile_c1(d, p.H) * r - in.value;
        v.outer_stat = out.value - sandpile_c1_outer(d, p.H, p.eps) * r;
        break;
    }
    return v;
}

inline ShapeReport theorem_report(const Region& region, Model model, const ShapeParams& params)
{
    const int d = region.dim();
    ShapeReport rep;
    rep.volume = static_cast<std::int64_t>(region.count());
    rep.r_nominal = radius_for_volume(static_cast<double>(rep.volume), d);
    rep.r_model = params.size > 0.0 ? radius_for_volume(params.size, d) : rep.r_nominal;
    rep.in = inradius(region);
    rep.out = outradius(region);
    rep.symdiff = symdiff_ball(region, rep.r_nominal);
    if (d == 2) rep.simply_connected = simply_connected(region);
    rep.verdict = shape_verdict(model, d, rep.r_model, rep.in, rep.out, params);
    return rep;
}

/// Sweep stability: every later value is at most factor * max(first, floor).
/// The floor keeps the rule meaningful when the first value is small or
/// negative.
inline bool sweep_stable(const std::vector<double>& values, double factor = 1.5, double floor = 1.0)
{
    if (values.empty()) return true;
    const double cap = factor * std::max(values.front(), floor);
    for (double v : values)
        if (v > cap) return false;
    return true;
}

}  // namespace lgsim
