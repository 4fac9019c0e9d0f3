#pragma once

// Classical abelian sandpile with holes.
//
// n grains start at the origin. Every site first absorbs H grains (H < 0
// means -H grains are already present), then topples whenever it holds 2d
// more, sending one grain to each neighbor. In terms of the count
// c(x) = received(x) - 2d * topplings(x) a site is unstable iff
// c(x) >= 2d + H. The odometer u of the inequalities is grains emitted,
// i.e. 2d * topplings, so Delta u(x) + n delta_o(x) = c(x) exactly.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "lattice.hpp"
#include "region.hpp"

namespace lgsim {

enum class SandOrder { Fifo, Lifo, Sweep };
enum class SandMode { Multi, Single };
/// Which sites count as visited: any that received a grain, or those whose
/// count ever rose above the hole floor max(H, 0).
enum class VisitedMode { Received, AboveFloor };

inline SandOrder parse_sand_order(const std::string& s)
{
    if (s == "fifo") return SandOrder::Fifo;
    if (s == "lifo") return SandOrder::Lifo;
    if (s == "sweep") return SandOrder::Sweep;
    throw ConfigError("unknown sandpile order '" + s + "'");
}
inline SandMode parse_sand_mode(const std::string& s)
{
    if (s == "multi") return SandMode::Multi;
    if (s == "single") return SandMode::Single;
    throw ConfigError("unknown sandpile mode '" + s + "'");
}
inline VisitedMode parse_visited_mode(const std::string& s)
{
    if (s == "received") return VisitedMode::Received;
    if (s == "above-floor") return VisitedMode::AboveFloor;
    throw ConfigError("unknown visited mode '" + s + "'");
}
inline std::string to_string(SandOrder o) { return o == SandOrder::Fifo ? "fifo" : o == SandOrder::Lifo ? "lifo" : "sweep"; }
inline std::string to_string(SandMode m) { return m == SandMode::Multi ? "multi" : "single"; }
inline std::string to_string(VisitedMode v) { return v == VisitedMode::Received ? "received" : "above-floor"; }

struct SandpileOptions {
    SandOrder order = SandOrder::Fifo;
    SandMode mode = SandMode::Multi;
    std::optional<GridWindow> window;  ///< default: window_for(n, d)
    bool grow = false;
    MarginPolicy margin{};
};

inline MarginPolicy sandpile_margin(MarginPolicy m)
{
    m.bytes_per_site = 26;
    return m;
}

struct GrainField {
    GridWindow window;
    int H = 0;
    std::uint64_t n = 0;
    std::vector<std::int64_t> received;   ///< includes the n initial grains at o
    std::vector<std::int64_t> topplings;  ///< per site

    [[nodiscard]] int dim() const { return window.dim(); }
    /// received - 2d * topplings.
    [[nodiscard]] std::int64_t count(std::size_t k) const { return received[k] - 2 * dim() * topplings[k]; }
    [[nodiscard]] std::int64_t count(const Point& p) const { return window.contains(p) ? count(window.index(p)) : 0; }
    /// Grains physically present, counting pre-placed ones when H < 0.
    [[nodiscard]] std::int64_t grains(std::size_t k) const { return count(k) - std::min(H, 0); }
    [[nodiscard]] std::int64_t top(const Point& p) const { return window.contains(p) ? topplings[window.index(p)] : 0; }
    /// Grains emitted = 2d * topplings.
    [[nodiscard]] std::int64_t emitted(const Point& p) const { return 2 * dim() * top(p); }

    [[nodiscard]] Region toppled() const
    {
        Region r(window);
        for (std::size_t k = 0; k < window.size(); ++k) r.mask()[k] = topplings[k] > 0;
        return r;
    }
    [[nodiscard]] Region visited(VisitedMode mode = VisitedMode::Received) const
    {
        // received only grows, so "ever above the floor" is decided by the final value
        const std::int64_t floor = mode == VisitedMode::Received ? 0 : std::max(H, 0);
        Region r(window);
        for (std::size_t k = 0; k < window.size(); ++k) r.mask()[k] = received[k] > floor;
        return r;
    }
};

inline void check_hole_depth(int d, int H)
{
    if (H < 2 - 2 * d) throw ConfigError("hole depth H must be >= 2 - 2d (got " + std::to_string(H) + ")");
}

class SandpileEngine {
public:
    SandpileEngine(std::uint64_t n, int H, const GridWindow& w, const SandpileOptions& opt) : opt_(opt)
    {
        check_hole_depth(w.dim(), H);
        f_.window = w;
        f_.H = H;
        f_.n = n;
        f_.received.assign(w.size(), 0);
        f_.topplings.assign(w.size(), 0);
        f_.received[w.origin_index()] = static_cast<std::int64_t>(n);
        layout();
    }

    [[nodiscard]] const GrainField& field() const { return f_; }
    [[nodiscard]] std::uint64_t toppling_events() const { return events_; }

    void run()
    {
        for (;;) {
            try {
                if (opt_.order == SandOrder::Sweep) run_sweeps();
                else run_queue();
                return;
            } catch (const WindowOverflow&) {
                if (!opt_.grow) throw;
                const GridWindow to = grown(f_.window, sandpile_margin(opt_.margin));
                f_.received = remap(f_.received, f_.window, to, std::int64_t{0});
                f_.topplings = remap(f_.topplings, f_.window, to, std::int64_t{0});
                f_.window = to;
                layout();
            }
        }
    }

private:
    void layout()
    {
        const GridWindow& w = f_.window;
        boundary_ = w.boundary_mask();
        queued_.assign(w.size(), 0);
        queue_.clear();
        for (int j = 0; j < 2 * w.dim(); ++j) offset_[static_cast<std::size_t>(j)] = w.offset(Direction{j});
        lo_ = w.size();
        hi_ = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (f_.received[k] != 0) {
                lo_ = std::min(lo_, k);
                hi_ = std::max(hi_, k);
            }
            push_if_unstable(k);
        }
    }

    [[nodiscard]] bool unstable(std::size_t k) const { return f_.count(k) >= 2 * f_.dim() + f_.H; }

    void push_if_unstable(std::size_t k)
    {
        if (!queued_[k] && unstable(k)) {
            queued_[k] = 1;
            queue_.push_back(k);
        }
    }

    // Topples k as often as the mode allows; neighbors are enqueued if asked.
    void fire(std::size_t k, bool enqueue)
    {
        if (boundary_[k])
            throw WindowOverflow("sandpile reached the window boundary at " + to_string(f_.window.point(k)));
        const int two_d = 2 * f_.dim();
        const std::int64_t times = opt_.mode == SandMode::Multi ? (f_.count(k) - f_.H) / two_d : 1;
        f_.topplings[k] += times;
        ++events_;
        for (int j = 0; j < two_d; ++j) {
            const auto y = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + offset_[static_cast<std::size_t>(j)]);
            f_.received[y] += times;
            lo_ = std::min(lo_, y);
            hi_ = std::max(hi_, y);
            if (enqueue) push_if_unstable(y);
        }
    }

    void run_queue()
    {
        while (!queue_.empty()) {
            std::size_t k;
            if (opt_.order == SandOrder::Lifo) {
                k = queue_.back();
                queue_.pop_back();
            } else {
                k = queue_.front();
                queue_.pop_front();
            }
            queued_[k] = 0;
            if (!unstable(k)) continue;
            try {
                fire(k, true);
            } catch (...) {
                push_if_unstable(k);
                throw;
            }
            push_if_unstable(k);  // single mode may leave it unstable
        }
    }

    void run_sweeps()
    {
        for (;;) {
            bool any = false;
            const std::size_t lo = lo_, hi = hi_;
            for (std::size_t k = lo; k <= hi; ++k) {
                if (unstable(k)) {
                    fire(k, false);
                    any = true;
                }
            }
            if (!any) break;
        }
        queue_.clear();
        std::fill(queued_.begin(), queued_.end(), 0);
    }

    GrainField f_;
    SandpileOptions opt_;
    std::vector<std::uint8_t> boundary_;
    std::vector<std::uint8_t> queued_;
    std::deque<std::size_t> queue_;
    std::array<std::ptrdiff_t, 2 * kMaxDim> offset_{};
    std::size_t lo_ = 0, hi_ = 0;
    std::uint64_t events_ = 0;
};

struct SandpileResult {
    GrainField field;
    Region visited;  ///< S_n
    Region toppled;  ///< T_n
    std::uint64_t events = 0;
};

inline SandpileResult stabilize_sandpile(std::uint64_t n, int H, int d, const SandpileOptions& opt = {},
                                         VisitedMode visited = VisitedMode::Received)
{
    check_dimension(d);
    check_hole_depth(d, H);
    if (n < 1) throw ConfigError("sandpile: n must be >= 1");
    const GridWindow w = opt.window ? *opt.window : window_for(static_cast<double>(n), d, sandpile_margin(opt.margin));
    if (w.dim() != d) throw ConfigError("sandpile: window dimension does not match d");
    SandpileEngine e(n, H, w, opt);
    e.run();
    const GrainField& f = e.field();
    return {f, f.visited(visited), f.toppled(), e.toppling_events()};
}

// ---------------------------------------------------------------------------
// Checks

struct SandpileInvariants {
    bool conserved = false;       ///< sum of counts = n
    bool stable = false;          ///< every count < 2d + H
    bool sandwich = false;        ///< T_n in S_n in T_n + boundary
    std::int64_t total = 0;
    std::int64_t max_count = 0;
    [[nodiscard]] bool pass() const { return conserved && stable && sandwich; }
};

inline SandpileInvariants check_sandpile_invariants(const GrainField& f, const Region& visited, const Region& toppled)
{
    SandpileInvariants inv;
    inv.max_count = std::numeric_limits<std::int64_t>::min();
    for (std::size_t k = 0; k < f.window.size(); ++k) {
        inv.total += f.count(k);
        inv.max_count = std::max(inv.max_count, f.count(k));
    }
    inv.conserved = inv.total == static_cast<std::int64_t>(f.n);
    inv.stable = inv.max_count < 2 * f.dim() + f.H;
    inv.sandwich = true;
    for (const Point& p : toppled.points())
        if (!visited.contains(p)) inv.sandwich = false;
    for (const Point& p : visited.points()) {
        if (toppled.contains(p)) continue;
        bool next_to_t = false;
        for (int j = 0; j < 2 * f.dim(); ++j) next_to_t = next_to_t || toppled.contains(step(p, Direction{j}));
        if (!next_to_t) inv.sandwich = false;
    }
    return inv;
}

struct OdometerBandReport {
    std::int64_t lo = 0, hi = 0;  ///< the band [H, 2d - 1 + H]
    std::int64_t min_seen = 0, max_seen = 0;
    std::size_t sites = 0, violations = 0;
    bool pass = true;
};

/// H <= Delta u(x) + n delta_o(x) <= 2d - 1 + H on T_n, with u grains emitted.
inline OdometerBandReport check_odometer_bounds(const GrainField& f)
{
    const int d = f.dim();
    OdometerBandReport rep;
    rep.lo = f.H;
    rep.hi = 2 * d - 1 + f.H;
    rep.min_seen = std::numeric_limits<std::int64_t>::max();
    rep.max_seen = std::numeric_limits<std::int64_t>::min();
    for (std::size_t k = 0; k < f.window.size(); ++k) {
        if (f.topplings[k] == 0) continue;
        const Point x = f.window.point(k);
        // 2d Delta u = sum_y u(y) - 2d u(x) with u = 2d top, so Delta u = sum_y top(y) - 2d top(x)
        std::int64_t lap = -2 * d * f.topplings[k];
        for (int j = 0; j < 2 * d; ++j) lap += f.top(step(x, Direction{j}));
        const std::int64_t v = lap + (x.is_origin() ? static_cast<std::int64_t>(f.n) : 0);
        ++rep.sites;
        rep.min_seen = std::min(rep.min_seen, v);
        rep.max_seen = std::max(rep.max_seen, v);
        if (v < rep.lo || v > rep.hi) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

struct InternalEdgeReport {
    std::int64_t remaining = 0;       ///< sum over T of count - H
    std::int64_t internal_edges = 0;
    bool pass = false;
};

/// Grains left in T (above the hole floor) >= edges with both ends in T.
inline InternalEdgeReport check_internal_edges(const GrainField& f, const std::vector<Point>& T)
{
    const int d = f.dim();
    Region set(f.window);
    for (const Point& p : T) {
        if (f.top(p) == 0) throw ConfigError("check_internal_edges: " + to_string(p) + " never toppled");
        set.insert(p);
    }
    InternalEdgeReport rep;
    for (const Point& p : set.points()) {
        rep.remaining += f.count(p) - f.H;
        for (int i = 0; i < d; ++i)
            if (set.contains(step(p, Direction{2 * i}))) ++rep.internal_edges;
    }
    rep.pass = rep.remaining >= rep.internal_edges;
    return rep;
}

struct PathReport {
    std::size_t starts = 0;
    std::size_t failures = 0;
    std::size_t longest = 0;
    bool pass = true;
};

/// From every x in T_n with a neighbor outside T_n, following the neighbor
/// of largest odometer strictly increases u at each step and ends at o.
inline PathReport check_ascending_paths(const GrainField& f)
{
    const int d = f.dim();
    PathReport rep;
    for (std::size_t k = 0; k < f.window.size(); ++k) {
        if (f.topplings[k] == 0) continue;
        Point x = f.window.point(k);
        bool edge = false;
        for (int j = 0; j < 2 * d; ++j) edge = edge || f.top(step(x, Direction{j})) == 0;
        if (!edge) continue;
        ++rep.starts;
        std::size_t len = 0;
        while (!x.is_origin()) {
            Point best = x;
            std::int64_t bu = f.top(x);
            for (int j = 0; j < 2 * d; ++j) {
                const Point y = step(x, Direction{j});
                if (f.top(y) > bu) {
                    bu = f.top(y);
                    best = y;
                }
            }
            if (best == x) {
                ++rep.failures;
                break;
            }
            x = best;
            ++len;
        }
        rep.longest = std::max(rep.longest, len);
    }
    rep.pass = rep.failures == 0;
    return rep;
}

struct SandpileRadiiReport {
    double r = 0.0;
    double c1 = 0.0, c1_outer = 0.0;
    Radius in, out;
    double c2_meas = 0.0;        ///< c1 r - inradius(S_n)
    double c2_outer_meas = 0.0;  ///< outradius(S_n) - c1' r
    bool outer_applies = false;  ///< H >= 1 - d
};

inline SandpileRadiiReport sandpile_radii_check(const Region& visited, std::uint64_t n, int H, int d, double eps)
{
    SandpileRadiiReport rep;
    rep.r = radius_for_volume(static_cast<double>(n), d);
    rep.c1 = sandpile_c1(d, H);
    rep.outer_applies = H >= 1 - d;
    rep.c1_outer = rep.outer_applies ? sandpile_c1_outer(d, H, eps) : 0.0;
    rep.in = inradius(visited);
    rep.out = outradius(visited);
    rep.c2_meas = rep.c1 * rep.r - rep.in.value;
    rep.c2_outer_meas = rep.outer_applies ? rep.out.value - rep.c1_outer * rep.r : 0.0;
    return rep;
}

}  // namespace lgsim
