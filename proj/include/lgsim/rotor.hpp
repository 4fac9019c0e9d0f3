#pragma once

// Rotor-router aggregation.
//
// Particles start one at a time at the origin. At each step the rotor at the
// particle's site is advanced to the next direction of the cyclic order and
// the particle moves that way; it stops at the first unoccupied site. The
// engine records, per site, the number of exits (the odometer) and, per
// positive-axis edge, the net number of crossings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "region.hpp"
#include "snapshot.hpp"

namespace lgsim {

/// How the rotor of a site is set before any particle visits it.
class RotorInit {
public:
    enum class Kind { Uniform, Random, Table };

    static RotorInit uniform(int dir) { return RotorInit(Kind::Uniform, dir, 0, {}); }
    static RotorInit random(std::uint64_t seed) { return RotorInit(Kind::Random, 0, seed, {}); }
    /// Explicit per-site table; sites outside it take `fallback`.
    static RotorInit table(Field<std::int8_t> table, int fallback)
    {
        return RotorInit(Kind::Table, fallback, 0, std::move(table));
    }

    /// "north", "east", "south", "west", "uniform:<dir>", "random:<seed>".
    /// ("file:<path>" is handled by the caller, which owns I/O.)
    static RotorInit parse(const std::string& text, int d)
    {
        if (text == "north" || text == "east" || text == "south" || text == "west") {
            if (d != 2) throw ConfigError("compass rotor init requires d = 2");
            const int dir = text == "north" ? dir2::N : text == "east" ? dir2::E : text == "south" ? dir2::S : dir2::W;
            return uniform(dir);
        }
        if (text.rfind("uniform:", 0) == 0) {
            const int dir = std::stoi(text.substr(8));
            if (dir < 0 || dir >= 2 * d) throw ConfigError("uniform rotor direction out of range");
            return uniform(dir);
        }
        if (text.rfind("random:", 0) == 0) return random(std::stoull(text.substr(7)));
        throw ConfigError("unknown rotor init '" + text + "'");
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] int fallback() const { return dir_; }

    /// Initial direction at p. Random rotors hash (seed, p), so the state of
    /// a site does not depend on the window it is allocated in.
    [[nodiscard]] int initial(const Point& p, int d) const
    {
        switch (kind_) {
        case Kind::Uniform: return dir_;
        case Kind::Random: {
            std::uint64_t h = seed_ ^ 0x9e3779b97f4a7c15ULL;
            for (int i = 0; i < p.d; ++i) h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(p[i])));
            return static_cast<int>(mix(h) % static_cast<std::uint64_t>(2 * d));
        }
        case Kind::Table: {
            if (table_.window.contains(p)) {
                const int v = table_.values[table_.window.index(p)];
                if (v >= 0 && v < 2 * d) return v;
            }
            return dir_;
        }
        }
        return dir_;
    }

    [[nodiscard]] std::string describe() const
    {
        switch (kind_) {
        case Kind::Uniform: return "uniform:" + std::to_string(dir_);
        case Kind::Random: return "random:" + std::to_string(seed_);
        case Kind::Table: return "table";
        }
        return "?";
    }

private:
    RotorInit(Kind k, int dir, std::uint64_t seed, Field<std::int8_t> table)
        : kind_(k), dir_(dir), seed_(seed), table_(std::move(table))
    {
    }

    static std::uint64_t mix(std::uint64_t z)
    {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    Kind kind_ = Kind::Uniform;
    int dir_ = 0;
    std::uint64_t seed_ = 0;
    Field<std::int8_t> table_;
};

/// Rotor direction per site together with the order rotors cycle through.
struct RotorField {
    GridWindow window;
    CyclicOrder order;
    std::vector<std::uint8_t> rotor;

    RotorField() = default;
    RotorField(const GridWindow& w, const CyclicOrder& ord, const RotorInit& init) : window(w), order(ord), rotor(w.size())
    {
        if (ord.dim() != w.dim()) throw ConfigError("RotorField: order dimension mismatch");
        for (std::size_t k = 0; k < w.size(); ++k)
            rotor[k] = static_cast<std::uint8_t>(init.initial(w.point(k), w.dim()));
    }

    [[nodiscard]] int at(const Point& p) const { return rotor[window.checked_index(p)]; }
};

/// Exits per site.
using RotorOdometer = Field<std::uint64_t>;

/// Net crossings kappa(x, x + e_i), stored as d integers per site.
struct EdgeFlux {
    GridWindow window;
    std::vector<std::int64_t> net;

    EdgeFlux() = default;
    explicit EdgeFlux(const GridWindow& w) : window(w), net(w.size() * static_cast<std::size_t>(w.dim()), 0) {}

    /// kappa(x, x + s e_i) for a unit step; zero outside the window.
    [[nodiscard]] std::int64_t kappa(const Point& x, Direction dir) const
    {
        const int d = window.dim();
        if (dir.sign() > 0) {
            if (!window.contains(x)) return 0;
            return net[window.index(x) * static_cast<std::size_t>(d) + static_cast<std::size_t>(dir.axis())];
        }
        const Point y = step(x, dir);
        if (!window.contains(y)) return 0;
        return -net[window.index(y) * static_cast<std::size_t>(d) + static_cast<std::size_t>(dir.axis())];
    }

    /// sum_y kappa(x, y) over the 2d neighbors.
    [[nodiscard]] std::int64_t divergence(const Point& x) const
    {
        std::int64_t s = 0;
        for (int j = 0; j < 2 * window.dim(); ++j) s += kappa(x, Direction{j});
        return s;
    }
};

struct RotorOptions {
    CyclicOrder order = CyclicOrder::standard(2);
    RotorInit init = RotorInit::uniform(dir2::N);
    std::optional<GridWindow> window;  ///< default: window_for(n, d)
    bool grow = false;                 ///< regrow on overflow instead of failing
    unsigned walkers = 1;              ///< particles in flight at once; 1 walks them one by one
    MarginPolicy margin{};
};

/// State machine for rotor-router walks on a window, specialised on the
/// dimension so one site record (state word + d flux counters) fits in a
/// single cache line. An optional sink shell S_rho stops particles on
/// arrival.
template <int D>
class BasicRotorEngine {
public:
    BasicRotorEngine(const GridWindow& window, const CyclicOrder& order, const RotorInit& init, bool grow = false,
                     MarginPolicy margin = {})
        : order_(order), init_(init), grow_(grow), margin_(margin)
    {
        if (window.dim() != D || order.dim() != D) throw ConfigError("rotor engine dimension mismatch");
        allocate(window);
    }

    [[nodiscard]] const GridWindow& window() const { return window_; }
    [[nodiscard]] std::uint64_t occupied_count() const { return occupied_; }
    [[nodiscard]] std::uint64_t steps() const { return steps_; }

    /// Turns the shell rho <= |x| < rho + 1 into a sink, or removes the sink.
    void set_sink(std::optional<std::int64_t> rho)
    {
        sink_rho_ = rho;
        for (std::size_t k = 0; k < window_.size(); ++k) {
            std::uint64_t& w = sites_[k].word;
            w &= ~kSink;
            if (rho && in_shell(window_.point(k), *rho)) w |= kSink;
        }
        if (rho && frozen_.empty()) frozen_.assign(window_.size(), 0);
    }

    /// Releases `count` particles at the origin; each walks until it stops.
    /// `walkers` > 1 interleaves that many particles (same final state).
    void add_particles(std::uint64_t count, unsigned walkers = 1)
    {
        drive(Point::origin(D), count, walkers);
    }

    /// Releases `count` particles at `site`.
    void release(const Point& site, std::uint64_t count, unsigned walkers = 1) { drive(site, count, walkers); }

    void occupy(const Point& site)
    {
        std::uint64_t& w = sites_[window_.checked_index(site)].word;
        if (!(w & kOccupied)) {
            w |= kOccupied;
            ++occupied_;
        }
    }

    /// Particles frozen on the sink shell, per site; clears them.
    std::map<Point, std::uint64_t> take_frozen()
    {
        std::map<Point, std::uint64_t> out;
        for (std::size_t k = 0; k < frozen_.size(); ++k) {
            if (frozen_[k]) {
                out[window_.point(k)] = frozen_[k];
                frozen_[k] = 0;
            }
        }
        return out;
    }

    [[nodiscard]] Region occupied() const
    {
        Region r(window_);
        for (std::size_t k = 0; k < window_.size(); ++k) r.mask()[k] = (sites_[k].word & kOccupied) ? 1 : 0;
        return r;
    }

    [[nodiscard]] RotorField rotors() const
    {
        RotorField f;
        f.window = window_;
        f.order = order_;
        f.rotor.resize(window_.size());
        for (std::size_t k = 0; k < window_.size(); ++k) f.rotor[k] = static_cast<std::uint8_t>(sites_[k].word & kRotorMask);
        return f;
    }

    [[nodiscard]] RotorField initial_rotors() const
    {
        RotorField f;
        f.window = window_;
        f.order = order_;
        f.rotor.resize(window_.size());
        for (std::size_t k = 0; k < window_.size(); ++k) f.rotor[k] = static_cast<std::uint8_t>(init_.initial(window_.point(k), D));
        return f;
    }

    [[nodiscard]] RotorOdometer odometer() const
    {
        RotorOdometer u(window_);
        for (std::size_t k = 0; k < window_.size(); ++k) u.values[k] = sites_[k].word >> kExitShift;
        return u;
    }

    [[nodiscard]] EdgeFlux flux() const
    {
        EdgeFlux f(window_);
        for (std::size_t k = 0; k < window_.size(); ++k)
            for (int i = 0; i < D; ++i)
                f.net[k * D + static_cast<std::size_t>(i)] = sites_[k].flux[static_cast<std::size_t>(i)];
        return f;
    }

private:
    // state word: bits 0-2 rotor direction, 3 occupied, 4 boundary, 5 sink,
    // bits 8.. exit count
    static constexpr std::uint64_t kRotorMask = 7;
    static constexpr std::uint64_t kOccupied = 8;
    static constexpr std::uint64_t kBoundary = 16;
    static constexpr std::uint64_t kSink = 32;
    static constexpr std::uint64_t kFlagMask = kOccupied | kBoundary | kSink;
    static constexpr int kExitShift = 8;
    static constexpr std::uint64_t kMaxExits = (std::uint64_t{1} << 31) - 1;
    static constexpr unsigned kMaxWalkers = 64;

    struct Site {
        std::uint64_t word = 0;
        std::array<std::int32_t, D> flux{};
    };

    void allocate(const GridWindow& w)
    {
        window_ = w;
        sites_.assign(w.size(), Site{});
        for (std::size_t k = 0; k < w.size(); ++k) {
            const Point p = w.point(k);
            std::uint64_t word = static_cast<std::uint64_t>(init_.initial(p, D));
            if (!w.interior(p)) word |= kBoundary;
            if (sink_rho_ && in_shell(p, *sink_rho_)) word |= kSink;
            sites_[k].word = word;
        }
        for (int j = 0; j < 2 * D; ++j) {
            next_[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(order_.next(j));
            offset_[static_cast<std::size_t>(j)] = window_.offset(Direction{j});
            flux_site_[static_cast<std::size_t>(j)] = (j & 1) ? offset_[static_cast<std::size_t>(j)] : 0;
            flux_sign_[static_cast<std::size_t>(j)] = (j & 1) ? -1 : 1;
        }
    }

    void regrow()
    {
        const GridWindow old = window_;
        std::vector<Site> prev = std::move(sites_);
        std::vector<std::uint64_t> prev_frozen = std::move(frozen_);
        allocate(grown(old, margin_));
        if (!prev_frozen.empty()) frozen_.assign(window_.size(), 0);
        for (std::size_t k = 0; k < old.size(); ++k) {
            const std::size_t n = window_.index(old.point(k));
            const std::uint64_t keep = sites_[n].word & (kBoundary | kSink);
            sites_[n] = prev[k];
            sites_[n].word = (prev[k].word & ~(kBoundary | kSink)) | keep;
            if (!prev_frozen.empty()) frozen_[n] = prev_frozen[k];
        }
    }

    // Walks `count` particles released at `start`, keeping up to `walkers`
    // of them in flight and advancing them round-robin one step at a time.
    // Every interleaving is a legal routing order, so by the abelian
    // property the final state does not depend on `walkers`; with more than
    // one walker the independent memory chains overlap.
    void drive(const Point& start_point, std::uint64_t count, unsigned walkers)
    {
        if (count == 0) return;
        walkers = std::max(1u, walkers);
        walkers = std::min(walkers, kMaxWalkers);
        std::size_t start = window_.checked_index(start_point);
        std::size_t pos[kMaxWalkers];
        unsigned active = 0;
        std::uint64_t started = 0;
        while (started < count && active < walkers) {
            pos[active++] = start;
            ++started;
        }
        Site* sites = sites_.data();
        std::uint64_t next[2 * D];
        std::ptrdiff_t offset[2 * D];
        std::ptrdiff_t flux_site[2 * D];
        std::int32_t flux_sign[2 * D];
        const auto load_tables = [&] {
            for (std::size_t j = 0; j < 2 * D; ++j) {
                next[j] = next_[j];
                offset[j] = offset_[j];
                flux_site[j] = flux_site_[j];
                flux_sign[j] = flux_sign_[j];
            }
        };
        load_tables();
        std::uint64_t steps = 0;
        while (active > 0) {
            for (unsigned i = 0; i < active;) {
                const std::size_t x = pos[i];
                const std::uint64_t w = sites[x].word;
                if ((w & kFlagMask) == kOccupied) [[likely]] {
                    const std::uint64_t r = next[w & kRotorMask];
                    sites[x].word = ((w & ~kRotorMask) | r) + (std::uint64_t{1} << kExitShift);
                    ++steps;
                    // a negative step is recorded on the positive edge of the target
                    sites[static_cast<std::ptrdiff_t>(x) + flux_site[r]].flux[r >> 1] += flux_sign[r];
                    pos[i] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + offset[r]);
                    ++i;
                    continue;
                }
                if ((w & kSink) || !(w & kOccupied)) {
                    if (w & kSink) {
                        ++frozen_[x];
                    } else {
                        sites[x].word = w | kOccupied;
                        ++occupied_;
                    }
                    if (started < count) {
                        pos[i] = start;
                        ++started;
                        ++i;
                    } else {
                        pos[i] = pos[--active];
                    }
                    continue;
                }
                // occupied boundary site: the next step would leave the window
                steps_ += steps;
                steps = 0;
                if (!grow_)
                    throw WindowOverflow("rotor walk reached the window boundary at " + to_string(window_.point(x)));
                const GridWindow old = window_;
                regrow();
                for (unsigned j = 0; j < active; ++j) pos[j] = window_.index(old.point(pos[j]));
                start = window_.index(start_point);
                sites = sites_.data();
                load_tables();
            }
        }
        steps_ += steps;
    }

public:
    /// Largest exit count; flux counters are 32-bit and bounded by exits/2d + 1.
    [[nodiscard]] std::uint64_t max_exits() const
    {
        std::uint64_t m = 0;
        for (const auto& s : sites_) m = std::max(m, s.word >> kExitShift);
        return m;
    }
    [[nodiscard]] bool counters_safe() const { return max_exits() <= kMaxExits; }

private:
    CyclicOrder order_;
    RotorInit init_;
    bool grow_ = false;
    MarginPolicy margin_{};
    GridWindow window_;
    std::vector<Site> sites_;
    std::vector<std::uint64_t> frozen_;
    std::array<std::uint64_t, 2 * D> next_{};
    std::array<std::ptrdiff_t, 2 * D> offset_{};
    std::array<std::ptrdiff_t, 2 * D> flux_site_{};
    std::array<std::int32_t, 2 * D> flux_sign_{};
    std::optional<std::int64_t> sink_rho_;
    std::uint64_t occupied_ = 0;
    std::uint64_t steps_ = 0;
};

struct RotorResult {
    Region occupied;
    RotorField initial;
    RotorField rotors;
    RotorOdometer odometer;
    EdgeFlux flux;
    std::uint64_t steps = 0;
};

inline MarginPolicy rotor_margin(MarginPolicy m)
{
    m.bytes_per_site = 24;
    return m;
}

/// Calls fn(engine) with a BasicRotorEngine of the runtime dimension.
template <class Fn>
decltype(auto) with_rotor_engine(const GridWindow& w, const RotorOptions& opt, Fn&& fn)
{
    const MarginPolicy margin = rotor_margin(opt.margin);
    switch (w.dim()) {
    case 2: { BasicRotorEngine<2> e(w, opt.order, opt.init, opt.grow, margin); return fn(e); }
    case 3: { BasicRotorEngine<3> e(w, opt.order, opt.init, opt.grow, margin); return fn(e); }
    case 4: { BasicRotorEngine<4> e(w, opt.order, opt.init, opt.grow, margin); return fn(e); }
    default: throw ConfigError("rotor engine: unsupported dimension");
    }
}

template <int D>
RotorResult collect(const BasicRotorEngine<D>& e)
{
    if (!e.counters_safe()) throw WindowOverflow("rotor flux counters would overflow 32 bits");
    return RotorResult{e.occupied(), e.initial_rotors(), e.rotors(), e.odometer(), e.flux(), e.steps()};
}

inline void check_rotor_options(int d, const RotorOptions& opt)
{
    check_dimension(d);
    if (opt.order.dim() != d) throw ConfigError("rotor order dimension does not match d");
    if (opt.window && opt.window->dim() != d) throw ConfigError("rotor window dimension does not match d");
}

/// Rotor-router aggregation of n particles started at the origin, walked
/// one particle at a time.
inline RotorResult aggregate(std::uint64_t n, int d, const RotorOptions& opt = {})
{
    check_rotor_options(d, opt);
    if (n < 1) throw ConfigError("aggregate: n must be >= 1");
    const GridWindow w = opt.window ? *opt.window : window_for(static_cast<double>(n), d, rotor_margin(opt.margin));
    return with_rotor_engine(w, opt, [n, &opt](auto& engine) {
        engine.add_particles(n, opt.walkers);
        return collect(engine);
    });
}

// ---------------------------------------------------------------------------
// Shell-stopped staging

struct StagedResult {
    Region occupied;
    RotorField rotors;
    std::uint64_t n_rho = 0;                  ///< particles that reached S_rho
    std::uint64_t n_rho_h = 0;                ///< particles that reached S_{rho+h}
    std::map<Point, std::uint64_t> at_outer;  ///< per-site counts on S_{rho+h}
};

enum class ReleaseOrder { Forward, Reverse };

/// Runs aggregation with particles frozen on S_rho, then lets the extra
/// frozen particles continue until they find an unoccupied site or reach
/// S_{rho+h}. Frozen sites are released in lexicographic order (or its
/// reverse).
inline StagedResult aggregate_staged(std::uint64_t n, int d, std::int64_t rho, std::int64_t h,
                                     const RotorOptions& opt = {}, ReleaseOrder release = ReleaseOrder::Forward)
{
    check_rotor_options(d, opt);
    if (n < 1) throw ConfigError("aggregate_staged: n must be >= 1");
    if (h < 1) throw ConfigError("aggregate_staged: h must be >= 1");
    const double r = radius_for_volume(static_cast<double>(n), d);
    if (static_cast<double>(rho) < std::ceil(r - 1e-12)) throw ConfigError("aggregate_staged: rho must be >= ceil(r)");
    GridWindow w = opt.window ? *opt.window : window_for(static_cast<double>(n), d, rotor_margin(opt.margin));
    if (w.half_width() <= rho + h + 1) w = GridWindow(d, static_cast<std::int32_t>(rho + h + 2));

    return with_rotor_engine(w, opt, [&](auto& engine) {
        engine.set_sink(rho);
        engine.add_particles(n, opt.walkers);
        auto frozen = engine.take_frozen();
        StagedResult out;
        for (const auto& [p, c] : frozen) out.n_rho += c;

        engine.set_sink(rho + h);
        std::vector<std::pair<Point, std::uint64_t>> queue(frozen.begin(), frozen.end());
        if (release == ReleaseOrder::Reverse) std::reverse(queue.begin(), queue.end());
        // one particle settles on each shell site it reached; the rest move on
        for (const auto& [p, c] : queue) engine.occupy(p);
        for (const auto& [p, c] : queue)
            if (c > 1) engine.release(p, c - 1, opt.walkers);

        out.at_outer = engine.take_frozen();
        for (const auto& [p, c] : out.at_outer) out.n_rho_h += c;
        out.occupied = engine.occupied();
        out.rotors = engine.rotors();
        return out;
    });
}

/// Direct aggregation in which S_rho is a sink.
inline StagedResult aggregate_stopped(std::uint64_t n, int d, std::int64_t rho, const RotorOptions& opt = {})
{
    check_rotor_options(d, opt);
    GridWindow w = opt.window ? *opt.window : window_for(static_cast<double>(n), d, rotor_margin(opt.margin));
    if (w.half_width() <= rho + 1) w = GridWindow(d, static_cast<std::int32_t>(rho + 2));
    return with_rotor_engine(w, opt, [&](auto& engine) {
        engine.set_sink(rho);
        engine.add_particles(n, opt.walkers);
        StagedResult out;
        out.at_outer = engine.take_frozen();
        for (const auto& [p, c] : out.at_outer) out.n_rho_h += c;
        out.n_rho = out.n_rho_h;
        out.occupied = engine.occupied();
        out.rotors = engine.rotors();
        return out;
    });
}

// ---------------------------------------------------------------------------
// Flow checks

struct FlowReport {
    std::int64_t max_abs_r = 0;
    Point worst_edge_from{};
    std::int64_t bound = 0;  ///< 4d - 2
    bool pass = true;
};

/// R(x,y) = u(y) - u(x) + 2d kappa(x,y) over every window edge.
inline FlowReport check_odometer_flow(const RotorOdometer& u, const EdgeFlux& flux)
{
    const GridWindow& w = u.window;
    const int d = w.dim();
    FlowReport rep;
    rep.bound = 4 * d - 2;
    rep.worst_edge_from = Point::origin(d);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Point x = w.point(k);
        for (int i = 0; i < d; ++i) {
            if (x[i] == w.half_width()) continue;
            const std::size_t ky = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + w.offset(Direction{2 * i}));
            const auto uy = static_cast<std::int64_t>(u.values[ky]);
            const auto ux = static_cast<std::int64_t>(u.values[k]);
            const std::int64_t R = uy - ux + 2 * d * flux.net[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
            if (std::abs(R) > rep.max_abs_r) {
                rep.max_abs_r = std::abs(R);
                rep.worst_edge_from = x;
            }
        }
    }
    rep.pass = rep.max_abs_r <= rep.bound;
    return rep;
}

struct DivergenceReport {
    std::int64_t at_origin = 0;
    std::size_t violations = 0;  ///< sites x != o whose divergence is not -1[x in A]
    bool pass = true;
};

/// sum_y kappa(o,y) = n - 1; for x != o it is -1 on A_n and 0 elsewhere.
inline DivergenceReport check_flux_divergence(const EdgeFlux& flux, const Region& occupied, std::uint64_t n)
{
    DivergenceReport rep;
    const GridWindow& w = flux.window;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Point x = w.point(k);
        const std::int64_t div = flux.divergence(x);
        if (x.is_origin()) {
            rep.at_origin = div;
            continue;
        }
        const std::int64_t expect = occupied.contains(x) ? -1 : 0;
        if (div != expect) ++rep.violations;
    }
    rep.pass = rep.violations == 0 && rep.at_origin == static_cast<std::int64_t>(n) - 1;
    return rep;
}

/// Exits from a site whose rotor started at `initial` along `dir` after
/// `exits` total exits.
inline std::uint64_t exits_along(const CyclicOrder& order, int initial, std::uint64_t exits, int dir)
{
    const int n = order.size();
    int k = order.position(dir) - order.position(initial);
    if (k <= 0) k += n;  // the rotor advances before the first exit
    if (exits < static_cast<std::uint64_t>(k)) return 0;
    return (exits - static_cast<std::uint64_t>(k)) / static_cast<std::uint64_t>(n) + 1;
}

/// Final rotor equals the initial rotor advanced once per exit.
inline std::size_t rotor_consistency_violations(const RotorResult& res)
{
    std::size_t bad = 0;
    const CyclicOrder& order = res.rotors.order;
    for (std::size_t k = 0; k < res.rotors.rotor.size(); ++k)
        if (order.advance(res.initial.rotor[k], res.odometer.values[k]) != res.rotors.rotor[k]) ++bad;
    return bad;
}

/// Sites where some direction carried a number of exits more than 1 away
/// from exits / 2d.
inline std::size_t exit_balance_violations(const RotorResult& res)
{
    std::size_t bad = 0;
    const CyclicOrder& order = res.rotors.order;
    const int n = order.size();
    for (std::size_t k = 0; k < res.odometer.values.size(); ++k) {
        const std::uint64_t u = res.odometer.values[k];
        if (u == 0) continue;
        for (int j = 0; j < n; ++j) {
            const auto e = static_cast<double>(exits_along(order, res.initial.rotor[k], u, j));
            if (std::abs(e - static_cast<double>(u) / n) > 1.0) {
                ++bad;
                break;
            }
        }
    }
    return bad;
}

}  // namespace lgsim
