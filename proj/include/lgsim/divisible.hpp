#pragma once

// Divisible sandpile.
//
// Each site holds a real mass. Toppling a site with mass above 1 keeps 1 and
// sends the excess in equal parts to the 2d neighbors. Starting from a finite
// distribution mu_0 the topplings converge to a stable mass nu <= 1 and an
// odometer u (total mass emitted per site) that do not depend on the order.
// Numerically a site is toppled while its excess exceeds eps_stop.
//
// The obstacle solver computes the same odometer independently as
// u = s + gamma, s the least superharmonic majorant of -gamma on a window,
// gamma(x) = |x|^2 + m g(x).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "green.hpp"
#include "lattice.hpp"
#include "region.hpp"

namespace lgsim {

struct MassField {
    GridWindow window;
    std::vector<double> mass;
    double total = 0.0;

    MassField() = default;
    explicit MassField(const GridWindow& w) : window(w), mass(w.size(), 0.0) {}

    /// Mass m at the origin.
    static MassField point(const GridWindow& w, double m)
    {
        MassField f(w);
        f.mass[w.origin_index()] = m;
        f.total = m;
        return f;
    }

    [[nodiscard]] double at(const Point& p) const { return window.contains(p) ? mass[window.index(p)] : 0.0; }
    [[nodiscard]] double sum() const
    {
        // Neumaier summation: the total is compared at relative 1e-12
        double s = 0.0, c = 0.0;
        for (double v : mass) {
            const double t = s + v;
            c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
            s = t;
        }
        return s + c;
    }
};

/// Total mass emitted per site.
using DivOdometer = Field<double>;

/// Topples x once: the excess over 1 is split among the 2d neighbors.
inline void topple(MassField& field, const Point& x, DivOdometer& odometer)
{
    if (!field.window.interior(x)) throw WindowOverflow("topple at " + to_string(x) + " would leave the window");
    const std::size_t k = field.window.index(x);
    const double alpha = field.mass[k] - 1.0;
    if (!(alpha > 0.0)) return;
    const int d = field.window.dim();
    const double share = alpha / (2 * d);
    for (int j = 0; j < 2 * d; ++j)
        field.mass[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + field.window.offset(Direction{j}))] += share;
    field.mass[k] = 1.0;
    odometer.values[k] += alpha;
}

enum class DivStrategy { Fifo, Lifo, Sweep, Random };

inline DivStrategy parse_div_strategy(const std::string& s)
{
    if (s == "fifo") return DivStrategy::Fifo;
    if (s == "lifo") return DivStrategy::Lifo;
    if (s == "sweep") return DivStrategy::Sweep;
    if (s == "random") return DivStrategy::Random;
    throw ConfigError("unknown divisible strategy '" + s + "'");
}

inline std::string to_string(DivStrategy s)
{
    switch (s) {
    case DivStrategy::Fifo: return "fifo";
    case DivStrategy::Lifo: return "lifo";
    case DivStrategy::Sweep: return "sweep";
    case DivStrategy::Random: return "random";
    }
    return "?";
}

struct DivisibleOptions {
    double eps_stop = 1e-10;
    DivStrategy strategy = DivStrategy::Fifo;
    std::uint64_t seed = 1;                   ///< random strategy only
    std::uint64_t max_topplings = 0;          ///< 0: 2e10
    std::optional<GridWindow> window;         ///< default: window_for(m, d)
    bool grow = false;
    MarginPolicy margin{};
};

inline MarginPolicy divisible_margin(MarginPolicy m)
{
    m.bytes_per_site = 17;
    return m;
}

/// Topples until every site has mass <= 1 + eps_stop. Work can be split
/// into several run() calls; the odometer only grows between them.
class DivisibleEngine {
public:
    DivisibleEngine(MassField mu0, const DivisibleOptions& opt) : nu_(std::move(mu0)), opt_(opt), rng_(opt.seed)
    {
        if (!(opt.eps_stop > 0.0)) throw ConfigError("eps_stop must be positive");
        for (double v : nu_.mass)
            if (v < 0.0 || !std::isfinite(v)) throw ConfigError("initial mass must be finite and nonnegative");
        u_ = DivOdometer(nu_.window, 0.0);
        // Depth-first order fragments the excess into ever smaller pieces
        // bounced between neighbors, so the stack is drained against a
        // threshold lowered tenfold per pass down to eps_stop.
        threshold_ = opt_.strategy == DivStrategy::Lifo ? std::max(opt_.eps_stop, 1.0) : opt_.eps_stop;
        reset_layout();
        if (opt_.strategy != DivStrategy::Sweep) rebuild_queue();
    }

    [[nodiscard]] const MassField& mass() const { return nu_; }
    [[nodiscard]] const DivOdometer& odometer() const { return u_; }
    [[nodiscard]] std::uint64_t topplings() const { return topplings_; }
    [[nodiscard]] std::uint64_t sweeps() const { return sweeps_; }
    [[nodiscard]] bool stable() const { return stable_; }

    /// Performs at most `budget` topplings; returns true once stable.
    bool run(std::uint64_t budget = std::numeric_limits<std::uint64_t>::max())
    {
        const std::uint64_t cap = opt_.max_topplings ? opt_.max_topplings : 20'000'000'000ULL;
        while (!stable_ && budget > 0) {
            const std::uint64_t chunk = std::min<std::uint64_t>(budget, cap - std::min(cap, topplings_));
            if (chunk == 0)
                throw NonConvergence("divisible sandpile: " + std::to_string(topplings_) +
                                     " topplings without reaching eps_stop = " + std::to_string(opt_.eps_stop));
            try {
                const std::uint64_t done = opt_.strategy == DivStrategy::Sweep ? run_sweeps(chunk) : run_queue(chunk);
                budget -= std::min(budget, done);
            } catch (const WindowOverflow&) {
                if (!opt_.grow) throw;
                regrow();
            }
        }
        return stable_;
    }

private:
    void reset_layout()
    {
        const GridWindow& w = nu_.window;
        boundary_ = w.boundary_mask();
        queued_.assign(w.size(), 0);
        for (int j = 0; j < 2 * w.dim(); ++j) offset_[static_cast<std::size_t>(j)] = w.offset(Direction{j});
        lo_ = w.size();
        hi_ = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (nu_.mass[k] > 0.0) {
                lo_ = std::min(lo_, k);
                hi_ = std::max(hi_, k);
            }
        }
    }

    void rebuild_queue()
    {
        queue_.clear();
        std::fill(queued_.begin(), queued_.end(), 0);
        for (std::size_t k = 0; k < nu_.mass.size(); ++k) push_if_unstable(k);
        stable_ = queue_.empty();
    }

    void push_if_unstable(std::size_t k)
    {
        if (!queued_[k] && nu_.mass[k] > 1.0 + threshold_) {
            queued_[k] = 1;
            queue_.push_back(k);
        }
    }

    void fire(std::size_t k, bool enqueue)
    {
        if (boundary_[k])
            throw WindowOverflow("divisible sandpile reached the window boundary at " + to_string(nu_.window.point(k)));
        const int d = nu_.window.dim();
        const double alpha = nu_.mass[k] - 1.0;
        const double share = alpha / (2 * d);
        for (int j = 0; j < 2 * d; ++j) {
            const auto y = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + offset_[static_cast<std::size_t>(j)]);
            nu_.mass[y] += share;
            lo_ = std::min(lo_, y);
            hi_ = std::max(hi_, y);
            if (enqueue) push_if_unstable(y);
        }
        nu_.mass[k] = 1.0;
        u_.values[k] += alpha;
        ++topplings_;
    }

    std::uint64_t run_queue(std::uint64_t budget)
    {
        std::uint64_t done = 0;
        while (!queue_.empty() && done < budget) {
            std::size_t k;
            switch (opt_.strategy) {
            case DivStrategy::Lifo:
                k = queue_.back();
                queue_.pop_back();
                break;
            case DivStrategy::Random: {
                std::uniform_int_distribution<std::size_t> pick(0, queue_.size() - 1);
                const std::size_t i = pick(rng_);
                k = queue_[i];
                queue_[i] = queue_.back();
                queue_.pop_back();
                break;
            }
            default:
                k = queue_.front();
                queue_.pop_front();
                break;
            }
            queued_[k] = 0;
            if (nu_.mass[k] > 1.0 + threshold_) {
                try {
                    fire(k, true);
                } catch (...) {
                    push_if_unstable(k);
                    throw;
                }
                ++done;
            }
            while (queue_.empty() && threshold_ > opt_.eps_stop) {
                threshold_ = std::max(opt_.eps_stop, threshold_ / 10.0);
                rebuild_queue();
            }
        }
        stable_ = queue_.empty();
        return done;
    }

    // Raster sweeps over the span of flat indices that ever held mass.
    std::uint64_t run_sweeps(std::uint64_t budget)
    {
        std::uint64_t done = 0;
        while (done < budget) {
            std::uint64_t fired = 0;
            const std::size_t lo = lo_, hi = hi_;
            for (std::size_t k = lo; k <= hi && done < budget; ++k) {
                if (nu_.mass[k] > 1.0 + opt_.eps_stop) {
                    fire(k, false);
                    ++fired;
                    ++done;
                }
            }
            ++sweeps_;
            if (fired == 0) {
                stable_ = true;
                break;
            }
        }
        return done;
    }

    void regrow()
    {
        const GridWindow to = grown(nu_.window, divisible_margin(opt_.margin));
        nu_.mass = remap(nu_.mass, nu_.window, to, 0.0);
        nu_.window = to;
        u_.regrow(to, 0.0);
        reset_layout();
        if (opt_.strategy != DivStrategy::Sweep) rebuild_queue();
    }

    MassField nu_;
    DivOdometer u_;
    DivisibleOptions opt_;
    std::mt19937_64 rng_;
    std::vector<std::uint8_t> boundary_;
    std::vector<std::uint8_t> queued_;
    std::deque<std::size_t> queue_;
    std::array<std::ptrdiff_t, 2 * kMaxDim> offset_{};
    std::size_t lo_ = 0, hi_ = 0;
    std::uint64_t topplings_ = 0;
    std::uint64_t sweeps_ = 0;
    double threshold_ = 0.0;
    bool stable_ = false;
};

struct DivisibleResult {
    MassField nu;
    DivOdometer u;
    std::uint64_t topplings = 0;
    std::uint64_t sweeps = 0;
};

inline DivisibleResult stabilize(MassField mu0, const DivisibleOptions& opt = {})
{
    DivisibleEngine e(std::move(mu0), opt);
    e.run();
    return {e.mass(), e.odometer(), e.topplings(), e.sweeps()};
}

/// Stabilizes mass m started at the origin.
inline DivisibleResult stabilize(double m, int d, const DivisibleOptions& opt = {})
{
    check_dimension(d);
    if (!(m > 0.0)) throw ConfigError("divisible: m must be positive");
    const GridWindow w = opt.window ? *opt.window : window_for(m, d, divisible_margin(opt.margin));
    if (w.dim() != d) throw ConfigError("divisible: window dimension does not match d");
    return stabilize(MassField::point(w, m), opt);
}

// ---------------------------------------------------------------------------
// Occupied domain

struct DomainReport {
    Region domain;                    ///< nu >= 1 - eps_occ
    std::vector<Point> boundary_layer;  ///< 1 - layer <= nu < 1 - eps_occ: close to full, not counted
    double eps_occ = 1e-6;
};

inline Region occupied_domain(const MassField& nu, double eps_occ = 1e-6)
{
    Region r(nu.window);
    for (std::size_t k = 0; k < nu.mass.size(); ++k) r.mask()[k] = nu.mass[k] >= 1.0 - eps_occ ? 1 : 0;
    return r;
}

inline DomainReport classify_domain(const MassField& nu, double eps_occ = 1e-6, double layer = 1e-3)
{
    DomainReport rep{occupied_domain(nu, eps_occ), {}, eps_occ};
    for (std::size_t k = 0; k < nu.mass.size(); ++k) {
        const double v = nu.mass[k];
        if (v >= 1.0 - layer && v < 1.0 - eps_occ) rep.boundary_layer.push_back(nu.window.point(k));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Identities

namespace detail {
inline double laplacian_at(const std::vector<double>& f, const GridWindow& w, std::size_t k)
{
    const int d = w.dim();
    double s = 0.0;
    for (int j = 0; j < 2 * d; ++j) s += f[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + w.offset(Direction{j}))];
    return s / (2 * d) - f[k];
}
}  // namespace detail

/// max |nu - mu_0 - Delta u| over interior sites, for a point mass m at o.
inline double laplacian_identity_residual(const MassField& nu, const DivOdometer& u, double m)
{
    const GridWindow& w = nu.window;
    double worst = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Point x = w.point(k);
        if (!w.interior(x)) continue;
        const double mu0 = x.is_origin() ? m : 0.0;
        worst = std::max(worst, std::abs(nu.mass[k] - mu0 - detail::laplacian_at(u.values, w, k)));
    }
    return worst;
}

/// |sum nu - m| / m.
inline double conservation_error(const MassField& nu, double m) { return std::abs(nu.sum() - m) / m; }

struct QuadraticWeight {
    double lhs = 0.0;  ///< sum nu(x) |x|^2
    double rhs = 0.0;  ///< sum u(x)
    bool pass = false;
};

/// For a point source at o: sum nu |x|^2 = sum u.
inline QuadraticWeight quadratic_weight_check(const MassField& nu, const DivOdometer& u)
{
    QuadraticWeight q;
    for (std::size_t k = 0; k < nu.mass.size(); ++k) q.lhs += nu.mass[k] * static_cast<double>(nu.window.point(k).norm2());
    for (double v : u.values) q.rhs += v;
    q.pass = std::abs(q.lhs - q.rhs) <= 1e-6 * std::max(1.0, q.rhs);
    return q;
}

struct AscendingReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();  ///< min over x of max_y u(y) - u(x) - 1
    bool pass = true;
};

/// Every x in D \ {o} has a neighbor y with u(y) >= u(x) + 1 - tol.
inline AscendingReport ascending_path_check(const Region& domain, const DivOdometer& u, double tol)
{
    AscendingReport rep;
    const GridWindow& w = u.window;
    for (const Point& x : domain.points()) {
        if (x.is_origin()) continue;
        ++rep.checked;
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < 2 * w.dim(); ++j) best = std::max(best, u.at(step(x, Direction{j})));
        const double margin = best - u.at(x) - 1.0;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -tol) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

/// sup over the union of both windows of |a - b| (missing sites read as 0).
inline double sup_difference(const Field<double>& a, const Field<double>& b)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        worst = std::max(worst, std::abs(a.values[k] - b.at(a.window.point(k))));
    for (std::size_t k = 0; k < b.values.size(); ++k) {
        const Point p = b.window.point(k);
        if (!a.window.contains(p)) worst = std::max(worst, std::abs(b.values[k]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Obstacle problem

struct ObstacleOptions {
    double tol = 1e-11;           ///< stop when a sweep changes s by less than tol * max(1, m)
    double omega = 0.0;           ///< over-relaxation; 0 picks 2 / (1 + sin(pi / side))
    std::uint64_t max_sweeps = 200000;
};

struct ObstacleResult {
    DivOdometer u;
    std::uint64_t sweeps = 0;
    double last_change = 0.0;
};

/// Odometer of mass m at the origin as s + gamma, with s the least
/// superharmonic majorant of -gamma on `window` (s = -gamma on its boundary),
/// computed by projected SOR.
inline ObstacleResult obstacle_odometer(double m, int d, const GridWindow& window, const GreenTable& table,
                                        const ObstacleOptions& opt = {})
{
    check_dimension(d);
    if (window.dim() != d || table.dim() != d) throw ConfigError("obstacle: dimension mismatch");
    if (!(m > 0.0)) throw ConfigError("obstacle: m must be positive");
    const GammaFunction gam(GammaParams::gamma(d, m), table);
    const std::size_t n = window.size();
    std::vector<double> obst(n), s(n);
    std::vector<std::uint8_t> interior(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Point x = window.point(k);
        obst[k] = -gam(x);
        s[k] = obst[k];
        interior[k] = window.interior(x) ? 1 : 0;
    }
    std::array<std::ptrdiff_t, 2 * kMaxDim> off{};
    for (int j = 0; j < 2 * d; ++j) off[static_cast<std::size_t>(j)] = window.offset(Direction{j});
    const double omega =
        opt.omega > 0.0 ? opt.omega : 2.0 / (1.0 + std::sin(std::numbers::pi / static_cast<double>(window.side())));
    const double inv = 1.0 / (2 * d);
    const double stop = opt.tol * std::max(1.0, m);

    ObstacleResult res;
    for (;;) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!interior[k]) continue;
            double avg = 0.0;
            for (int j = 0; j < 2 * d; ++j) avg += s[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + off[static_cast<std::size_t>(j)])];
            avg *= inv;
            const double next = std::max(obst[k], s[k] + omega * (avg - s[k]));
            change = std::max(change, std::abs(next - s[k]));
            s[k] = next;
        }
        ++res.sweeps;
        res.last_change = change;
        if (change < stop) break;
        if (res.sweeps >= opt.max_sweeps)
            throw NonConvergence("obstacle solver: change " + std::to_string(change) + " after " +
                                 std::to_string(res.sweeps) + " sweeps");
    }

    res.u = DivOdometer(window, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = s[k] - obst[k];
        res.u.values[k] = v < 1e-12 ? 0.0 : v;
    }
    return res;
}

}  // namespace lgsim
