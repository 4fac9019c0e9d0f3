#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lgsim/divisible.hpp"
#include "lgsim/green.hpp"

using namespace lgsim;

namespace {

// Oracle: synchronous toppling of every unstable site on a plain array,
// repeated until stable. Shares no code with the engine.
struct Naive {
    GridWindow w;
    std::vector<double> nu, u;
};

Naive naive_stabilize(double m, int L, double eps)
{
    Naive s{GridWindow(2, L), {}, {}};
    s.nu.assign(s.w.size(), 0.0);
    s.u.assign(s.w.size(), 0.0);
    s.nu[s.w.origin_index()] = m;
    const auto side = static_cast<std::size_t>(s.w.side());
    std::vector<double> excess(s.nu.size());
    for (;;) {
        bool any = false;
        for (std::size_t k = 0; k < s.nu.size(); ++k) {
            excess[k] = s.nu[k] > 1.0 + eps ? s.nu[k] - 1.0 : 0.0;
            any = any || excess[k] > 0.0;
        }
        if (!any) return s;
        for (std::size_t k = 0; k < s.nu.size(); ++k) {
            if (excess[k] == 0.0) continue;
            s.nu[k] -= excess[k];
            s.u[k] += excess[k];
            for (std::size_t nb : {k - 1, k + 1, k - side, k + side}) s.nu[nb] += excess[k] / 4.0;
        }
    }
}

}  // namespace

TEST(Divisible, MassTwoSplitsOnce)
{
    const DivisibleResult r = stabilize(2.0, 2);
    EXPECT_DOUBLE_EQ(r.nu.at(Point{0, 0}), 1.0);
    for (const Point& p : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) EXPECT_DOUBLE_EQ(r.nu.at(p), 0.25);
    EXPECT_DOUBLE_EQ(r.u.at(Point{0, 0}), 1.0);
    EXPECT_EQ(r.topplings, 1u);
}

TEST(Divisible, MassFiveFillsThePlus)
{
    const DivisibleResult r = stabilize(5.0, 2);
    const Region D = occupied_domain(r.nu);
    EXPECT_EQ(D.count(), 5u);
    EXPECT_DOUBLE_EQ(r.u.at(Point{0, 0}), 4.0);
    EXPECT_DOUBLE_EQ(r.u.at(Point{1, 0}), 0.0);
}

TEST(Divisible, MatchesSynchronousOracle)
{
    const double m = 150.0, eps = 1e-11;
    const Naive o = naive_stabilize(m, 14, eps);
    DivisibleOptions opt;
    opt.eps_stop = eps;
    const DivisibleResult r = stabilize(m, 2, opt);
    double du = 0.0, dn = 0.0;
    for (std::size_t k = 0; k < o.w.size(); ++k) {
        const Point p = o.w.point(k);
        du = std::max(du, std::abs(o.u[k] - r.u.at(p)));
        dn = std::max(dn, std::abs(o.nu[k] - r.nu.at(p)));
    }
    EXPECT_LT(du, 1e-6);
    EXPECT_LT(dn, 1e-7);
}

TEST(Divisible, StrategiesAgree)
{
    const double m = 300.0;
    std::vector<DivisibleResult> runs;
    for (DivStrategy s : {DivStrategy::Fifo, DivStrategy::Lifo, DivStrategy::Sweep, DivStrategy::Random}) {
        DivisibleOptions opt;
        opt.strategy = s;
        opt.seed = 11;
        runs.push_back(stabilize(m, 2, opt));
    }
    const Region D = occupied_domain(runs[0].nu);
    for (std::size_t i = 1; i < runs.size(); ++i) {
        EXPECT_EQ(occupied_domain(runs[i].nu), D) << i;
        const double tol = 10.0 * 1e-10 * std::sqrt(static_cast<double>(runs[i].topplings));
        EXPECT_LE(sup_difference(runs[0].u, runs[i].u), std::max(tol, 1e-6)) << i;
    }
}

TEST(Divisible, Identities)
{
    for (double m : {37.5, 1000.0}) {
        const DivisibleResult r = stabilize(m, 2);
        EXPECT_LE(laplacian_identity_residual(r.nu, r.u, m), 1e-8 * m);
        EXPECT_LE(conservation_error(r.nu, m), 1e-12);
        const QuadraticWeight q = quadratic_weight_check(r.nu, r.u);
        EXPECT_TRUE(q.pass) << q.lhs << " vs " << q.rhs;
        for (double v : r.nu.mass) EXPECT_LE(v, 1.0 + 1e-10);
    }
}

TEST(Divisible, ThreeDimensions)
{
    const double m = 200.0;
    const DivisibleResult r = stabilize(m, 3);
    EXPECT_LE(laplacian_identity_residual(r.nu, r.u, m), 1e-8 * m);
    EXPECT_LE(conservation_error(r.nu, m), 1e-12);
    const Region D = occupied_domain(r.nu);
    EXPECT_NEAR(static_cast<double>(D.count()), m, 0.25 * m);
}

TEST(Divisible, OdometerMonotoneAcrossChunks)
{
    const double m = 400.0;
    DivisibleEngine e(MassField::point(window_for(m, 2, divisible_margin({})), m), {});
    std::vector<double> prev = e.odometer().values;
    int chunks = 0;
    while (!e.run(500)) {
        const auto& cur = e.odometer().values;
        for (std::size_t k = 0; k < cur.size(); ++k) ASSERT_GE(cur[k], prev[k]);
        prev = cur;
        ++chunks;
    }
    EXPECT_GT(chunks, 3);
    EXPECT_LE(conservation_error(e.mass(), m), 1e-12);
}

TEST(Divisible, AscendingPathsInDomain)
{
    const DivisibleResult r = stabilize(1000.0, 2);
    const DomainReport dom = classify_domain(r.nu, 1e-6);
    const AscendingReport a = ascending_path_check(dom.domain, r.u, 1e-6 + 1e-9);
    EXPECT_TRUE(a.pass) << a.violations << " worst " << a.worst_margin;
    EXPECT_GT(a.checked, 900u);
}

TEST(Divisible, ObstacleOracle)
{
    const GreenTable g = GreenTable::build(2);
    for (double m : {100.0, 1000.0}) {
        const DivisibleResult r = stabilize(m, 2);
        const ObstacleResult ob = obstacle_odometer(m, 2, r.u.window, g);
        EXPECT_LE(sup_difference(ob.u, r.u), 1e-4 * m) << m;
    }
}

TEST(Divisible, WindowOverflowAndGrowth)
{
    DivisibleOptions small;
    small.window = GridWindow(2, 4);
    EXPECT_THROW(stabilize(500.0, 2, small), WindowOverflow);
    small.grow = true;
    const DivisibleResult r = stabilize(500.0, 2, small);
    EXPECT_GT(r.nu.window.half_width(), 4);
    EXPECT_LE(conservation_error(r.nu, 500.0), 1e-12);
}

TEST(Divisible, RejectsBadConfig)
{
    EXPECT_THROW(stabilize(-1.0, 2), ConfigError);
    DivisibleOptions o;
    o.eps_stop = 0.0;
    EXPECT_THROW(stabilize(10.0, 2, o), ConfigError);
    EXPECT_THROW(parse_div_strategy("bfs"), ConfigError);
    EXPECT_THROW(stabilize(10.0, 7), ConfigError);
}

TEST(Divisible, ShapeIsRound)
{
    const double r = 20.0;
    const double m = std::numbers::pi * r * r;
    const DivisibleResult res = stabilize(m, 2);
    const Region D = occupied_domain(res.nu);
    for (const Point& p : D.points()) EXPECT_LT(p.norm(), r + 2.0);
    for (const Point& p : Region::ball(2, r - 2.0).points()) EXPECT_TRUE(D.contains(p)) << p;
}
