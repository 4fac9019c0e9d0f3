#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "lgsim/lattice.hpp"
#include "lgsim/region.hpp"
#include "lgsim/snapshot.hpp"

using namespace lgsim;

TEST(Point, NormAndOrigin)
{
    EXPECT_EQ((Point{3, 4}).norm2(), 25);
    EXPECT_DOUBLE_EQ((Point{3, 4}).norm(), 5.0);
    EXPECT_TRUE(Point::origin(3).is_origin());
    EXPECT_EQ(Point::axis(2, 1, -2), (Point{0, -2}));
    EXPECT_THROW((Point{1, 2, 3, 4, 5}), ConfigError);
}

TEST(Neighbors, AlwaysTwoDUnitSteps)
{
    for (int d = 2; d <= 4; ++d) {
        Point p(d);
        for (int i = 0; i < d; ++i) p[i] = 3 * i - 2;
        const auto nb = neighbors(p);
        ASSERT_EQ(static_cast<int>(nb.size()), 2 * d);
        std::set<Point> distinct(nb.begin(), nb.end());
        EXPECT_EQ(static_cast<int>(distinct.size()), 2 * d);
        for (const Point& q : nb) EXPECT_EQ((q - p).norm2(), 1);
    }
}

TEST(Neighbors, ClockwiseFromNorth)
{
    const auto nb = neighbors(Point{0, 0});
    EXPECT_EQ(nb[0], (Point{0, 1}));
    EXPECT_EQ(nb[1], (Point{1, 0}));
    EXPECT_EQ(nb[2], (Point{0, -1}));
    EXPECT_EQ(nb[3], (Point{-1, 0}));
}

TEST(CyclicOrder, ParseAndAdvance)
{
    const CyclicOrder o = CyclicOrder::parse("NESW", 2);
    EXPECT_EQ(o, CyclicOrder::standard(2));
    EXPECT_EQ(o.next(dir2::N), dir2::E);
    EXPECT_EQ(o.next(dir2::W), dir2::N);
    EXPECT_EQ(o.advance(dir2::N, 6), dir2::S);
    EXPECT_EQ(o.to_string(), "NESW");
    EXPECT_EQ(CyclicOrder::parse("2,0,3,1", 2), o);
    EXPECT_THROW(CyclicOrder::parse("NNSW", 2), ConfigError);
    EXPECT_THROW(CyclicOrder::parse("NES", 2), ConfigError);
    EXPECT_THROW(CyclicOrder::parse("NESW", 3), ConfigError);
}

TEST(CyclicOrder, AdvanceMatchesRepeatedNext)
{
    std::mt19937_64 rng(7);
    for (int d = 2; d <= 4; ++d) {
        std::vector<int> perm(static_cast<std::size_t>(2 * d));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const CyclicOrder o(perm);
        for (int start = 0; start < 2 * d; ++start) {
            int dir = start;
            for (std::uint64_t k = 0; k < 20; ++k) {
                EXPECT_EQ(o.advance(start, k), dir);
                dir = o.next(dir);
            }
        }
    }
}

TEST(GridWindow, IndexPointRoundTrip)
{
    for (int d = 2; d <= 4; ++d) {
        const GridWindow w(d, 3);
        EXPECT_EQ(w.size(), static_cast<std::size_t>(std::pow(7, d)));
        EXPECT_TRUE(w.point(w.origin_index()).is_origin());
        for (std::size_t k = 0; k < w.size(); ++k) {
            const Point p = w.point(k);
            ASSERT_TRUE(w.contains(p));
            ASSERT_EQ(w.index(p), k);
        }
    }
}

TEST(GridWindow, OffsetsAgreeWithSteps)
{
    const GridWindow w(3, 4);
    const Point p{1, -2, 3};
    for (int dir = 0; dir < 6; ++dir) {
        const Point q = step(p, Direction{dir});
        EXPECT_EQ(static_cast<std::ptrdiff_t>(w.index(q)) - static_cast<std::ptrdiff_t>(w.index(p)),
                  w.offset(Direction{dir}));
    }
}

TEST(GridWindow, OutsideThrowsOverflow)
{
    const GridWindow w(2, 2);
    EXPECT_THROW(static_cast<void>(w.checked_index(Point{3, 0})), WindowOverflow);
    Field<int> f(w);
    EXPECT_THROW(f.at(Point{0, -3}) = 1, WindowOverflow);
    EXPECT_EQ(std::as_const(f).at(Point{0, -3}), 0);
}

TEST(GridWindow, RemapKeepsValues)
{
    Field<int> f(GridWindow(2, 2));
    f.at(Point{2, -1}) = 5;
    f.at(Point{0, 0}) = 7;
    f.regrow(GridWindow(2, 6));
    EXPECT_EQ(f.at(Point{2, -1}), 5);
    EXPECT_EQ(f.at(Point{0, 0}), 7);
    EXPECT_EQ(f.at(Point{6, 6}), 0);
}

TEST(Balls, MembershipIsStrict)
{
    EXPECT_TRUE(in_ball(Point{2, 0}, 2.01));
    EXPECT_FALSE(in_ball(Point{2, 0}, 2.0));
    EXPECT_FALSE(in_ball(Point{0, 0}, 0.0));
    EXPECT_TRUE(in_shell(Point{3, 4}, 5));
    EXPECT_FALSE(in_shell(Point{3, 4}, 4));
}

TEST(Balls, CountTracksVolume)
{
    const Region b = Region::ball(2, 100.0);
    const double vol = std::numbers::pi * 1e4;
    EXPECT_LT(std::abs(static_cast<double>(b.count()) - vol), 4.0 * 100.0);
    EXPECT_NEAR(radius_for_volume(unit_ball_volume(3) * 27.0, 3), 3.0, 1e-12);
    EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
    EXPECT_NEAR(unit_ball_volume(4), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
}

TEST(Window, SizingAndCap)
{
    const GridWindow w = window_for(1e4, 2);
    EXPECT_GT(w.half_width(), radius_for_volume(1e4, 2));
    MarginPolicy tiny;
    tiny.mem_cap_mb = 1;
    EXPECT_THROW(window_for(1e7, 2, tiny), CapacityError);
    EXPECT_THROW(window_for(0.0, 2), ConfigError);
    EXPECT_THROW(GridWindow(5, 1), ConfigError);
    EXPECT_EQ(grown(GridWindow(2, 3)).half_width(), 11);
}

TEST(Region, EqualityIgnoresWindow)
{
    const Region a = Region::from_points(GridWindow(2, 2), {{0, 0}, {1, 0}});
    const Region b = Region::from_points(GridWindow(2, 9), {{1, 0}, {0, 0}});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.max_abs_coord(), 1);
    EXPECT_EQ(Region(GridWindow(2, 1)).max_abs_coord(), -1);
}

TEST(Snapshot, RoundTripAndLayout)
{
    const GridWindow w(2, 1);
    std::vector<std::int64_t> v(w.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<std::int64_t>(k);
    std::stringstream ss;
    write_snapshot(ss, "odometer", w, v, 1);
    EXPECT_EQ(ss.str(), "LGSIM1 odometer d=2 L=1\n0 1 2\n3 4 5\n6 7 8\n");
    const Snapshot s = read_snapshot(ss);
    EXPECT_EQ(s.kind, "odometer");
    EXPECT_DOUBLE_EQ(s.at(Point{1, -1}), 2.0);
    EXPECT_DOUBLE_EQ(s.at(Point{-1, 1}), 6.0);
}

TEST(Snapshot, CropPadAndThreeD)
{
    const GridWindow w(3, 1);
    std::vector<double> v(w.size(), 0.25);
    std::stringstream ss;
    write_snapshot(ss, "mass", w, v, 2, -1.0);
    const Snapshot s = read_snapshot(ss);
    EXPECT_EQ(s.window.half_width(), 2);
    EXPECT_DOUBLE_EQ(s.at(Point{1, 1, 1}), 0.25);
    EXPECT_DOUBLE_EQ(s.at(Point{2, 0, 0}), -1.0);
}

TEST(Snapshot, RejectsGarbage)
{
    std::stringstream bad("LGSIM2 region d=2 L=0\n1\n");
    EXPECT_THROW(read_snapshot(bad), ConfigError);
    std::stringstream trunc("LGSIM1 region d=2 L=1\n1 0 1\n");
    EXPECT_THROW(read_snapshot(trunc), ConfigError);
}
