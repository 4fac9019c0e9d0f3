// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. All tolerances are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lgsim/analysis.hpp"
#include "lgsim/divisible.hpp"
#include "lgsim/green.hpp"
#include "lgsim/render.hpp"
#include "lgsim/rotor.hpp"
#include "lgsim/sandpile.hpp"

using namespace lgsim;

namespace {

// criterion 1
constexpr double kBootstrapMs = 1.0;
// criterion 2
constexpr double kFlowRunSeconds = 30.0;
// criterion 4
constexpr double kShapeFactor = 1.5;
constexpr double kMillionRunSeconds = 600.0;
// criterion 5
constexpr double kAbelianSup = 1e-6;
// criterion 6
constexpr double kLaplacianRel = 1e-8;
constexpr double kConservationRel = 1e-12;
constexpr double kQuadraticRel = 1e-6;
// criterion 7
constexpr double kObstacleRel = 1e-4;
constexpr double kObstacleSeconds = 300.0;
// criterion 8
constexpr double kWidthCap = 2.0;
constexpr double kWidthTrendSlack = 0.05;  ///< allowed rise over the final doubling of r
// criterion 10
constexpr double kSandShapeFactor = 1.5;
constexpr double kSandFloor = 1.0;
constexpr double kSandRunSeconds = 60.0;
// criterion 11
constexpr double kGreenResidual = 1e-10;
constexpr double kGreenValue = 1e-6;

constexpr unsigned kWalkers = 8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail)
{
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
}

void guarded(int id, const std::string& title, const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, title, false, std::string("exception: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

void criterion_1()
{
    const std::vector<Region> expected{
        Region::from_points(GridWindow(2, 1), {{0, 0}}),
        Region::from_points(GridWindow(2, 1), {{0, 0}, {1, 0}}),
        Region::from_points(GridWindow(2, 1), {{0, 0}, {1, 0}, {0, -1}}),
    };
    bool ok = true;
    double worst_ms = 0.0;
    for (std::uint64_t n = 1; n <= 3; ++n) {
        RotorOptions opt;
        opt.window = GridWindow(2, 4);
        const auto t0 = Clock::now();
        const RotorResult r = aggregate(n, 2, opt);
        worst_ms = std::max(worst_ms, 1e3 * seconds_since(t0));
        ok = ok && r.occupied == expected[n - 1];
    }
    report(1, "bootstrap A1..A3", ok && worst_ms < kBootstrapMs,
           std::string(ok ? "clusters exact" : "cluster mismatch") + ", slowest run " + fmt("%.3f", worst_ms) + " ms");
}

void criteria_2_3()
{
    bool flow_ok = true, div_ok = true;
    double big_seconds = 0.0;
    std::string flow_detail, div_detail;
    for (int d : {2, 3}) {
        for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL}) {
            RotorOptions opt;
            opt.order = CyclicOrder::standard(d);
            opt.walkers = kWalkers;
            const auto t0 = Clock::now();
            const RotorResult r = aggregate(n, d, opt);
            const double secs = seconds_since(t0);
            if (d == 2 && n == 100000) big_seconds = secs;
            const FlowReport f = check_odometer_flow(r.odometer, r.flux);
            const DivergenceReport v = check_flux_divergence(r.flux, r.occupied, n);
            flow_ok = flow_ok && f.pass;
            div_ok = div_ok && v.pass;
            flow_detail += " d" + std::to_string(d) + "n" + std::to_string(n) + ":" + std::to_string(f.max_abs_r) + "/" +
                           std::to_string(f.bound);
            div_detail += " d" + std::to_string(d) + "n" + std::to_string(n) + ":o=" + std::to_string(v.at_origin) +
                          ",bad=" + std::to_string(v.violations);
        }
    }
    report(2, "rotor flow bound", flow_ok && big_seconds < kFlowRunSeconds,
           "max|R|/bound" + flow_detail + "; n=1e5 d=2 in " + fmt("%.2f", big_seconds) + " s");
    report(3, "flux divergence", div_ok, div_detail.substr(1));
}

RotorInit checkerboard(std::uint64_t n)
{
    const GridWindow w = window_for(static_cast<double>(n), 2, rotor_margin({}));
    Field<std::int8_t> t(w);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Point p = w.point(k);
        t.values[k] = static_cast<std::int8_t>(((p[0] + p[1]) % 2 == 0) ? dir2::N : dir2::E);
    }
    return RotorInit::table(std::move(t), dir2::N);
}

void criterion_4()
{
    const std::vector<std::uint64_t> sizes{1000, 10000, 100000, 1000000};
    const std::vector<std::string> names{"north", "random:1", "checkerboard"};
    bool ok = true;
    double slowest = 0.0;
    std::string detail;
    for (std::size_t pol = 0; pol < names.size(); ++pol) {
        std::vector<double> inner, outer;
        for (std::uint64_t n : sizes) {
            RotorOptions opt;
            opt.walkers = kWalkers;
            opt.init = pol == 0 ? RotorInit::uniform(dir2::N) : pol == 1 ? RotorInit::random(1) : checkerboard(n);
            const auto t0 = Clock::now();
            const RotorResult r = aggregate(n, 2, opt);
            const double secs = seconds_since(t0);
            if (n == sizes.back()) slowest = std::max(slowest, secs);
            const double rad = radius_for_volume(static_cast<double>(n), 2);
            const ShapeVerdict v = shape_verdict(Model::Rotor, 2, rad, inradius(r.occupied), outradius(r.occupied), {});
            inner.push_back(v.inner_stat);
            outer.push_back(v.outer_stat);
        }
        // bounded by kShapeFactor times the n = 1e3 value
        const bool pin = sweep_stable(inner, kShapeFactor, 0.0);
        const bool pout = sweep_stable(outer, kShapeFactor, 0.0);
        ok = ok && pin && pout;
        detail += " " + names[pol] + " in[";
        for (double v : inner) detail += fmt("%.3f ", v);
        detail.back() = ']';
        detail += " out[";
        for (double v : outer) detail += fmt("%.3f ", v);
        detail.back() = ']';
    }
    report(4, "rotor shape sweep", ok && slowest < kMillionRunSeconds,
           detail.substr(1) + "; slowest n=1e6 " + fmt("%.0f", slowest) + " s");
}

void criteria_5_6()
{
    const double m = 1000.0;
    std::vector<DivisibleResult> runs;
    for (DivStrategy s : {DivStrategy::Fifo, DivStrategy::Lifo, DivStrategy::Sweep}) {
        DivisibleOptions opt;
        opt.strategy = s;
        runs.push_back(stabilize(m, 2, opt));
    }
    const Region D = occupied_domain(runs[0].nu);
    bool same = true;
    double sup = 0.0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        same = same && occupied_domain(runs[i].nu) == D;
        sup = std::max(sup, sup_difference(runs[0].u, runs[i].u));
    }
    report(5, "divisible abelian", same && sup <= kAbelianSup,
           std::string(same ? "domains identical" : "domains differ") + " (|D|=" + std::to_string(D.count()) +
               "), sup|u_i - u_fifo| = " + fmt("%.2e", sup));

    bool ok = true;
    double lap = 0.0, cons = 0.0, quad = 0.0;
    for (const DivisibleResult& r : runs) {
        lap = std::max(lap, laplacian_identity_residual(r.nu, r.u, m) / m);
        cons = std::max(cons, conservation_error(r.nu, m));
        const QuadraticWeight q = quadratic_weight_check(r.nu, r.u);
        quad = std::max(quad, std::abs(q.lhs - q.rhs) / q.rhs);
    }
    ok = lap <= kLaplacianRel && cons <= kConservationRel && quad <= kQuadraticRel;
    report(6, "divisible identities", ok,
           "max|Lap u - nu + m delta|/m = " + fmt("%.2e", lap) + ", |sum nu - m|/m = " + fmt("%.2e", cons) +
               ", quadratic weight rel = " + fmt("%.2e", quad));
}

void criterion_7()
{
    const auto t0 = Clock::now();
    const GreenTable g = GreenTable::build(2);
    bool ok = true;
    std::string detail;
    for (double m : {100.0, 1000.0, std::numbers::pi * 2500.0}) {
        const DivisibleResult r = stabilize(m, 2);
        const ObstacleResult ob = obstacle_odometer(m, 2, r.u.window, g);
        const double rel = sup_difference(ob.u, r.u) / m;
        ok = ok && rel <= kObstacleRel;
        detail += " m=" + fmt("%.1f", m) + ":" + fmt("%.2e", rel);
    }
    const double secs = seconds_since(t0);
    report(7, "obstacle oracle", ok && secs < kObstacleSeconds,
           "sup|u_obst - u|/m" + detail + "; total " + fmt("%.1f", secs) + " s");
}

void criterion_8()
{
    std::vector<double> w_in, w_out;
    for (double r : {10.0, 20.0, 40.0, 80.0}) {
        const DivisibleResult res = stabilize(std::numbers::pi * r * r, 2);
        const Region D = occupied_domain(res.nu);
        w_in.push_back(r - inradius(D).value);
        w_out.push_back(outradius(D).value - r);
    }
    bool ok = true;
    std::string detail = "r-in[";
    for (double v : w_in) detail += fmt("%.3f ", v);
    detail.back() = ']';
    detail += " out-r[";
    for (double v : w_out) detail += fmt("%.3f ", v);
    detail.back() = ']';
    for (const auto* w : {&w_in, &w_out}) {
        for (double v : *w) ok = ok && v <= kWidthCap;
        ok = ok && (*w)[3] - (*w)[2] <= kWidthTrendSlack;
    }
    report(8, "divisible shape widths", ok, detail);
}

void criterion_9()
{
    bool ok = true;
    std::string detail;
    for (std::uint64_t n : {4ULL, 8ULL, 10000ULL}) {
        for (int H : {0, -2}) {
            std::vector<SandpileResult> runs;
            for (SandOrder o : {SandOrder::Fifo, SandOrder::Lifo, SandOrder::Sweep}) {
                SandpileOptions opt;
                opt.order = o;
                opt.grow = true;
                runs.push_back(stabilize_sandpile(n, H, 2, opt));
            }
            bool same = true;
            for (std::size_t i = 1; i < runs.size(); ++i)
                same = same && runs[i].field.window == runs[0].field.window &&
                       runs[i].field.received == runs[0].field.received &&
                       runs[i].field.topplings == runs[0].field.topplings && runs[i].visited == runs[0].visited &&
                       runs[i].toppled == runs[0].toppled;
            const SandpileResult& r = runs[0];
            const SandpileInvariants inv = check_sandpile_invariants(r.field, r.visited, r.toppled);
            const OdometerBandReport band = check_odometer_bounds(r.field);
            const bool cell = same && inv.conserved && inv.stable && band.pass;
            ok = ok && cell;
            detail += " n" + std::to_string(n) + "H" + std::to_string(H) + ":" + (cell ? "ok" : "BAD") + "|S|=" +
                      std::to_string(r.visited.count());
        }
    }
    report(9, "sandpile exact/abelian", ok, detail.substr(1));
}

void criterion_10()
{
    std::vector<double> c2, c2p;
    double slowest = 0.0;
    for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL}) {
        const auto t0 = Clock::now();
        SandpileOptions opt;
        opt.grow = true;
        const SandpileResult r = stabilize_sandpile(n, 0, 2, opt);
        slowest = std::max(slowest, seconds_since(t0));
        const SandpileRadiiReport t = sandpile_radii_check(r.visited, n, 0, 2, 0.1);
        c2.push_back(t.c2_meas);
        c2p.push_back(t.c2_outer_meas);
    }
    const bool ok = sweep_stable(c2, kSandShapeFactor, kSandFloor) && sweep_stable(c2p, kSandShapeFactor, kSandFloor) &&
                    slowest < kSandRunSeconds;
    report(10, "sandpile shape", ok,
           "c2[" + fmt("%.2f", c2[0]) + " " + fmt("%.2f", c2[1]) + " " + fmt("%.2f", c2[2]) + "] c2'[" +
               fmt("%.2f", c2p[0]) + " " + fmt("%.2f", c2p[1]) + " " + fmt("%.2f", c2p[2]) + "]; slowest " +
               fmt("%.1f", slowest) + " s");
}

void criterion_11()
{
    const GreenTable g2 = GreenTable::build(2);
    const GreenTable g3 = GreenTable::build(3);
    const double res = std::max(g2.laplacian_residual(), g3.laplacian_residual());
    const double e1 = std::abs(g2(Point{1, 0}) + 1.0);
    const double d11 = std::abs(g2(Point{1, 1}) + 4.0 / std::numbers::pi);
    const GammaSweepReport s2 = verify_gamma_sweep(2, {50.0, 100.0, 200.0}, g2);
    const GammaLemmaReport l3 = verify_gamma_lemmas(GammaParams::gamma_for_radius(3, 40.0), g3);
    const bool ok = res <= kGreenResidual && e1 <= kGreenValue && d11 <= kGreenValue && s2.pass && l3.pass();
    report(11, "green's function", ok,
           "residual " + fmt("%.1e", res) + ", |g(e1)+1| " + fmt("%.1e", e1) + ", |g(1,1)+4/pi| " + fmt("%.1e", d11) +
               ", lemmas d2 " + (s2.pass ? "pass" : "FAIL") + " (annulus ratio " + fmt("%.3f", s2.annulus_ratio) +
               "), d3 r=40 " + (l3.pass() ? "pass" : "FAIL") + " (annulus " + fmt("%.2f", l3.annulus_sup) + ")");
}

std::string bytes_of(const Image& img)
{
    std::ostringstream os;
    write_ppm(os, img);
    return os.str();
}

std::string file_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_12()
{
    const RotorResult a3 = aggregate(3, 2);
    const SandpileResult s4 = stabilize_sandpile(4, 0, 2);
    const DivisibleResult m5 = stabilize(5.0, 2);
    const std::string dir = LGSIM_GOLDEN_DIR;
    const bool ra = bytes_of(render_rotors(a3.rotors, a3.occupied)) == file_bytes(dir + "/a3.ppm");
    const bool rs = bytes_of(render_grains(s4.field)) == file_bytes(dir + "/n4.ppm");
    const bool rm = bytes_of(render_mass(m5.nu)) == file_bytes(dir + "/m5.ppm");
    report(12, "render golden files", ra && rs && rm,
           std::string("A3 rotors ") + (ra ? "match" : "DIFFER") + ", n=4 grains " + (rs ? "match" : "DIFFER") +
               ", m=5 mass " + (rm ? "match" : "DIFFER"));
}

}  // namespace

int main()
{
    guarded(1, "bootstrap A1..A3", criterion_1);
    guarded(2, "rotor flow bound / flux divergence", criteria_2_3);
    guarded(5, "divisible abelian / identities", criteria_5_6);
    guarded(7, "obstacle oracle", criterion_7);
    guarded(8, "divisible shape widths", criterion_8);
    guarded(9, "sandpile exact/abelian", criterion_9);
    guarded(10, "sandpile shape", criterion_10);
    guarded(11, "green's function", criterion_11);
    guarded(12, "render golden files", criterion_12);
    guarded(4, "rotor shape sweep", criterion_4);
    std::printf("%s: %d criterion failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
