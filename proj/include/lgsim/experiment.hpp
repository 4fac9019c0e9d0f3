#pragma once

// Experiment orchestration: a serializable run configuration, single runs
// with JSON reports, parameter sweeps to CSV, and the pinned verification
// suites. Requires nlohmann/json.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "divisible.hpp"
#include "green.hpp"
#include "lattice.hpp"
#include "region.hpp"
#include "render.hpp"
#include "rotor.hpp"
#include "sandpile.hpp"
#include "snapshot.hpp"

namespace lgsim {

using json = nlohmann::json;

inline constexpr const char* kReportSchema = "lgsim-report/1";
inline constexpr const char* kSweepSchema = "# lgsim-sweep v1";

struct OutputPaths {
    std::string region, rotors, odometer, mass, grains, report, image;
};

struct ExperimentConfig {
    Model model = Model::Rotor;
    double size = 1.0;  ///< n (rotor, sandpile) or m (divisible)
    int d = 2;
    int H = 0;
    double eps_stop = 1e-10;
    double eps_occ = 1e-6;
    double eps = 0.1;
    std::string order;          ///< "" for the standard order
    std::string init = "north"; ///< rotor init: compass name, uniform:<k>, random[:<seed>], file:<path>
    unsigned walkers = 1;
    std::string strategy = "fifo";    ///< divisible
    std::string sand_order = "fifo";  ///< sandpile
    std::string sand_mode = "multi";
    std::string visited = "received";
    std::uint64_t seed = 1;
    bool grow = false;
    OutputPaths out;
};

inline void to_json(json& j, const OutputPaths& o)
{
    j = json{{"region", o.region}, {"rotors", o.rotors}, {"odometer", o.odometer}, {"mass", o.mass},
             {"grains", o.grains}, {"report", o.report}, {"image", o.image}};
}

inline void from_json(const json& j, OutputPaths& o)
{
    o.region = j.value("region", "");
    o.rotors = j.value("rotors", "");
    o.odometer = j.value("odometer", "");
    o.mass = j.value("mass", "");
    o.grains = j.value("grains", "");
    o.report = j.value("report", "");
    o.image = j.value("image", "");
}

inline void to_json(json& j, const ExperimentConfig& c)
{
    j = json{{"model", to_string(c.model)},
             {"size", c.size},
             {"d", c.d},
             {"H", c.H},
             {"eps_stop", c.eps_stop},
             {"eps_occ", c.eps_occ},
             {"eps", c.eps},
             {"order", c.order},
             {"init", c.init},
             {"walkers", c.walkers},
             {"strategy", c.strategy},
             {"sand_order", c.sand_order},
             {"sand_mode", c.sand_mode},
             {"visited", c.visited},
             {"seed", c.seed},
             {"grow", c.grow},
             {"outputs", c.out}};
}

inline void from_json(const json& j, ExperimentConfig& c)
{
    const ExperimentConfig def;
    c.model = parse_model(j.at("model").get<std::string>());
    c.size = j.at("size").get<double>();
    c.d = j.value("d", def.d);
    c.H = j.value("H", def.H);
    c.eps_stop = j.value("eps_stop", def.eps_stop);
    c.eps_occ = j.value("eps_occ", def.eps_occ);
    c.eps = j.value("eps", def.eps);
    c.order = j.value("order", def.order);
    c.init = j.value("init", def.init);
    c.walkers = j.value("walkers", def.walkers);
    c.strategy = j.value("strategy", def.strategy);
    c.sand_order = j.value("sand_order", def.sand_order);
    c.sand_mode = j.value("sand_mode", def.sand_mode);
    c.visited = j.value("visited", def.visited);
    c.seed = j.value("seed", def.seed);
    c.grow = j.value("grow", def.grow);
    if (j.contains("outputs")) c.out = j.at("outputs").get<OutputPaths>();
}

// ---------------------------------------------------------------------------
// Helpers

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// FNV-1a over a byte range, for reproducibility digests in reports.
class Fnv {
public:
    void add(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) h_ = (h_ ^ p[i]) * 1099511628211ULL;
    }
    template <class T>
    void add_value(T v)
    {
        add(&v, sizeof v);
    }
    [[nodiscard]] std::string hex() const
    {
        std::ostringstream os;
        os << std::hex << h_;
        return os.str();
    }

private:
    std::uint64_t h_ = 1469598103934665603ULL;
};

/// Digest of (point, value) pairs over the nonzero entries, independent of
/// the window the values live on.
template <class T>
std::string digest(const GridWindow& w, const std::vector<T>& values)
{
    Fnv f;
    std::vector<std::pair<Point, T>> items;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k] != T{}) items.emplace_back(w.point(k), values[k]);
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [p, v] : items) {
        for (int i = 0; i < p.d; ++i) f.add_value(p[i]);
        f.add_value(v);
    }
    return f.hex();
}

inline json point_json(const Point& p)
{
    json a = json::array();
    for (int i = 0; i < p.d; ++i) a.push_back(p[i]);
    return a;
}

inline json shape_json(const Region& region, Model model, const ShapeParams& params)
{
    if (!region.contains(Point::origin(region.dim()))) return json{{"volume", region.count()}, {"contains_origin", false}};
    const ShapeReport s = theorem_report(region, model, params);
    json j{{"volume", s.volume},
           {"r_nominal", s.r_nominal},
           {"r", s.r_model},
           {"inradius", s.in.value},
           {"inradius_witness", point_json(s.in.witness)},
           {"outradius", s.out.value},
           {"outradius_witness", point_json(s.out.witness)},
           {"symdiff", s.symdiff},
           {"verdict", {{s.verdict.inner_name, s.verdict.inner_stat}, {s.verdict.outer_name, s.verdict.outer_stat}}}};
    j["simply_connected"] = s.simply_connected ? json(*s.simply_connected) : json(nullptr);
    return j;
}

inline void write_text_file(const std::string& path, const std::function<void(std::ostream&)>& fn)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    fn(out);
}

inline std::uint64_t integral_size(double size, const char* what)
{
    if (!(size >= 1.0) || size != std::floor(size) || size > 1e15)
        throw ConfigError(std::string(what) + " must be a positive integer");
    return static_cast<std::uint64_t>(size);
}

inline CyclicOrder order_for(const ExperimentConfig& c)
{
    return c.order.empty() ? CyclicOrder::standard(c.d) : CyclicOrder::parse(c.order, c.d);
}

inline RotorInit init_for(const ExperimentConfig& c)
{
    if (c.init == "random") return RotorInit::random(c.seed);
    if (c.init.rfind("file:", 0) == 0) {
        const Snapshot snap = read_snapshot_file(c.init.substr(5));
        if (snap.window.dim() != c.d) throw ConfigError("rotor table dimension does not match d");
        Field<std::int8_t> table(snap.window, -1);
        for (std::size_t k = 0; k < snap.values.size(); ++k) table.values[k] = static_cast<std::int8_t>(snap.values[k]);
        return RotorInit::table(std::move(table), c.d == 2 ? dir2::N : 0);
    }
    return RotorInit::parse(c.init, c.d);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single runs

struct RunOutcome {
    json report;
    bool pass = true;  ///< every asserted invariant held
};

inline RunOutcome run_rotor(const ExperimentConfig& c)
{
    const std::uint64_t n = detail::integral_size(c.size, "rotor n");
    RotorOptions opt;
    opt.order = detail::order_for(c);
    opt.init = detail::init_for(c);
    opt.grow = c.grow;
    opt.walkers = c.walkers;
    const auto t0 = std::chrono::steady_clock::now();
    const RotorResult res = aggregate(n, c.d, opt);
    const double engine_ms = detail::ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const FlowReport flow = check_odometer_flow(res.odometer, res.flux);
    const DivergenceReport div = check_flux_divergence(res.flux, res.occupied, n);
    const std::size_t inconsistent = rotor_consistency_violations(res);
    const std::size_t unbalanced = exit_balance_violations(res);
    const bool count_ok = res.occupied.count() == n;
    json checks{{"count", {{"pass", count_ok}, {"occupied", res.occupied.count()}}},
                {"flow", {{"pass", flow.pass}, {"max_abs_R", flow.max_abs_r}, {"bound", flow.bound}}},
                {"divergence", {{"pass", div.pass}, {"at_origin", div.at_origin}, {"violations", div.violations}}},
                {"rotor_consistency", {{"pass", inconsistent == 0}, {"violations", inconsistent}}},
                {"exit_balance", {{"pass", unbalanced == 0}, {"violations", unbalanced}}}};
    json shape = detail::shape_json(res.occupied, Model::Rotor, {static_cast<double>(n), 0, c.eps});
    const double analysis_ms = detail::ms_since(t1);

    const std::int32_t L = std::max(res.occupied.max_abs_coord(), 0);
    if (!c.out.region.empty()) detail::write_text_file(c.out.region, [&](std::ostream& os) { write_region(os, res.occupied, L); });
    if (!c.out.rotors.empty() || !c.out.image.empty()) {
        const std::vector<std::int64_t> vals = rotor_values(res.rotors, res.occupied);
        if (!c.out.rotors.empty())
            detail::write_text_file(c.out.rotors, [&](std::ostream& os) {
                write_snapshot(os, "rotors", res.rotors.window, vals, L, std::int64_t{-1});
            });
        if (!c.out.image.empty()) write_ppm_file(c.out.image, render_rotor_values(res.rotors.window, vals));
    }
    if (!c.out.odometer.empty())
        detail::write_text_file(c.out.odometer, [&](std::ostream& os) {
            write_snapshot(os, "odometer", res.odometer.window, res.odometer.values, L);
        });

    RunOutcome out;
    out.pass = count_ok && flow.pass && div.pass && inconsistent == 0 && unbalanced == 0;
    out.report = json{{"schema", kReportSchema},
                      {"config", c},
                      {"shape", shape},
                      {"checks", checks},
                      {"rotor",
                       {{"steps", res.steps},
                        {"u_origin", res.odometer.at(Point::origin(c.d))},
                        {"window_half_width", res.occupied.window().half_width()},
                        {"digest_region", detail::digest(res.occupied.window(), res.occupied.mask())},
                        {"digest_odometer", detail::digest(res.odometer.window, res.odometer.values)}}},
                      {"timings_ms", {{"engine", engine_ms}, {"analysis", analysis_ms}}},
                      {"pass", out.pass}};
    return out;
}

inline RunOutcome run_divisible(const ExperimentConfig& c)
{
    DivisibleOptions opt;
    opt.eps_stop = c.eps_stop;
    opt.strategy = parse_div_strategy(c.strategy);
    opt.seed = c.seed;
    opt.grow = c.grow;
    const auto t0 = std::chrono::steady_clock::now();
    const DivisibleResult res = stabilize(c.size, c.d, opt);
    const double engine_ms = detail::ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const DomainReport dom = classify_domain(res.nu, c.eps_occ);
    const double lap = laplacian_identity_residual(res.nu, res.u, c.size);
    const double cons = conservation_error(res.nu, c.size);
    const QuadraticWeight qw = quadratic_weight_check(res.nu, res.u);
    const AscendingReport asc = ascending_path_check(dom.domain, res.u, c.eps_occ + 10.0 * c.eps_stop);
    const bool lap_ok = lap <= 1e-8 * std::max(1.0, c.size);
    const bool cons_ok = cons <= 1e-12;
    json checks{{"laplacian", {{"pass", lap_ok}, {"max_residual", lap}}},
                {"conservation", {{"pass", cons_ok}, {"relative_error", cons}}},
                {"quadratic_weight", {{"pass", qw.pass}, {"lhs", qw.lhs}, {"rhs", qw.rhs}}},
                {"ascending_path", {{"pass", asc.pass}, {"violations", asc.violations}}}};
    json shape = detail::shape_json(dom.domain, Model::Divisible, {c.size, 0, c.eps});
    const double r = radius_for_volume(c.size, c.d);
    if (shape.contains("inradius")) {
        shape["c"] = r - shape["inradius"].get<double>();
        shape["c_prime"] = shape["outradius"].get<double>() - r;
    }
    json layer = json::array();
    for (const Point& p : dom.boundary_layer) layer.push_back(detail::point_json(p));
    const double analysis_ms = detail::ms_since(t1);

    const std::int32_t L = std::max(dom.domain.max_abs_coord(), 0) + 1;
    if (!c.out.region.empty()) detail::write_text_file(c.out.region, [&](std::ostream& os) { write_region(os, dom.domain); });
    if (!c.out.mass.empty())
        detail::write_text_file(c.out.mass, [&](std::ostream& os) { write_snapshot(os, "mass", res.nu.window, res.nu.mass, L); });
    if (!c.out.odometer.empty())
        detail::write_text_file(c.out.odometer, [&](std::ostream& os) { write_snapshot(os, "odometer", res.u); });
    if (!c.out.image.empty()) write_ppm_file(c.out.image, render_mass(res.nu));

    RunOutcome out;
    out.pass = lap_ok && cons_ok && qw.pass && asc.pass;
    out.report = json{{"schema", kReportSchema},
                      {"config", c},
                      {"shape", shape},
                      {"boundary_layer", {{"count", dom.boundary_layer.size()}, {"points", layer}}},
                      {"checks", checks},
                      {"divisible",
                       {{"topplings", res.topplings},
                        {"u_origin", res.u.at(Point::origin(c.d))},
                        {"window_half_width", res.nu.window.half_width()}}},
                      {"timings_ms", {{"engine", engine_ms}, {"analysis", analysis_ms}}},
                      {"pass", out.pass}};
    return out;
}

inline RunOutcome run_sandpile(const ExperimentConfig& c)
{
    const std::uint64_t n = detail::integral_size(c.size, "sandpile n");
    SandpileOptions opt;
    opt.order = parse_sand_order(c.sand_order);
    opt.mode = parse_sand_mode(c.sand_mode);
    opt.grow = c.grow;
    const VisitedMode vmode = parse_visited_mode(c.visited);
    const auto t0 = std::chrono::steady_clock::now();
    const SandpileResult res = stabilize_sandpile(n, c.H, c.d, opt, vmode);
    const double engine_ms = detail::ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const SandpileInvariants inv = check_sandpile_invariants(res.field, res.visited, res.toppled);
    const OdometerBandReport band = check_odometer_bounds(res.field);
    const InternalEdgeReport edges = check_internal_edges(res.field, res.toppled.points());
    const PathReport paths = check_ascending_paths(res.field);
    // the path argument needs H >= 0; below that it is reported only
    const bool paths_asserted = c.H >= 0;
    json checks{{"conservation", {{"pass", inv.conserved}, {"total", inv.total}}},
                {"stability", {{"pass", inv.stable}, {"max_count", inv.max_count}}},
                {"sandwich", {{"pass", inv.sandwich}}},
                {"odometer_band", {{"pass", band.pass}, {"band", {band.lo, band.hi}}, {"seen", {band.min_seen, band.max_seen}}, {"violations", band.violations}}},
                {"internal_edges", {{"pass", edges.pass}, {"remaining", edges.remaining}, {"internal_edges", edges.internal_edges}}},
                {"ascending_paths", {{"pass", paths.pass}, {"asserted", paths_asserted}, {"failures", paths.failures}}}};
    json shape = detail::shape_json(res.visited, Model::Sandpile, {static_cast<double>(n), c.H, c.eps});
    json thm;
    if (res.visited.contains(Point::origin(c.d))) {
        const SandpileRadiiReport t = sandpile_radii_check(res.visited, n, c.H, c.d, c.eps);
        thm = json{{"r", t.r}, {"c1", t.c1}, {"c2_meas", t.c2_meas}, {"outer_applies", t.outer_applies}};
        if (t.outer_applies) {
            thm["c1_prime"] = t.c1_outer;
            thm["c2_prime_meas"] = t.c2_outer_meas;
        }
    }
    const double analysis_ms = detail::ms_since(t1);

    const std::int32_t L = std::max(res.visited.max_abs_coord(), 0);
    const std::vector<std::int64_t> grains = grain_values(res.field, vmode);
    if (!c.out.region.empty()) detail::write_text_file(c.out.region, [&](std::ostream& os) { write_region(os, res.visited, L); });
    if (!c.out.grains.empty())
        detail::write_text_file(c.out.grains, [&](std::ostream& os) {
            write_snapshot(os, "grains", res.field.window, grains, L, std::int64_t{-1});
        });
    if (!c.out.odometer.empty())
        detail::write_text_file(c.out.odometer, [&](std::ostream& os) {
            write_snapshot(os, "odometer", res.field.window, res.field.topplings, L);
        });
    if (!c.out.image.empty()) write_ppm_file(c.out.image, render_grain_values(res.field.window, grains));

    RunOutcome out;
    out.pass = inv.pass() && band.pass && edges.pass && (paths.pass || !paths_asserted);
    out.report = json{{"schema", kReportSchema},
                      {"config", c},
                      {"shape", shape},
                      {"theorem", thm},
                      {"checks", checks},
                      {"sandpile",
                       {{"visited", res.visited.count()},
                        {"toppled", res.toppled.count()},
                        {"topplings_origin", res.field.top(Point::origin(c.d))},
                        {"events", res.events},
                        {"window_half_width", res.field.window.half_width()},
                        {"digest_grains", detail::digest(res.field.window, grains)},
                        {"digest_topplings", detail::digest(res.field.window, res.field.topplings)}}},
                      {"timings_ms", {{"engine", engine_ms}, {"analysis", analysis_ms}}},
                      {"pass", out.pass}};
    return out;
}

inline RunOutcome run(const ExperimentConfig& c)
{
    check_dimension(c.d);
    RunOutcome out;
    switch (c.model) {
    case Model::Rotor: out = run_rotor(c); break;
    case Model::Divisible: out = run_divisible(c); break;
    case Model::Sandpile: out = run_sandpile(c); break;
    }
    if (!c.out.report.empty())
        detail::write_text_file(c.out.report, [&](std::ostream& os) { os << out.report.dump(2) << '\n'; });
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    Model model = Model::Rotor;
    double size = 0.0;
    int d = 2;
    int H = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    double r = 0.0;
    double inradius = 0.0;
    double outradius = 0.0;
    std::int64_t symdiff = 0;
    std::optional<bool> simply_connected;
    double runtime_ms = 0.0;
    bool pass = true;
};

/// One run per (size, repeat). Random rotor inits use seed + repeat. Runs
/// are spread over `jobs` threads; rows come back in input order.
inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::vector<double>& sizes, int repeat, unsigned jobs = 1)
{
    if (repeat < 1) throw ConfigError("sweep: repeat must be >= 1");
    std::vector<ExperimentConfig> cfgs;
    std::vector<SweepRow> rows;
    for (double s : sizes) {
        for (int i = 0; i < repeat; ++i) {
            ExperimentConfig c = base;
            c.size = s;
            c.seed = base.seed + static_cast<std::uint64_t>(i);
            c.out = {};
            cfgs.push_back(c);
            SweepRow row;
            row.model = c.model;
            row.size = s;
            row.d = c.d;
            row.H = c.H;
            row.repeat = i;
            row.seed = c.seed;
            rows.push_back(row);
        }
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= cfgs.size()) return;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const RunOutcome o = run(cfgs[i]);
                SweepRow& row = rows[i];
                row.runtime_ms = detail::ms_since(t0);
                const json& s = o.report.at("shape");
                row.r = radius_for_volume(cfgs[i].size, cfgs[i].d);
                row.inradius = s.value("inradius", 0.0);
                row.outradius = s.value("outradius", 0.0);
                row.symdiff = s.value("symdiff", std::int64_t{0});
                if (s.contains("simply_connected") && s["simply_connected"].is_boolean())
                    row.simply_connected = s["simply_connected"].get<bool>();
                row.pass = o.pass;
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cfgs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << kSweepSchema << '\n';
    os << "model,n_or_m,d,H,r,inradius,outradius,symdiff,simply_connected,runtime_ms\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const SweepRow& r : rows) {
        os << to_string(r.model) << ',' << num(r.size) << ',' << r.d << ',' << r.H << ',' << num(r.r) << ','
           << num(r.inradius) << ',' << num(r.outradius) << ',' << r.symdiff << ','
           << (r.simply_connected ? (*r.simply_connected ? "true" : "false") : "") << ',' << num(r.runtime_ms) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Verification suites

struct Verdict {
    std::string suite;
    std::string check;
    bool pass = false;
    json detail;
};

inline void to_json(json& j, const Verdict& v)
{
    j = json{{"suite", v.suite}, {"check", v.check}, {"pass", v.pass}, {"detail", v.detail}};
}

inline std::vector<Verdict> verify_green()
{
    std::vector<Verdict> out;
    const GreenTable g2 = GreenTable::build(2);
    const double res2 = g2.laplacian_residual();
    out.push_back({"green", "laplacian d=2", res2 <= 1e-10, {{"residual", res2}}});
    const double e1 = g2(Point{1, 0}), d11 = g2(Point{1, 1});
    out.push_back({"green", "g(e1) = -1", std::abs(e1 + 1.0) <= 1e-6, {{"value", e1}}});
    out.push_back({"green", "g(1,1) = -4/pi", std::abs(d11 + 4.0 / std::numbers::pi) <= 1e-6, {{"value", d11}}});
    out.push_back({"green", "seam d=2", g2.seam_gap() <= 1e-4, {{"gap", g2.seam_gap()}, {"kappa", g2.kappa()}}});

    const GreenTable g3 = GreenTable::build(3);
    const double res3 = g3.laplacian_residual();
    out.push_back({"green", "laplacian d=3", res3 <= 1e-10, {{"residual", res3}}});
    out.push_back({"green", "seam d=3", g3.seam_gap() <= 1e-4, {{"gap", g3.seam_gap()}}});

    for (const auto& [d, table] : {std::pair<int, const GreenTable*>{2, &g2}, {3, &g3}}) {
        const GammaSweepReport s = verify_gamma_sweep(d, {50.0, 100.0, 200.0}, *table);
        json runs = json::array();
        for (const auto& r : s.runs)
            runs.push_back({{"r", r.r}, {"c1", r.c1}, {"annulus_sup", r.annulus_sup}, {"near_origin_min", r.near_origin_min},
                            {"a_meas", r.a_meas}, {"pass", r.pass()}});
        out.push_back({"green", "gamma lemmas d=" + std::to_string(d), s.pass,
                       {{"runs", runs}, {"annulus_ratio", s.annulus_ratio}, {"a_spread", s.a_spread}, {"c1_ratio", s.c1_ratio}}});
    }
    return out;
}

inline std::vector<Verdict> verify_divisible()
{
    std::vector<Verdict> out;
    const double m = 1000.0;
    std::vector<DivisibleResult> runs;
    for (DivStrategy s : {DivStrategy::Fifo, DivStrategy::Lifo, DivStrategy::Sweep}) {
        DivisibleOptions opt;
        opt.strategy = s;
        runs.push_back(stabilize(m, 2, opt));
    }
    const Region d0 = occupied_domain(runs[0].nu);
    bool same = true;
    double worst = 0.0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        same = same && occupied_domain(runs[i].nu) == d0;
        worst = std::max(worst, sup_difference(runs[0].u, runs[i].u));
    }
    out.push_back({"divisible", "abelian m=1e3", same && worst <= 1e-6, {{"same_domain", same}, {"sup_u_diff", worst}}});
    const double lap = laplacian_identity_residual(runs[0].nu, runs[0].u, m);
    out.push_back({"divisible", "laplacian identity", lap <= 1e-8 * m, {{"residual", lap}}});
    const double cons = conservation_error(runs[0].nu, m);
    out.push_back({"divisible", "conservation", cons <= 1e-12, {{"relative_error", cons}}});
    const QuadraticWeight qw = quadratic_weight_check(runs[0].nu, runs[0].u);
    out.push_back({"divisible", "quadratic weight", qw.pass, {{"lhs", qw.lhs}, {"rhs", qw.rhs}}});
    const AscendingReport asc = ascending_path_check(d0, runs[0].u, 1e-6 + 1e-9);
    out.push_back({"divisible", "ascending path", asc.pass, {{"violations", asc.violations}, {"worst_margin", asc.worst_margin}}});

    const GreenTable g2 = GreenTable::build(2);
    for (double mm : {100.0, 1000.0}) {
        const DivisibleResult e = stabilize(mm, 2);
        const ObstacleResult ob = obstacle_odometer(mm, 2, e.u.window, g2);
        const double diff = sup_difference(ob.u, e.u);
        out.push_back({"divisible", "obstacle m=" + std::to_string(static_cast<int>(mm)), diff <= 1e-4 * mm,
                       {{"sup_diff", diff}, {"sweeps", ob.sweeps}}});
    }
    return out;
}

inline std::vector<Verdict> verify_rotor()
{
    std::vector<Verdict> out;
    const std::uint64_t n = 10000;
    const RotorResult res = aggregate(n, 2);
    const FlowReport flow = check_odometer_flow(res.odometer, res.flux);
    out.push_back({"rotor", "flow bound n=1e4", flow.pass, {{"max_abs_R", flow.max_abs_r}, {"bound", flow.bound}}});
    const DivergenceReport div = check_flux_divergence(res.flux, res.occupied, n);
    out.push_back({"rotor", "flux divergence", div.pass, {{"at_origin", div.at_origin}, {"violations", div.violations}}});
    out.push_back({"rotor", "count", res.occupied.count() == n, {{"occupied", res.occupied.count()}}});
    out.push_back({"rotor", "rotor consistency", rotor_consistency_violations(res) == 0, json::object()});

    RotorOptions many;
    many.walkers = 8;
    const RotorResult inter = aggregate(n, 2, many);
    const bool same = inter.occupied == res.occupied && inter.rotors.rotor == res.rotors.rotor &&
                      inter.odometer.values == res.odometer.values && inter.flux.net == res.flux.net;
    out.push_back({"rotor", "interleaved walkers", same, json::object()});

    const auto rho = static_cast<std::int64_t>(std::ceil(radius_for_volume(static_cast<double>(n), 2)));
    const StagedResult staged = aggregate_staged(n, 2, rho, 10);
    const StagedResult reversed = aggregate_staged(n, 2, rho, 10, {}, ReleaseOrder::Reverse);
    const StagedResult direct = aggregate_stopped(n, 2, rho + 10);
    out.push_back({"rotor", "staged vs direct", staged.n_rho_h == direct.n_rho_h && staged.at_outer == direct.at_outer,
                   {{"staged", staged.n_rho_h}, {"direct", direct.n_rho_h}, {"n_rho", staged.n_rho}}});
    out.push_back({"rotor", "release order",
                   reversed.occupied == staged.occupied && reversed.rotors.rotor == staged.rotors.rotor &&
                       reversed.at_outer == staged.at_outer,
                   json::object()});
    return out;
}

inline std::vector<Verdict> verify_sandpile()
{
    std::vector<Verdict> out;
    const std::uint64_t n = 10000;
    for (int H : {0, -2}) {
        const std::string tag = " H=" + std::to_string(H);
        std::vector<SandpileResult> runs;
        for (SandOrder o : {SandOrder::Fifo, SandOrder::Lifo, SandOrder::Sweep}) {
            SandpileOptions opt;
            opt.order = o;
            opt.grow = true;
            runs.push_back(stabilize_sandpile(n, H, 2, opt));
        }
        bool same = true;
        for (std::size_t i = 1; i < runs.size(); ++i) {
            same = same && runs[i].field.window == runs[0].field.window && runs[i].field.received == runs[0].field.received &&
                   runs[i].field.topplings == runs[0].field.topplings;
        }
        out.push_back({"sandpile", "abelian" + tag, same, json::object()});
        const SandpileResult& r = runs[0];
        const SandpileInvariants inv = check_sandpile_invariants(r.field, r.visited, r.toppled);
        out.push_back({"sandpile", "invariants" + tag, inv.pass(),
                       {{"conserved", inv.conserved}, {"stable", inv.stable}, {"sandwich", inv.sandwich}}});
        const OdometerBandReport band = check_odometer_bounds(r.field);
        out.push_back({"sandpile", "odometer band" + tag, band.pass,
                       {{"band", {band.lo, band.hi}}, {"seen", {band.min_seen, band.max_seen}}}});
        const InternalEdgeReport edges = check_internal_edges(r.field, r.toppled.points());
        out.push_back({"sandpile", "internal edges" + tag, edges.pass,
                       {{"remaining", edges.remaining}, {"internal_edges", edges.internal_edges}}});
        if (H >= 0) {
            const PathReport p = check_ascending_paths(r.field);
            out.push_back({"sandpile", "ascending paths" + tag, p.pass, {{"starts", p.starts}, {"failures", p.failures}}});
        }
    }
    return out;
}

inline std::vector<Verdict> verify(const std::string& suite)
{
    if (suite == "green") return verify_green();
    if (suite == "divisible") return verify_divisible();
    if (suite == "rotor") return verify_rotor();
    if (suite == "sandpile") return verify_sandpile();
    if (suite == "all") {
        std::vector<Verdict> all;
        for (const char* s : {"green", "divisible", "rotor", "sandpile"}) {
            auto v = verify(s);
            all.insert(all.end(), v.begin(), v.end());
        }
        return all;
    }
    throw ConfigError("unknown verify suite '" + suite + "'");
}

}  // namespace lgsim
