// lgsim: command-line driver for the growth-model engines.
//
// Exit codes: 0 ok, 2 invariant failure or non-convergence, 3 window or
// memory capacity exceeded, 4 bad configuration.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lgsim/experiment.hpp"

namespace {

using namespace lgsim;

enum Exit { kOk = 0, kInvariant = 2, kCapacity = 3, kConfig = 4 };

/// Accepts "1000", "1e3" and friends for integral sizes.
double parse_size(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad size '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError("bad size '" + s + "'");
    return v;
}

std::vector<double> parse_size_list(const std::string& s)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) out.push_back(parse_size(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty size list");
    return out;
}

int finish(const RunOutcome& o, bool print)
{
    if (print) std::cout << o.report.dump(2) << '\n';
    return o.pass ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"lgsim: rotor-router aggregation, divisible and abelian sandpiles"};
    app.require_subcommand(1);
    int code = kOk;

    ExperimentConfig cfg;
    std::string size_text;

    // rotor run
    auto* rotor = app.add_subcommand("rotor", "rotor-router aggregation");
    auto* rotor_run = rotor->add_subcommand("run", "run aggregation from the origin");
    rotor->require_subcommand(1);
    rotor_run->add_option("--n", size_text, "number of particles")->required();
    rotor_run->add_option("--d", cfg.d, "dimension")->capture_default_str();
    rotor_run->add_option("--order", cfg.order, "cyclic order, e.g. NESW (d = 2) or 0,2,1,3");
    rotor_run->add_option("--init", cfg.init, "north|east|south|west|uniform:<k>|random|random:<seed>|file:<path>")
        ->capture_default_str();
    rotor_run->add_option("--seed", cfg.seed, "seed for --init random")->capture_default_str();
    rotor_run->add_option("--walkers", cfg.walkers, "interleaved walkers (1..16)")->capture_default_str();
    rotor_run->add_flag("--grow", cfg.grow, "grow the window instead of failing on overflow");
    rotor_run->add_option("--out-region", cfg.out.region);
    rotor_run->add_option("--out-rotors", cfg.out.rotors);
    rotor_run->add_option("--out-odometer", cfg.out.odometer);
    rotor_run->add_option("--out-image", cfg.out.image);
    rotor_run->add_option("--report", cfg.out.report);
    rotor_run->callback([&] {
        cfg.model = Model::Rotor;
        cfg.size = parse_size(size_text);
        code = finish(run(cfg), cfg.out.report.empty());
    });

    // divisible run
    auto* div = app.add_subcommand("divisible", "divisible sandpile");
    auto* div_run = div->add_subcommand("run", "stabilize mass m at the origin");
    div->require_subcommand(1);
    div_run->add_option("--m", size_text, "total mass")->required();
    div_run->add_option("--d", cfg.d)->capture_default_str();
    div_run->add_option("--tol", cfg.eps_stop, "stop when every site holds at most 1 + tol")->capture_default_str();
    div_run->add_option("--eps-occ", cfg.eps_occ, "a site is full when its mass is at least 1 - eps-occ")
        ->capture_default_str();
    div_run->add_option("--strategy", cfg.strategy, "fifo|lifo|sweep|random")->capture_default_str();
    div_run->add_option("--seed", cfg.seed, "seed for --strategy random")->capture_default_str();
    div_run->add_flag("--grow", cfg.grow);
    div_run->add_option("--out-region", cfg.out.region);
    div_run->add_option("--out-mass", cfg.out.mass);
    div_run->add_option("--out-odometer", cfg.out.odometer);
    div_run->add_option("--out-image", cfg.out.image);
    div_run->add_option("--report", cfg.out.report);
    div_run->callback([&] {
        cfg.model = Model::Divisible;
        cfg.size = parse_size(size_text);
        code = finish(run(cfg), cfg.out.report.empty());
    });

    // sandpile run
    auto* sand = app.add_subcommand("sandpile", "abelian sandpile with holes");
    auto* sand_run = sand->add_subcommand("run", "stabilize n grains at the origin");
    sand->require_subcommand(1);
    sand_run->add_option("--n", size_text, "number of grains")->required();
    sand_run->add_option("--H", cfg.H, "hole depth (negative: -H grains pre-placed)")->capture_default_str();
    sand_run->add_option("--d", cfg.d)->capture_default_str();
    sand_run->add_option("--mode", cfg.sand_mode, "multi|single")->capture_default_str();
    sand_run->add_option("--order", cfg.sand_order, "fifo|lifo|sweep")->capture_default_str();
    sand_run->add_option("--visited", cfg.visited, "received|above-floor")->capture_default_str();
    sand_run->add_option("--eps", cfg.eps, "outer-bound epsilon")->capture_default_str();
    sand_run->add_flag("--grow", cfg.grow);
    sand_run->add_option("--out-region", cfg.out.region);
    sand_run->add_option("--out-grains", cfg.out.grains);
    sand_run->add_option("--out-odometer", cfg.out.odometer);
    sand_run->add_option("--out-image", cfg.out.image);
    sand_run->add_option("--report", cfg.out.report);
    sand_run->callback([&] {
        cfg.model = Model::Sandpile;
        cfg.size = parse_size(size_text);
        code = finish(run(cfg), cfg.out.report.empty());
    });

    // run from a saved config or report
    std::string config_path;
    auto* replay = app.add_subcommand("run", "run a JSON config (or the config embedded in a report)");
    replay->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    std::string replay_report;
    replay->add_option("--report", replay_report, "override the report path");
    replay->callback([&] {
        std::ifstream in(config_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (j.contains("config")) j = j["config"];
        ExperimentConfig c;
        try {
            c = j.get<ExperimentConfig>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (!replay_report.empty()) c.out.report = replay_report;
        code = finish(run(c), c.out.report.empty());
    });

    // analyze
    std::string region_path, model_name = "rotor", analyze_report;
    std::string analyze_size;
    int analyze_H = 0;
    double analyze_eps = 0.1;
    auto* analyze = app.add_subcommand("analyze", "shape statistics of a region snapshot");
    analyze->add_option("--region", region_path)->required()->check(CLI::ExistingFile);
    analyze->add_option("--model", model_name, "rotor|divisible|sandpile")->capture_default_str();
    analyze->add_option("--size", analyze_size, "model size n or m (default: the region volume)");
    analyze->add_option("--H", analyze_H)->capture_default_str();
    analyze->add_option("--eps", analyze_eps)->capture_default_str();
    analyze->add_option("--report", analyze_report);
    analyze->callback([&] {
        const Snapshot snap = read_snapshot_file(region_path);
        const Region region = region_from_snapshot(snap);
        const Model model = parse_model(model_name);
        const double size = analyze_size.empty() ? 0.0 : parse_size(analyze_size);
        json report{{"schema", kReportSchema},
                    {"input", region_path},
                    {"model", to_string(model)},
                    {"shape", detail::shape_json(region, model, {size, analyze_H, analyze_eps})}};
        if (analyze_report.empty()) {
            std::cout << report.dump(2) << '\n';
        } else {
            detail::write_text_file(analyze_report, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
        }
    });

    // render
    std::string render_in, render_kind, render_out;
    InverseSquareOptions inv;
    auto* render = app.add_subcommand("render", "PPM image of a d = 2 snapshot");
    render->add_option("--in", render_in)->required()->check(CLI::ExistingFile);
    render->add_option("--kind", render_kind, "rotors|grains|mass|invsq")
        ->required()
        ->check(CLI::IsMember({"rotors", "grains", "mass", "invsq"}));
    render->add_option("--out", render_out)->required();
    render->add_flag("--overlay-gaussian", inv.overlay, "mark the points (1 + 2a) + 2bi");
    render->add_option("--window", inv.window, "invsq: half-width of the w-plane square")->capture_default_str();
    render->add_option("--px", inv.px, "invsq: image side in pixels")->capture_default_str();
    render->callback([&] {
        const Snapshot snap = read_snapshot_file(render_in);
        std::vector<std::int64_t> ivals(snap.values.size());
        for (std::size_t k = 0; k < ivals.size(); ++k) ivals[k] = std::llround(snap.values[k]);
        Image img;
        if (render_kind == "rotors") {
            img = render_rotor_values(snap.window, ivals);
        } else if (render_kind == "grains") {
            img = render_grain_values(snap.window, ivals);
        } else if (render_kind == "mass") {
            MassField nu(snap.window);
            nu.mass = snap.values;
            img = render_mass(nu);
        } else {
            if (snap.kind != "rotors") throw ConfigError("render invsq needs a rotors snapshot");
            const Region region = region_from_snapshot(snap);
            RotorField rotors(snap.window, CyclicOrder::standard(snap.window.dim()), RotorInit::uniform(0));
            for (std::size_t k = 0; k < ivals.size(); ++k)
                if (ivals[k] >= 0) rotors.rotor[k] = static_cast<std::int8_t>(ivals[k]);
            img = render_inverse_square(region, rotors, region.count(), inv);
        }
        write_ppm_file(render_out, img);
    });

    // sweep
    std::string sweep_model = "rotor", sweep_sizes, sweep_out;
    int repeat = 1;
    unsigned jobs = 1;
    ExperimentConfig sweep_cfg;
    auto* sw = app.add_subcommand("sweep", "run a size sweep and write CSV");
    sw->add_option("--model", sweep_model, "rotor|divisible|sandpile")->capture_default_str();
    sw->add_option("--n,--m", sweep_sizes, "comma-separated sizes, e.g. 1e3,1e4,1e5")->required();
    sw->add_option("--d", sweep_cfg.d)->capture_default_str();
    sw->add_option("--H", sweep_cfg.H)->capture_default_str();
    sw->add_option("--init", sweep_cfg.init)->capture_default_str();
    sw->add_option("--seed", sweep_cfg.seed, "base seed; repeat i uses seed + i")->capture_default_str();
    sw->add_option("--walkers", sweep_cfg.walkers)->capture_default_str();
    sw->add_option("--strategy", sweep_cfg.strategy)->capture_default_str();
    sw->add_option("--repeat", repeat)->capture_default_str();
    sw->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    sw->add_flag("--grow", sweep_cfg.grow);
    sw->add_option("--out", sweep_out, "CSV path (default: stdout)");
    sw->callback([&] {
        sweep_cfg.model = parse_model(sweep_model);
        const std::vector<SweepRow> rows = sweep(sweep_cfg, parse_size_list(sweep_sizes), repeat, jobs);
        if (sweep_out.empty()) {
            write_sweep_csv(std::cout, rows);
        } else {
            detail::write_text_file(sweep_out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
        }
        for (const SweepRow& r : rows)
            if (!r.pass) code = kInvariant;
    });

    // verify
    std::string suite = "all", verify_json;
    auto* ver = app.add_subcommand("verify", "run a pinned verification suite");
    ver->add_option("suite", suite, "green|divisible|rotor|sandpile|all")
        ->capture_default_str()
        ->check(CLI::IsMember({"green", "divisible", "rotor", "sandpile", "all"}));
    ver->add_option("--json", verify_json, "write the verdict list as JSON");
    ver->callback([&] {
        const std::vector<Verdict> verdicts = verify(suite);
        bool all = true;
        for (const Verdict& v : verdicts) {
            std::printf("%-4s %-10s %s\n", v.pass ? "PASS" : "FAIL", v.suite.c_str(), v.check.c_str());
            all = all && v.pass;
        }
        if (!verify_json.empty()) {
            json j{{"suite", suite}, {"pass", all}, {"verdicts", verdicts}};
            detail::write_text_file(verify_json, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
        }
        if (!all) code = kInvariant;
    });

    // green dump
    int green_d = 2, green_R0 = 0, green_radius = 10;
    std::string green_out, green_snapshot;
    auto* green = app.add_subcommand("green", "Green's function tables");
    auto* dump = green->add_subcommand("dump", "write g on a box as CSV");
    green->require_subcommand(1);
    dump->add_option("--d", green_d)->capture_default_str();
    dump->add_option("--R0", green_R0, "exact-table radius (0: default)");
    dump->add_option("--radius", green_radius, "dump the box [-radius, radius]^d")->capture_default_str();
    dump->add_option("--out", green_out, "CSV path (default: stdout)");
    dump->add_option("--snapshot", green_snapshot, "also write an LGSIM1 snapshot");
    dump->callback([&] {
        if (green_radius < 0) throw ConfigError("green dump: negative radius");
        const GreenTable g = GreenTable::build(green_d, green_R0);
        const GridWindow box(green_d, green_radius);
        std::vector<double> vals(box.size());
        for (std::size_t k = 0; k < box.size(); ++k) vals[k] = g(box.point(k));
        auto csv = [&](std::ostream& os) {
            os << "# lgsim-green v1 d=" << green_d << " R0=" << g.exact_radius() << " kappa=" << g.kappa() << '\n';
            for (int i = 0; i < green_d; ++i) os << 'x' << i << ',';
            os << "g,source\n";
            char buf[40];
            for (std::size_t k = 0; k < box.size(); ++k) {
                const Point p = box.point(k);
                for (int i = 0; i < green_d; ++i) os << p[i] << ',';
                std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
                os << buf << ',' << (p.norm2() <= std::int64_t{g.exact_radius()} * g.exact_radius() ? "exact" : "asymptotic")
                   << '\n';
            }
        };
        if (green_out.empty()) {
            csv(std::cout);
        } else {
            detail::write_text_file(green_out, csv);
        }
        if (!green_snapshot.empty())
            detail::write_text_file(green_snapshot, [&](std::ostream& os) { write_snapshot(os, "green", box, vals, green_radius); });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    } catch (const ConfigError& e) {
        std::cerr << "lgsim: " << e.what() << '\n';
        return kConfig;
    } catch (const WindowOverflow& e) {
        std::cerr << "lgsim: " << e.what() << '\n';
        return kCapacity;
    } catch (const CapacityError& e) {
        std::cerr << "lgsim: " << e.what() << '\n';
        return kCapacity;
    } catch (const NonConvergence& e) {
        std::cerr << "lgsim: " << e.what() << '\n';
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "lgsim: " << e.what() << '\n';
        return kInvariant;
    }
    return code;
}
