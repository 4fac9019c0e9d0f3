#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "lgsim/experiment.hpp"

using namespace lgsim;

namespace {

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("lgsim_test_" + name)).string();
}

ExperimentConfig replay(const RunOutcome& o)
{
    const json text = json::parse(o.report.dump());
    return text.at("config").get<ExperimentConfig>();
}

}  // namespace

TEST(Config, JsonRoundTrip)
{
    ExperimentConfig c;
    c.model = Model::Sandpile;
    c.size = 1234;
    c.d = 3;
    c.H = -1;
    c.init = "random:99";
    c.walkers = 4;
    c.seed = 0xFFFFFFFFFFFFFFFFULL;
    c.sand_order = "lifo";
    c.visited = "above-floor";
    c.grow = true;
    c.out.report = "r.json";
    const json j = c;
    const ExperimentConfig back = json::parse(j.dump()).get<ExperimentConfig>();
    EXPECT_EQ(json(back), j);
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.model, Model::Sandpile);
}

TEST(Config, MissingFieldsTakeDefaults)
{
    const ExperimentConfig c = json::parse(R"({"model":"divisible","size":5})").get<ExperimentConfig>();
    EXPECT_EQ(c.d, 2);
    EXPECT_DOUBLE_EQ(c.eps_stop, 1e-10);
    EXPECT_THROW(json::parse(R"({"model":"ising","size":5})").get<ExperimentConfig>(), ConfigError);
}

TEST(Run, RotorA3Report)
{
    ExperimentConfig c;
    c.size = 3;
    const RunOutcome o = run(c);
    EXPECT_TRUE(o.pass);
    EXPECT_EQ(o.report["schema"], kReportSchema);
    EXPECT_EQ(o.report["shape"]["volume"], 3);
    EXPECT_DOUBLE_EQ(o.report["shape"]["outradius"].get<double>(), 1.0);
    EXPECT_EQ(o.report["config"], json(c));
}

TEST(Run, DivisibleFiveReport)
{
    ExperimentConfig c;
    c.model = Model::Divisible;
    c.size = 5;
    const RunOutcome o = run(c);
    EXPECT_TRUE(o.pass);
    EXPECT_EQ(o.report["shape"]["volume"], 5);
    EXPECT_DOUBLE_EQ(o.report["divisible"]["u_origin"].get<double>(), 4.0);
    EXPECT_TRUE(o.report["shape"].contains("c"));
    EXPECT_TRUE(o.report["boundary_layer"].contains("points"));
}

TEST(Run, ReplayReproducesIntegers)
{
    ExperimentConfig rc;
    rc.size = 5000;
    rc.init = "random";
    rc.seed = 17;
    const RunOutcome a = run(rc);
    const RunOutcome b = run(replay(a));
    EXPECT_EQ(a.report["rotor"], b.report["rotor"]);
    EXPECT_EQ(a.report["shape"], b.report["shape"]);

    ExperimentConfig sc;
    sc.model = Model::Sandpile;
    sc.size = 5000;
    sc.H = -1;
    const RunOutcome s1 = run(sc);
    const RunOutcome s2 = run(replay(s1));
    EXPECT_EQ(s1.report["sandpile"], s2.report["sandpile"]);
    EXPECT_TRUE(s1.pass);

    ExperimentConfig dc;
    dc.model = Model::Divisible;
    dc.size = 777.7;
    const RunOutcome d1 = run(dc);
    const RunOutcome d2 = run(replay(d1));
    EXPECT_NEAR(d1.report["divisible"]["u_origin"].get<double>(), d2.report["divisible"]["u_origin"].get<double>(),
                1e-9);
    EXPECT_EQ(d1.report["shape"]["volume"], d2.report["shape"]["volume"]);
}

TEST(Run, DifferentSeedsDiffer)
{
    ExperimentConfig c;
    c.size = 2000;
    c.init = "random";
    c.seed = 1;
    const RunOutcome a = run(c);
    c.seed = 2;
    const RunOutcome b = run(c);
    EXPECT_NE(a.report["rotor"]["digest_odometer"], b.report["rotor"]["digest_odometer"]);
}

TEST(Run, WritesCroppedSnapshots)
{
    ExperimentConfig c;
    c.size = 200;
    c.out.region = temp_path("region");
    c.out.rotors = temp_path("rotors");
    c.out.report = temp_path("report.json");
    const RunOutcome o = run(c);
    const Snapshot region = read_snapshot_file(c.out.region);
    const Snapshot rotors = read_snapshot_file(c.out.rotors);
    EXPECT_EQ(region.kind, "region");
    EXPECT_EQ(rotors.kind, "rotors");
    EXPECT_EQ(region_from_snapshot(region).count(), 200u);
    EXPECT_EQ(region_from_snapshot(rotors).count(), 200u);
    EXPECT_EQ(region.window.half_width(), region_from_snapshot(region).max_abs_coord());
    std::ifstream rep(c.out.report);
    EXPECT_EQ(json::parse(rep)["pass"], true);

    // the written rotor table feeds back in as an initial state
    ExperimentConfig again;
    again.size = 1;
    again.init = "file:" + c.out.rotors;
    const RunOutcome one = run(again);
    EXPECT_TRUE(one.pass);
    for (const auto& f : {c.out.region, c.out.rotors, c.out.report}) std::remove(f.c_str());
}

TEST(Sweep, RowsInInputOrder)
{
    ExperimentConfig base;
    base.init = "random";
    const std::vector<SweepRow> one = sweep(base, {1000, 100, 3000}, 3, 1);
    const std::vector<SweepRow> four = sweep(base, {1000, 100, 3000}, 3, 4);
    ASSERT_EQ(one.size(), 9u);
    ASSERT_EQ(four.size(), 9u);
    for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_DOUBLE_EQ(one[i].size, four[i].size);
        EXPECT_EQ(one[i].seed, four[i].seed);
        EXPECT_DOUBLE_EQ(one[i].inradius, four[i].inradius);
        EXPECT_EQ(one[i].symdiff, four[i].symdiff);
        EXPECT_TRUE(one[i].pass);
    }
    EXPECT_DOUBLE_EQ(one[3].size, 100.0);
    EXPECT_EQ(one[4].seed, base.seed + 1);

    std::ostringstream csv;
    write_sweep_csv(csv, one);
    std::istringstream lines(csv.str());
    std::string first, header;
    std::getline(lines, first);
    std::getline(lines, header);
    EXPECT_EQ(first, kSweepSchema);
    EXPECT_EQ(header, "model,n_or_m,d,H,r,inradius,outradius,symdiff,simply_connected,runtime_ms");
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    EXPECT_EQ(rows, 9);
}

TEST(Sweep, ErrorsPropagate)
{
    ExperimentConfig base;
    base.d = 9;
    EXPECT_THROW(sweep(base, {10}, 1, 2), ConfigError);
    EXPECT_THROW(sweep(ExperimentConfig{}, {10}, 0, 1), ConfigError);
}

TEST(Verify, RotorSuite)
{
    const std::vector<Verdict> v = verify("rotor");
    ASSERT_FALSE(v.empty());
    for (const Verdict& x : v) EXPECT_TRUE(x.pass) << x.check << " " << x.detail.dump();
    EXPECT_THROW(verify("everything"), ConfigError);
}

TEST(Verify, SandpileSuite)
{
    for (const Verdict& x : verify("sandpile")) EXPECT_TRUE(x.pass) << x.check << " " << x.detail.dump();
}

TEST(Verify, DivisibleSuite)
{
    for (const Verdict& x : verify("divisible")) EXPECT_TRUE(x.pass) << x.check << " " << x.detail.dump();
}

TEST(Run, BadConfigRejected)
{
    ExperimentConfig c;
    c.size = 2.5;
    EXPECT_THROW(run(c), ConfigError);
    c.size = 10;
    c.init = "file:/nonexistent/rotors";
    EXPECT_THROW(run(c), ConfigError);
    c.init = "north";
    c.model = Model::Sandpile;
    c.H = -5;
    EXPECT_THROW(run(c), ConfigError);
}
