// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "peripore/cli_io.hpp"

using namespace peripore;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("peripore_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(ConfigParse, ScenarioDefaults) {
    const RunConfig rc = parse_config_text(R"({"scenario": "consolidation_step"})");
    EXPECT_EQ(rc.scenario.name, "consolidation_step");
    EXPECT_DOUBLE_EQ(rc.scenario.newmark.dt, 1e-4);
    EXPECT_DOUBLE_EQ(rc.scenario.solid.elastic.bulk, 2.1e5);
    EXPECT_EQ(rc.output_dir, "runs/consolidation_step");
}

TEST(ConfigParse, OverridesAndLogsDefaults) {
    std::vector<std::string> lines;
    const RunConfig rc = parse_config_text(R"({"scenario": "consolidation_step", "model": {"G": 0.1}})",
                                           [&](const std::string& l) { lines.push_back(l); });
    EXPECT_DOUBLE_EQ(rc.scenario.G, 0.1);
    bool logged_dt = false, logged_G = false;
    for (const auto& l : lines) {
        logged_dt = logged_dt || l.rfind("default solver = ", 0) == 0;
        logged_G = logged_G || l.find("model.G") != std::string::npos;
    }
    EXPECT_TRUE(logged_dt);
    EXPECT_FALSE(logged_G);
}

TEST(ConfigParse, UnknownKeyIsNamed) {
    const auto e = config_error(R"({"scenario": "consolidation_step", "solver": {"dtt": 1e-3}})");
    EXPECT_NE(e.find("solver.dtt"), std::string::npos) << e;
    const auto top = config_error(R"({"scenario": "consolidation_step", "colour": 1})");
    EXPECT_NE(top.find("colour"), std::string::npos) << top;
}

TEST(ConfigParse, NegativeStepIsNamed) {
    const auto e = config_error(R"({"scenario": "consolidation_step", "solver": {"dt": -1e-4}})");
    EXPECT_NE(e.find("solver.dt"), std::string::npos) << e;
}

TEST(ConfigParse, WrongTypeIsNamed) {
    const auto e = config_error(R"({"scenario": "consolidation_step", "model": {"G": [1]}})");
    EXPECT_NE(e.find("model.G"), std::string::npos) << e;
}

TEST(ConfigParse, UnknownScenarioAndMissingScenario) {
    EXPECT_NE(config_error(R"({"scenario": "dam_break"})").find("dam_break"), std::string::npos);
    EXPECT_NE(config_error(R"({"model": {"G": 1}})").find("scenario"), std::string::npos);
}

TEST(ConfigParse, SyntaxErrorReportsLine) {
    const auto e = config_error("{\n  \"scenario\": \"consolidation_step\",\n  \"model\": {\"G\": }\n}");
    EXPECT_NE(e.find("line 3"), std::string::npos) << e;
}

TEST(ConfigParse, CommentsAllowed) {
    const RunConfig rc = parse_config_text("{\n// step load\n\"scenario\": \"consolidation_step\" /* 1D */\n}");
    EXPECT_EQ(rc.scenario.name, "consolidation_step");
}

TEST(ConfigParse, UnitSuffixes) {
    const RunConfig rc = parse_config_text(R"({"scenario": "strain_localization",
        "grid": {"spacing": "50 cm"},
        "solver": {"dt": "5 ms"},
        "material": {"bulk": "1.5 MPa", "solid_density": "2 g/cm^3"},
        "boundary": {"y_max": {"load": {"amplitude": "30 cm/s"}}}})");
    EXPECT_DOUBLE_EQ(rc.scenario.grid.spacing, 0.5);
    EXPECT_DOUBLE_EQ(rc.scenario.newmark.dt, 5e-3);
    EXPECT_DOUBLE_EQ(rc.scenario.solid.elastic.bulk, 1500.0);
    EXPECT_DOUBLE_EQ(rc.scenario.solid_density, 2000.0);
    EXPECT_DOUBLE_EQ(rc.scenario.boundary[Face::YMax].load.amplitude, 0.3);
}

TEST(ConfigParse, UnitDimensionMismatch) {
    const auto e = config_error(R"({"scenario": "consolidation_step", "solver": {"dt": "3 m"}})");
    EXPECT_NE(e.find("solver.dt"), std::string::npos) << e;
    EXPECT_NE(config_error(R"({"scenario": "consolidation_step", "solver": {"dt": "3 fortnights"}})")
                  .find("unknown unit"),
              std::string::npos);
}

TEST(ConfigParse, UnstableNewmarkWarns) {
    std::vector<std::string> lines;
    parse_config_text(R"({"scenario": "consolidation_step", "solver": {"beta2": 0.3}})",
                      [&](const std::string& l) { lines.push_back(l); });
    bool warned = false;
    for (const auto& l : lines) warned = warned || l.rfind("warning:", 0) == 0;
    EXPECT_TRUE(warned);
}

TEST(ConfigParse, DeskScaleOverride) {
    const RunConfig full = parse_config_text(R"({"scenario": "strain_localization"})", {}, false);
    EXPECT_FALSE(full.scenario.desk_scale);
    EXPECT_DOUBLE_EQ(full.scenario.grid.spacing, 0.3);
}

TEST(ConfigParse, RoundTripIsStable) {
    for (const auto& name : scenario_names())
        for (bool desk : {true, false}) {
            const RunConfig rc = default_run_config(name, desk);
            const auto once = serialize_config(rc).dump();
            const auto twice = serialize_config(parse_config_text(once)).dump();
            EXPECT_EQ(once, twice) << name;
            EXPECT_EQ(config_hash(rc), config_hash(parse_config_text(once)));
        }
}

TEST(ConfigParse, HashTracksContent) {
    RunConfig a = default_run_config("consolidation_step"), b = a;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.scenario.G = 0.5;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Checksums, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}

TEST(Outputs, FilesAndManifest) {
    TempDir tmp;
    RunConfig rc = default_run_config("consolidation_step");
    rc.scenario.t_end = 0.002;
    rc.scenario.snapshot_times = {0.0, 0.002};
    const RunResult r = simulate(rc.scenario);
    ASSERT_TRUE(r.complete);
    const auto files = write_outputs(r, rc, tmp.path, {true, 1});
    for (const char* f : {"config.json", "probe_A.csv", "probe_B.csv", "monitor.csv", "snapshot_000.csv",
                          "snapshot_001.csv", "manifest.json"})
        EXPECT_TRUE(std::filesystem::exists(tmp.path / f)) << f;

    const auto man = io::json::parse(slurp(tmp.path / "manifest.json"));
    EXPECT_EQ(man["config_hash"], config_hash(rc));
    EXPECT_EQ(man["deterministic"], true);
    EXPECT_EQ(man["complete"], true);
    for (const auto& f : man["files"]) {
        const std::string body = slurp(tmp.path / f["name"].get<std::string>());
        EXPECT_EQ(f["bytes"].get<std::size_t>(), body.size());
        EXPECT_EQ(f["fnv1a"].get<std::string>(), hex64(fnv1a(body)));
    }

    std::istringstream probe(slurp(tmp.path / "probe_A.csv"));
    std::string header;
    std::getline(probe, header);
    EXPECT_EQ(header.rfind("time,", 0), 0u) << header;
    int rows = 0;
    for (std::string line; std::getline(probe, line);) rows += !line.empty();
    EXPECT_EQ(rows, 21);

    // The written config reproduces the run configuration.
    const RunConfig back = parse_config(tmp.path / "config.json");
    EXPECT_EQ(config_hash(back), config_hash(rc));
}

TEST(Outputs, MissingConfigIsIoError) {
    EXPECT_THROW(parse_config("/nonexistent/peripore.json"), IoError);
}

TEST(SampleConfigs, AllParse) {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(PERIPORE_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        SCOPED_TRACE(e.path().string());
        std::vector<std::string> warnings;
        const RunConfig rc = parse_config(e.path(), [&](const std::string& l) {
            if (l.rfind("warning:", 0) == 0) warnings.push_back(l);
        });
        EXPECT_NO_THROW(rc.scenario.validate());
        EXPECT_TRUE(warnings.empty());
        ++n;
    }
    EXPECT_GE(n, 5);
}

TEST(SampleConfigs, UnitsResolved) {
    const RunConfig fast = parse_config(std::filesystem::path(PERIPORE_CONFIG_DIR) / "strain_localization_fast.json");
    EXPECT_DOUBLE_EQ(fast.scenario.stop_displacement, 0.5);
    EXPECT_DOUBLE_EQ(fast.scenario.boundary[Face::YMax].load.amplitude, 1.5);
    const RunConfig wave = parse_config(std::filesystem::path(PERIPORE_CONFIG_DIR) / "strip_footing_wave.json");
    ASSERT_EQ(wave.scenario.snapshot_times.size(), 4u);
    EXPECT_DOUBLE_EQ(wave.scenario.snapshot_times[0], 0.05);
}
