// SPDX-License-Identifier: Apache-2.0
//
// csikit - CSI phase-offset characterization and correction toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <doctest.h>

#include "csikit/capture_io.hpp"
#include "csikit/cli.hpp"
#include "csikit/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace csikit;
using namespace csikit::cli;
namespace fs = std::filesystem;

namespace
{
    // Fresh scratch directory per test case, removed on exit.
    struct ScratchDir
    {
        fs::path path;

        explicit ScratchDir(const std::string &name)
            : path(fs::temp_directory_path() / ("csikit_test_cli_" + name))
        {
            fs::remove_all(path);
            fs::create_directories(path);
        }
        ~ScratchDir() { fs::remove_all(path); }
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    }

    std::vector<std::vector<std::string>> read_csv(const fs::path &p)
    {
        std::vector<std::vector<std::string>> rows;
        std::istringstream is(slurp(p));
        std::string line;
        while (std::getline(is, line))
        {
            rows.emplace_back(1);
            for (char c : line)
            {
                if (c == ',')
                    rows.back().emplace_back();
                else
                    rows.back().back().push_back(c);
            }
        }
        return rows;
    }

    json scene_config(double aoa_deg, double corruption, std::uint64_t seed)
    {
        return {{"scene",
                 {{"paths", {{{"gain", 1.0}, {"aoa_deg", aoa_deg}, {"delay_ns", 10.0}}}},
                  {"chip_offset", {{"kind", "reference_24ghz"}}},
                  {"corruption_prob", corruption},
                  {"noise_std", 0.01}}},
                {"seed", seed},
                {"packets", 10}};
    }

    void expect_same_tree(const fs::path &a, const fs::path &b, bool skip_configs = false)
    {
        std::vector<fs::path> files;
        for (const auto &e : fs::recursive_directory_iterator(a))
            if (e.is_regular_file() && !(skip_configs && e.path().filename() == "config.json"))
                files.push_back(fs::relative(e.path(), a));
        REQUIRE_FALSE(files.empty());
        for (const auto &f : files)
        {
            INFO(f.string());
            CHECK(slurp(a / f) == slurp(b / f));
        }
    }
} // namespace

TEST_CASE("channel lists")
{
    CHECK(parse_channel_list("1-13").size() == 13);
    CHECK(parse_channel_list("11,1,6") == std::vector<int>{1, 6, 11});
    CHECK(parse_channel_list("1-3,2") == std::vector<int>{1, 2, 3});
    CHECK(parse_channel_list("36-48") == std::vector<int>{36, 40, 44, 48});
    CHECK_THROWS_AS(parse_channel_list("1-14"), InvalidChannelError);
    CHECK_THROWS_AS(parse_channel_list("5-2"), InvalidArgumentError);
    CHECK_THROWS_AS(parse_channel_list("1;2"), InvalidArgumentError);
    CHECK_THROWS_AS(parse_channel_list(""), InvalidArgumentError);
}

TEST_CASE("scene json")
{
    const auto j = scene_config(12.0, 0.2, 1).at("scene");
    const auto s = scene_from_json(j);
    CHECK(s.paths.size() == 1);
    CHECK(s.paths[0].aoa_deg == 12.0);
    CHECK(s.corruption_prob == 0.2);
    CHECK(scene_to_json(scene_from_json(scene_to_json(s))) == scene_to_json(s));

    auto typo = j;
    typo["corruption_probability"] = 0.1;
    CHECK_THROWS_WITH_AS(scene_from_json(typo), "unknown key 'corruption_probability' in scene", InvalidSceneError);
    auto wrong = j;
    wrong["noise_std"] = "loud";
    CHECK_THROWS_AS(scene_from_json(wrong), InvalidSceneError);
    CHECK(scene_from_json({{"paths", {{{"aoa_deg", 3}}}}, {"chip_offset", -0.5}}).true_chip_offset.at(2437.0) == -0.5);

    const auto m = steering_from_json({{"theta_step_deg", 1.0}, {"smoothing_window", 20}});
    CHECK(m.theta_grid_deg.size() == 91);
    CHECK(m.smoothing_window == 20);
    CHECK(steering_from_json(steering_to_json(m)).theta_grid_deg == m.theta_grid_deg);
}

TEST_CASE("simulate is deterministic and its config replays")
{
    ScratchDir tmp("determinism");
    auto config = scene_config(10.0, 0.25, 99);
    config["channels"] = "1,6,11";
    cmd_simulate(config, tmp.path / "a");
    cmd_simulate(config, tmp.path / "b");
    expect_same_tree(tmp.path / "a", tmp.path / "b");

    // the persisted config carries the resolved seeds and replays exactly
    const auto persisted = json::parse(slurp(tmp.path / "a" / "config.json"));
    CHECK(persisted.at("scene").at("rng_seed") == 99);
    CHECK(persisted.at("channels") == json({1, 6, 11}));
    cmd_simulate(persisted, tmp.path / "c");
    expect_same_tree(tmp.path / "a", tmp.path / "c");

    auto other = config;
    other["seed"] = 100;
    cmd_simulate(other, tmp.path / "d");
    CHECK(slurp(tmp.path / "a" / "ch06.csik") != slurp(tmp.path / "d" / "ch06.csik"));
}

TEST_CASE("downstream outputs are byte-identical across runs")
{
    ScratchDir tmp("downstream");
    cmd_simulate(scene_config(-8.0, 0.25, 5), tmp.path / "sim");
    for (const char *run : {"r1", "r2"})
    {
        const fs::path out = tmp.path / run;
        cmd_correct({{"inputs", {(tmp.path / "sim").string()}}}, out / "correct");
        cmd_stitch({{"inputs", {(tmp.path / "sim").string()}}}, out / "stitch");
        cmd_aoa({{"inputs", {(tmp.path / "sim").string()}}}, out / "aoa");
        cmd_plot({{"inputs", {(out / "correct" / "before_after.csv").string()}}, {"kind", "offset"}}, out / "plot");
        cmd_plot({{"inputs", {(out / "correct" / "histogram.csv").string()}}, {"kind", "histogram"}}, out / "plot");
        cmd_plot({{"inputs", {(out / "aoa" / "pseudospectrum.csv").string()}}, {"kind", "pseudospectrum"}},
                 out / "plot");
        cmd_plot({{"inputs", {(out / "aoa" / "aoa_vs_truth.csv").string()}}, {"kind", "aoa"}}, out / "plot");
        cmd_report({{"inputs", {(out / "correct" / "correction_summary.json").string()}}}, out / "report");
    }
    // config.json records the differing input paths
    expect_same_tree(tmp.path / "r1", tmp.path / "r2", true);
    for (const char *svg : {"offset.svg", "histogram.svg", "pseudospectrum.svg", "aoa.svg"})
        CHECK(slurp(tmp.path / "r1" / "plot" / svg).starts_with("<?xml"));
}

TEST_CASE("report reproduces constant per-channel offsets")
{
    // one capture per channel whose offset is the same on every subcarrier
    const std::vector<double> table{-0.1628, -0.1557, -0.1477, -0.1388, -0.1303, -0.1228, -0.1163,
                                    -0.1114, -0.1079, -0.1054, -0.1031, -0.1044, -0.0883};
    ScratchDir tmp("fixture");
    fs::create_directories(tmp.path / "caps");
    for (int c = 1; c <= 13; ++c)
    {
        CaptureSet set;
        for (int p = 0; p < 4; ++p)
        {
            Eigen::MatrixXcd gains(2, kHt20Subcarriers);
            gains.row(0).setConstant({0.8, 0.6});
            gains.row(1) = gains.row(0) * std::polar(1.0, table[static_cast<std::size_t>(c - 1)]);
            set.frames.push_back(make_frame(Band::band24, c, 1000 * p, gains));
        }
        write_capture_file(tmp.path / "caps" / ("ch" + std::to_string(c) + ".csik"), set);
    }
    cmd_correct({{"inputs", {(tmp.path / "caps").string()}}}, tmp.path / "correct");
    const auto text = cmd_report({{"inputs", {(tmp.path / "correct" / "correction_summary.json").string()}}},
                                 tmp.path / "report");
    CHECK(text.find("      7        2442.0       -0.1163") != std::string::npos);

    const auto rows = read_csv(tmp.path / "report" / "offset_table.csv");
    REQUIRE(rows.size() == 14);
    CHECK(rows[0] == std::vector<std::string>{"channel", "center_mhz", "offset_rad", "packets"});
    for (int c = 1; c <= 13; ++c)
    {
        const auto &row = rows[static_cast<std::size_t>(c)];
        CHECK(std::stoi(row[0]) == c);
        CHECK(std::stod(row[1]) == 2407.0 + 5.0 * c);
        CHECK(std::stod(row[2]) == doctest::Approx(table[static_cast<std::size_t>(c - 1)]).epsilon(1e-12));
        CHECK(row[3] == "4");
    }
}

TEST_CASE("swap mode recovers the cable offset and the chip offset")
{
    ScratchDir tmp("swap");
    auto config = scene_config(0.0, 0.25, 17);
    config["scene"]["cable_offset_rad"] = 0.3;
    config["scene"]["paths"][0]["delay_ns"] = 0.0;
    config["swap"] = true;
    cmd_simulate(config, tmp.path / "sim");
    CHECK(fs::is_directory(tmp.path / "sim" / "direct"));
    CHECK(fs::is_directory(tmp.path / "sim" / "swapped"));

    cmd_correct({{"inputs", {(tmp.path / "sim").string()}}, {"swap", true}}, tmp.path / "correct");
    const auto summary = json::parse(slurp(tmp.path / "correct" / "correction_summary.json"));
    CHECK(summary.at("swap").at("cable_offset_rad").get<double>() == doctest::Approx(0.3).epsilon(0.01 / 0.3));
    // broadside: the calibrated offset is the chip profile itself
    CHECK(summary.at("channels").at("7").at("median_rad").get<double>() == doctest::Approx(-0.1163).epsilon(0.01 / 0.1163));

    const auto correction = read_correction_csv(tmp.path / "correct" / "correction.csv");
    CHECK(correction.measured_count() == static_cast<std::size_t>(kGlobalBins));

    CHECK_THROWS_AS(cmd_correct({{"inputs", {(tmp.path / "sim" / "direct").string()}}, {"swap", true}}, tmp.path / "x"),
                    Error);
}

TEST_CASE("calibrated aoa over a batch")
{
    ScratchDir tmp("batch");
    auto cal = scene_config(0.0, 0.25, 3);
    cal["scene"]["paths"][0]["delay_ns"] = 0.0;
    cmd_simulate(cal, tmp.path / "cal");
    cmd_correct({{"inputs", {(tmp.path / "cal").string()}}}, tmp.path / "calcorr");

    json batch{{"seed", 11}, {"packets", 10}, {"scenes", json::array()}};
    for (double theta : {-25.0, 14.0})
    {
        auto s = scene_config(theta, 0.25, 0).at("scene");
        batch["scenes"].push_back({{"name", "theta" + std::to_string(static_cast<int>(theta))}, {"scene", s}});
    }
    cmd_simulate(batch, tmp.path / "batch");
    const auto persisted = json::parse(slurp(tmp.path / "batch" / "config.json"));
    CHECK(persisted.at("scenes").at(0).at("scene").at("rng_seed") !=
          persisted.at("scenes").at(1).at("scene").at("rng_seed"));

    cmd_aoa({{"inputs", {(tmp.path / "batch").string()}},
             {"calibration", (tmp.path / "calcorr" / "correction.csv").string()}},
            tmp.path / "aoa");
    CHECK(fs::exists(tmp.path / "aoa" / "theta-25" / "pseudospectrum.csv"));
    CHECK(fs::exists(tmp.path / "aoa" / "theta14" / "aoa_summary.txt"));
    const auto rows = read_csv(tmp.path / "aoa" / "aoa_vs_truth.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "theta-25");
    CHECK(rows[2][0] == "theta14");
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        INFO(rows[i][0]);
        CHECK(std::abs(std::stod(rows[i][4])) <= 1.0);
    }
}

TEST_CASE("error handling")
{
    ScratchDir tmp("errors");
    auto config = scene_config(0.0, 0.0, 1);
    config["packets"] = 0;
    CHECK_THROWS_WITH_AS(cmd_simulate(config, tmp.path / "sim"), "packets must be at least 1", InvalidArgumentError);
    CHECK_FALSE(fs::exists(tmp.path / "sim"));
    config.erase("scene");
    config["packets"] = 1;
    CHECK_THROWS_AS(cmd_simulate(config, tmp.path / "sim"), InvalidSceneError);

    {
        std::ofstream(tmp.path / "bad.csik") << "CSIKIT v1 antennas=2 band=24\nframe nonsense\n";
    }
    const auto bad = (tmp.path / "bad.csik").string();
    try
    {
        cmd_correct({{"inputs", {bad}}}, tmp.path / "out");
        FAIL("expected a parse error");
    }
    catch (const ParseError &e)
    {
        CHECK(std::string(e.what()).find("bad.csik") != std::string::npos);
    }
    CHECK_THROWS_AS(cmd_correct({{"inputs", {(tmp.path / "missing").string()}}}, tmp.path / "out"), Error);
    fs::create_directories(tmp.path / "empty");
    CHECK_THROWS_AS(cmd_stitch({{"inputs", {(tmp.path / "empty").string()}}}, tmp.path / "out"), Error);

    cmd_simulate(scene_config(5.0, 0.0, 2), tmp.path / "sim");
    CHECK_THROWS_AS(cmd_correct({{"inputs", {(tmp.path / "sim").string()}}, {"packets", 0}}, tmp.path / "out"),
                    InvalidArgumentError);
    CHECK_THROWS_AS(cmd_correct({{"inputs", {(tmp.path / "sim").string()}}, {"channels", "36"}}, tmp.path / "out"),
                    InsufficientDataError);

    cmd_correct({{"inputs", {(tmp.path / "sim").string()}}}, tmp.path / "correct");
    CHECK_THROWS_WITH_AS(
        cmd_plot({{"inputs", {(tmp.path / "correct" / "histogram.csv").string()}}, {"kind", "pseudospectrum"}},
                 tmp.path / "plot"),
        doctest::Contains("schema mismatch"), Error);
    CHECK_THROWS_AS(cmd_plot({{"inputs", {(tmp.path / "correct" / "histogram.csv").string()}}, {"kind", "pie"}},
                             tmp.path / "plot"),
                    InvalidArgumentError);
    CHECK_THROWS_AS(cmd_report({{"inputs", {(tmp.path / "sim" / "truth.json").string()}}}, tmp.path / "report"), Error);
}

TEST_CASE("aoa without a truth sidecar leaves the truth column empty")
{
    ScratchDir tmp("nosidecar");
    cmd_simulate(scene_config(5.0, 0.0, 4), tmp.path / "sim");
    fs::remove(tmp.path / "sim" / "truth.json");
    cmd_aoa({{"inputs", {(tmp.path / "sim" / "ch01.csik").string(), (tmp.path / "sim" / "ch02.csik").string()}}},
            tmp.path / "aoa");
    const auto rows = read_csv(tmp.path / "aoa" / "aoa_vs_truth.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "captures");
    CHECK(rows[1][1].empty());
    CHECK_FALSE(rows[1][2].empty());
    CHECK(rows[1][4].empty());
}
