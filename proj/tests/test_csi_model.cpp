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
#include "csikit/csi_model.hpp"
#include "csikit/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace csikit;

namespace
{
    Eigen::MatrixXcd unit_gains(int antennas)
    {
        return Eigen::MatrixXcd::Constant(antennas, kHt20Subcarriers, {1.0, 0.0});
    }

    std::string record(int ch, std::size_t pairs)
    {
        std::ostringstream os;
        os << "ch=" << ch << " ts=10 rssi=-41.5 H=";
        for (std::size_t i = 0; i < pairs; ++i)
            os << (i ? ";" : "") << "0.5,-0.25";
        return os.str();
    }

    CaptureSet random_set(std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<int> antennas_d(1, kMaxAntennas);
        std::uniform_int_distribution<int> frames_d(0, 5);
        std::uniform_int_distribution<int> exponent(-30, 30);
        std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
        std::bernoulli_distribution coin(0.5);

        const bool band5 = coin(rng);
        const Band band = band5 ? Band::band5 : Band::band24;
        const auto channels = valid_channels(band);
        std::uniform_int_distribution<std::size_t> pick(0, channels.size() - 1);
        const int antennas = antennas_d(rng);

        CaptureSet set;
        set.label = coin(rng) ? "" : "run 7/ch=% mix";
        set.swap_state = static_cast<SwapState>(std::uniform_int_distribution<int>(0, 2)(rng));
        const int n = frames_d(rng);
        for (int f = 0; f < n; ++f)
        {
            Eigen::MatrixXcd g(antennas, kHt20Subcarriers);
            for (Eigen::Index r = 0; r < g.rows(); ++r)
                for (Eigen::Index c = 0; c < g.cols(); ++c)
                    g(r, c) = {std::ldexp(mantissa(rng), exponent(rng)), std::ldexp(mantissa(rng), exponent(rng))};
            std::optional<double> rssi;
            if (coin(rng))
                rssi = mantissa(rng) * 90.0;
            set.frames.push_back(make_frame(band, channels[pick(rng)], 1000 * f + 17, g, rssi));
        }
        return set;
    }
} // namespace

TEST_CASE("channel center frequencies")
{
    CHECK(channel_center_frequency(Band::band24, 1) == 2412.0);
    CHECK(channel_center_frequency(Band::band24, 6) == 2437.0);
    CHECK(channel_center_frequency(Band::band24, 13) == 2472.0);
    CHECK(channel_center_frequency(Band::band5, 36) == 5180.0);
    CHECK(channel_center_frequency(Band::band5, 165) == 5825.0);

    CHECK_THROWS_AS(channel_center_frequency(Band::band24, 14), InvalidChannelError);
    CHECK_THROWS_AS(channel_center_frequency(Band::band24, 0), InvalidChannelError);
    CHECK_THROWS_AS(channel_center_frequency(Band::band5, 37), InvalidChannelError);
    CHECK_THROWS_AS(channel_center_frequency(Band::band5, 68), InvalidChannelError);
}

TEST_CASE("center frequency strictly increases with channel number")
{
    for (Band band : {Band::band24, Band::band5})
    {
        const auto channels = valid_channels(band);
        REQUIRE(channels.size() > 1);
        for (std::size_t i = 1; i < channels.size(); ++i)
            CHECK(channel_center_frequency(band, channels[i]) > channel_center_frequency(band, channels[i - 1]));
    }
    CHECK(valid_channels(Band::band24).size() == 13);
    // 36-64 step 4, 100-144 step 4, 149-165 step 4
    CHECK(valid_channels(Band::band5).size() == 8 + 12 + 5);
}

TEST_CASE("validate_frame")
{
    const auto good = make_frame(Band::band24, 6, 0, unit_gains(2));
    CHECK(validate_frame(good).empty());

    auto dc = good;
    dc.subcarrier_indices[27] = 0; // -1 -> 0
    const auto dc_report = validate_frame(dc);
    REQUIRE(!dc_report.empty());
    CHECK(dc_report.front() == "DC subcarrier present");

    auto narrow = good;
    narrow.gains = Eigen::MatrixXcd::Ones(2, 55);
    const auto shape = validate_frame(narrow);
    REQUIRE(shape.size() == 1);
    CHECK(shape.front() == "gain matrix shape mismatch");

    auto off = good;
    off.center_frequency_mhz = 2440.0;
    CHECK(validate_frame(off).size() == 1);

    auto unsorted = good;
    std::swap(unsorted.subcarrier_indices[3], unsorted.subcarrier_indices[4]);
    CHECK(validate_frame(unsorted).size() == 1);
}

TEST_CASE("parse_capture examples")
{
    SUBCASE("empty record stream")
    {
        const auto set = parse_capture("CSIKIT v1 antennas=2 band=24\n");
        CHECK(set.frames.empty());
    }
    SUBCASE("one record on channel 6")
    {
        const auto set = parse_capture("CSIKIT v1 antennas=2 band=24\n" + record(6, 112) + "\n");
        REQUIRE(set.frames.size() == 1);
        const auto &f = set.frames.front();
        CHECK(f.center_frequency_mhz == 2437.0);
        CHECK(f.num_rx_antennas == 2);
        CHECK(f.rssi_dbm == -41.5);
        CHECK(f.gains(1, 55) == std::complex<double>(0.5, -0.25));
        CHECK(validate_frame(f).empty());
    }
    SUBCASE("55 subcarriers")
    {
        try
        {
            parse_capture("CSIKIT v1 antennas=1 band=24\n" + record(6, 55));
            FAIL("expected a parse error");
        }
        catch (const ParseError &e)
        {
            CHECK(std::string(e.what()).find("subcarrier count") != std::string::npos);
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("malformed input")
    {
        CHECK_THROWS_AS(parse_capture(""), ParseError);
        CHECK_THROWS_AS(parse_capture("CSIKIT v2 antennas=2 band=24\n"), ParseError);
        CHECK_THROWS_AS(parse_capture("CSIKIT v1 antennas=0 band=24\n"), ParseError);
        CHECK_THROWS_AS(parse_capture("CSIKIT v1 antennas=2 band=60\n"), ParseError);
        CHECK_THROWS_AS(parse_capture("CSIKIT v1 antennas=1 band=24\n" + record(14, 56)), ParseError);
        auto bad = record(6, 56);
        bad.replace(bad.find("0.5,-0.25"), 9, "nan,0");
        CHECK_THROWS_WITH_AS(parse_capture("CSIKIT v1 antennas=1 band=24\n" + bad),
                             doctest::Contains("non-finite"), ParseError);
        CHECK_THROWS_AS(parse_capture("CSIKIT v1 antennas=1 band=24\nch=6 ts=1 H=1,0\n"), ParseError);
    }
}

TEST_CASE("serialize then parse is the identity on random capture sets")
{
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto set = random_set(rng);
        const int antennas = set.frames.empty() ? 2 : set.frames.front().num_rx_antennas;
        const auto parsed = parse_capture(serialize_capture(set, antennas));
        CHECK(parsed == set);
        for (const auto &f : parsed.frames)
            CHECK(validate_frame(f).empty());
    }
}

TEST_CASE("capture files, plain and gzip")
{
    std::mt19937_64 rng(3);
    CaptureSet set;
    while (set.frames.size() < 2)
        set = random_set(rng);

    const auto dir = std::filesystem::temp_directory_path() / "csikit_test_capture_io";
    std::filesystem::create_directories(dir);
    write_capture_file(dir / "a.csik", set);
    write_capture_file(dir / "a.csik.gz", set);
    CHECK(read_capture_file(dir / "a.csik") == set);
    CHECK(read_capture_file(dir / "a.csik.gz") == set);
    CHECK(std::filesystem::file_size(dir / "a.csik.gz") < std::filesystem::file_size(dir / "a.csik"));

    {
        std::ofstream os(dir / "bad.csik");
        os << "CSIKIT v1 antennas=1 band=24\n" << record(6, 3) << "\n";
    }
    CHECK_THROWS_WITH_AS(read_capture_file(dir / "bad.csik"), doctest::Contains("bad.csik"), ParseError);
    std::filesystem::remove_all(dir);
}
