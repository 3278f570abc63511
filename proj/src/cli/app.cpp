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


#include "csikit/cli.hpp"

#include "csikit/error.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace csikit::cli
{
    namespace
    {
        struct Flags
        {
            std::string config_path;
            std::string out;
            std::optional<std::uint64_t> seed;
            std::optional<int> packets;
            std::optional<int> num_paths;
            std::optional<double> tolerance;
            std::string channels;
            std::string kind;
            std::string calibration;
            std::vector<std::string> inputs;
            std::vector<std::string> swapped;
            bool swap = false;
            bool compress = false;
        };

        json load_config(const std::string &path)
        {
            if (path.empty())
                return json::object();
            std::ifstream is(path, std::ios::binary);
            if (!is)
                throw Error("cannot open config " + path);
            try
            {
                auto j = json::parse(is);
                if (!j.is_object())
                    throw Error(path + ": config must be a JSON object");
                return j;
            }
            catch (const json::parse_error &e)
            {
                throw Error(path + ": invalid JSON: " + e.what());
            }
        }

        // Command-line flags take precedence over the config file.
        json resolve(const std::string &command, const Flags &f)
        {
            json config = load_config(f.config_path);
            if (config.contains("format_version") && config.at("format_version") != kConfigVersion)
                throw Error("unsupported config format_version " + config.at("format_version").dump());
            config["format_version"] = kConfigVersion;
            config["command"] = command;
            if (f.seed)
                config["seed"] = *f.seed;
            if (f.packets)
                config["packets"] = *f.packets;
            if (f.num_paths)
                config["num_paths"] = *f.num_paths;
            if (f.tolerance)
                config["tolerance"] = *f.tolerance;
            if (!f.channels.empty())
                config["channels"] = parse_channel_list(f.channels);
            if (!f.kind.empty())
                config["kind"] = f.kind;
            if (!f.calibration.empty())
                config["calibration"] = f.calibration;
            if (!f.inputs.empty())
                config["inputs"] = f.inputs;
            if (!f.swapped.empty())
                config["swapped_inputs"] = f.swapped;
            if (f.swap)
                config["swap"] = true;
            if (f.compress)
                config["compress"] = true;
            return config;
        }

        void configure_logging()
        {
            auto logger = spdlog::stderr_color_mt("csikit");
            logger->set_pattern("%^%l%$: %v");
            spdlog::set_default_logger(logger);
            spdlog::set_level(spdlog::level::info);
            if (const char *env = std::getenv("CSIKIT_LOG"))
                spdlog::set_level(spdlog::level::from_str(env));
        }
    } // namespace

    int run(int argc, char **argv)
    {
        if (!spdlog::get("csikit"))
            configure_logging();

        CLI::App app{"Phase offset calibration and angle-of-arrival estimation for two-antenna HT20 CSI"};
        app.require_subcommand(1);
        Flags f;

        auto common = [&](CLI::App *sub)
        {
            sub->add_option("--config", f.config_path, "JSON config; flags override its keys")->check(CLI::ExistingFile);
            sub->add_option("-o,--out", f.out, "output directory")->required();
        };
        auto filters = [&](CLI::App *sub)
        {
            sub->add_option("--channels", f.channels, "channel list, e.g. 1-13 or 1,6,11");
            sub->add_option("--packets", f.packets, "packets per channel to use");
        };

        auto *simulate = app.add_subcommand("simulate", "synthesize capture files from a scene");
        common(simulate);
        filters(simulate);
        simulate->add_option("--seed", f.seed, "top-level random seed");
        simulate->add_flag("--swap", f.swap, "write direct/ and swapped/ cable configurations");
        simulate->add_flag("--gzip", f.compress, "gzip the capture files");

        auto *correct = app.add_subcommand("correct", "estimate the chip phase offset from captures");
        common(correct);
        filters(correct);
        correct->add_option("inputs", f.inputs, "capture files or directories");
        correct->add_flag("--swap", f.swap, "combine direct and cable-swapped captures");
        correct->add_option("--swapped", f.swapped, "swapped-configuration captures");

        auto *stitch = app.add_subcommand("stitch", "stitch per-channel offsets and check overlaps");
        common(stitch);
        filters(stitch);
        stitch->add_option("inputs", f.inputs, "capture files or directories");
        stitch->add_option("--tolerance", f.tolerance, "overlap disagreement threshold in radians");

        auto *aoa = app.add_subcommand("aoa", "estimate the angle of arrival with MUSIC");
        common(aoa);
        filters(aoa);
        aoa->add_option("inputs", f.inputs, "scene directory, batch directory or capture files");
        aoa->add_option("--calibration", f.calibration, "correction.csv of a calibration run")->check(CLI::ExistingFile);
        aoa->add_option("--num-paths", f.num_paths, "number of signal paths");

        auto *plot = app.add_subcommand("plot", "render a CSV output as SVG");
        common(plot);
        plot->add_option("input", f.inputs, "CSV file")->required()->expected(1);
        plot->add_option("--kind", f.kind, "offset, histogram, pseudospectrum or aoa")->required();

        auto *report = app.add_subcommand("report", "tabulate per-channel offsets");
        common(report);
        report->add_option("summary", f.inputs, "correction_summary.json")->required()->expected(1);

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            return app.exit(e);
        }

        try
        {
            const std::filesystem::path out(f.out);
            if (simulate->parsed())
                cmd_simulate(resolve("simulate", f), out);
            else if (correct->parsed())
                cmd_correct(resolve("correct", f), out);
            else if (stitch->parsed())
                cmd_stitch(resolve("stitch", f), out);
            else if (aoa->parsed())
                cmd_aoa(resolve("aoa", f), out);
            else if (plot->parsed())
                cmd_plot(resolve("plot", f), out);
            else if (report->parsed())
                std::cout << cmd_report(resolve("report", f), out);
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }

} // namespace csikit::cli
