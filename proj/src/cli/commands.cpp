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

#include "csikit/capture_io.hpp"
#include "csikit/error.hpp"
#include "csikit/offset_pipeline.hpp"
#include "csikit/phase.hpp"
#include "csikit/stitch.hpp"

#include "svg.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace csikit::cli
{
    namespace
    {
        void write_text(const fs::path &path, const std::string &text)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw Error("cannot write " + path.string());
            os << text;
            if (!os)
                throw Error("write error in " + path.string());
        }

        std::string read_text(const fs::path &path)
        {
            std::ifstream is(path, std::ios::binary);
            if (!is)
                throw Error("cannot open " + path.string());
            std::ostringstream os;
            os << is.rdbuf();
            return os.str();
        }

        json read_json(const fs::path &path)
        {
            try
            {
                return json::parse(read_text(path));
            }
            catch (const json::parse_error &e)
            {
                throw Error(path.string() + ": invalid JSON: " + e.what());
            }
        }

        void make_output_dir(const fs::path &dir)
        {
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec || !fs::is_directory(dir))
                throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
        }

        void persist_config(const fs::path &out, const json &config)
        {
            write_text(out / "config.json", config.dump(2) + "\n");
        }

        std::string csv_double(std::optional<double> v)
        {
            return v ? format_double(*v) : std::string();
        }

        std::vector<std::string> split_csv(const std::string &line)
        {
            std::vector<std::string> out(1);
            for (char c : line)
            {
                if (c == ',')
                    out.emplace_back();
                else if (c != '\r')
                    out.back().push_back(c);
            }
            return out;
        }

        std::vector<std::string> string_list(const json &config, const char *key)
        {
            if (!config.contains(key))
                return {};
            const auto &v = config.at(key);
            if (v.is_string())
                return {v.get<std::string>()};
            if (!v.is_array())
                throw InvalidArgumentError(std::string("'") + key + "' must be a path or a list of paths");
            std::vector<std::string> out;
            for (const auto &s : v)
                out.push_back(s.get<std::string>());
            return out;
        }

        std::vector<int> channel_list(const json &config, std::vector<int> fallback)
        {
            if (!config.contains("channels") || config.at("channels").is_null())
                return fallback;
            const auto &v = config.at("channels");
            if (v.is_string())
                return parse_channel_list(v.get<std::string>());
            std::set<int> out;
            for (const auto &c : v)
            {
                band_of_channel(c.get<int>());
                out.insert(c.get<int>());
            }
            if (out.empty())
                throw InvalidArgumentError("empty channel list");
            return {out.begin(), out.end()};
        }

        std::string capture_name(int channel, bool compress)
        {
            std::string name = (channel < 10 ? "ch0" : "ch") + std::to_string(channel) + ".csik";
            return compress ? name + ".gz" : name;
        }

        bool is_capture_file(const fs::path &p)
        {
            const std::string name = p.filename().string();
            return fs::is_regular_file(p) && (name.ends_with(".csik") || name.ends_with(".csik.gz"));
        }

        // Input selection shared by correct, stitch and aoa.
        struct CaptureFilter
        {
            std::optional<std::vector<int>> channels;
            std::optional<int> packets;

            static CaptureFilter from(const json &config)
            {
                CaptureFilter f;
                if (config.contains("channels") && !config.at("channels").is_null())
                    f.channels = channel_list(config, {});
                if (config.contains("packets") && !config.at("packets").is_null())
                {
                    f.packets = config.at("packets").get<int>();
                    if (*f.packets < 1)
                        throw InvalidArgumentError("packets must be at least 1");
                }
                return f;
            }

            CaptureSet apply(CaptureSet set) const
            {
                std::map<int, int> count;
                std::vector<CsiFrame> kept;
                for (auto &f : set.frames)
                {
                    if (channels && !std::binary_search(channels->begin(), channels->end(), f.channel_number))
                        continue;
                    if (packets && count[f.channel_number] >= *packets)
                        continue;
                    ++count[f.channel_number];
                    kept.push_back(std::move(f));
                }
                set.frames = std::move(kept);
                return set;
            }
        };

        std::vector<fs::path> expand_inputs(const std::vector<std::string> &inputs)
        {
            if (inputs.empty())
                throw InvalidArgumentError("no input captures given");
            std::vector<fs::path> files;
            for (const auto &s : inputs)
            {
                const fs::path p(s);
                if (fs::is_directory(p))
                {
                    const auto found = capture_files_in(p);
                    if (found.empty())
                        throw Error("no capture files (*.csik, *.csik.gz) in " + p.string());
                    files.insert(files.end(), found.begin(), found.end());
                }
                else if (fs::exists(p))
                    files.push_back(p);
                else
                    throw Error("input does not exist: " + p.string());
            }
            return files;
        }

        std::vector<CaptureSet> load_captures(const std::vector<fs::path> &files, const CaptureFilter &filter)
        {
            std::vector<CaptureSet> sets;
            std::size_t frames = 0;
            for (const auto &f : files)
            {
                spdlog::debug("reading {}", f.string());
                sets.push_back(filter.apply(read_capture_file(f)));
                frames += sets.back().frames.size();
            }
            if (frames == 0)
                throw InsufficientDataError("the selected captures contain no packets");
            return sets;
        }

        // Raw inter-antenna offsets of every 2.4 GHz packet, per composite bin.
        std::vector<std::vector<double>> raw_samples(const OffsetObservationSet &obs)
        {
            std::vector<std::vector<double>> out(kGlobalBins);
            for (const auto &o : obs.observations)
                for (std::size_t g = 0; g < o.offsets.values.size(); ++g)
                    if (o.offsets.mask[g])
                        out[g].push_back(o.offsets.values[g]);
            return out;
        }

        json channel_table(const CorrectionReport &r, const OffsetObservationSet &obs)
        {
            std::map<int, int> packets;
            for (const auto &o : obs.observations)
                packets[o.channel] = std::max(packets[o.channel], o.packet);
            json out = json::object();
            for (const auto &[c, median_rad] : r.per_channel_median)
                out[std::to_string(c)] = {{"center_mhz", channel_center_frequency(Band::band24, c)},
                                          {"median_rad", median_rad},
                                          {"packets", packets[c]}};
            return out;
        }

        double max_of(const std::vector<double> &v)
        {
            return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
        }
    } // namespace

    std::vector<fs::path> capture_files_in(const fs::path &dir)
    {
        std::vector<fs::path> out;
        std::error_code ec;
        for (const auto &e : fs::directory_iterator(dir, ec))
            if (is_capture_file(e.path()))
                out.push_back(e.path());
        if (ec)
            throw Error("cannot list " + dir.string() + ": " + ec.message());
        std::sort(out.begin(), out.end());
        return out;
    }

    PhaseOffsetVector read_correction_csv(const fs::path &path)
    {
        std::istringstream is(read_text(path));
        std::string line;
        std::getline(is, line);
        const auto header = split_csv(line);
        const auto col = std::find(header.begin(), header.end(), "corrected_rad");
        if (header.empty() || header[0] != "bin" || col == header.end())
            throw Error(path.string() + ": expected a correction CSV with a corrected_rad column");
        const auto idx = static_cast<std::size_t>(col - header.begin());

        auto out = PhaseOffsetVector::empty(Grid::composite());
        std::size_t line_no = 1;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            const auto fields = split_csv(line);
            try
            {
                const int g = std::stoi(fields.at(0));
                if (g < 0 || g >= kGlobalBins)
                    throw std::out_of_range("bin");
                if (idx < fields.size() && !fields[idx].empty())
                {
                    out.values[static_cast<std::size_t>(g)] = wrap_to_pi(std::stod(fields[idx]));
                    out.mask[static_cast<std::size_t>(g)] = true;
                }
            }
            catch (const std::exception &)
            {
                throw ParseError(path.string(), ParseError("malformed correction row", line_no));
            }
        }
        return out;
    }

    void cmd_simulate(const json &input, const fs::path &out)
    {
        json config = input;
        const auto seed = config.value("seed", std::uint64_t{0});
        const auto channels = channel_list(config, parse_channel_list("1-13"));
        const int packets = config.value("packets", 20);
        const bool swap = config.value("swap", false);
        const bool compress = config.value("compress", false);
        if (packets < 1)
            throw InvalidArgumentError("packets must be at least 1");

        struct Named
        {
            std::string name;
            json scene;
        };
        std::vector<Named> scenes;
        const bool batch = config.contains("scenes");
        if (batch == config.contains("scene"))
            throw InvalidSceneError("simulate config needs exactly one of 'scene' or 'scenes'");
        if (batch)
        {
            std::set<std::string> names;
            for (const auto &entry : config.at("scenes"))
            {
                const auto name = entry.value("name", std::string());
                const bool safe = !name.empty() && name != "." && name != ".." &&
                                  std::all_of(name.begin(), name.end(), [](unsigned char c)
                                              { return std::isalnum(c) || c == '_' || c == '-' || c == '.'; });
                if (!safe)
                    throw InvalidSceneError("scene names must be non-empty and use only [A-Za-z0-9_.-]");
                if (!names.insert(name).second)
                    throw InvalidSceneError("duplicate scene name '" + name + "'");
                if (!entry.contains("scene"))
                    throw InvalidSceneError("scene entry '" + name + "' has no 'scene' object");
                scenes.push_back({name, entry.at("scene")});
            }
            if (scenes.empty())
                throw InvalidSceneError("'scenes' is empty");
        }
        else
            scenes.push_back({"", config.at("scene")});

        // validate everything before writing anything
        std::vector<SceneSpec> specs;
        for (std::size_t i = 0; i < scenes.size(); ++i)
        {
            auto spec = scene_from_json(scenes[i].scene);
            if (!scenes[i].scene.contains("rng_seed"))
                spec.rng_seed = batch ? derive_seed(seed, i + 1) : seed;
            specs.push_back(spec);
        }

        make_output_dir(out);
        json resolved_scenes = json::array();
        for (std::size_t i = 0; i < scenes.size(); ++i)
        {
            const auto &spec = specs[i];
            const fs::path dir = batch ? out / scenes[i].name : out;
            std::vector<std::pair<SwapState, fs::path>> setups;
            if (swap)
                setups = {{SwapState::direct, dir / "direct"}, {SwapState::swapped, dir / "swapped"}};
            else
                setups = {{SwapState::over_air, dir}};

            json corrupted = json::object();
            for (const auto &[setup, where] : setups)
            {
                make_output_dir(where);
                for (int c : channels)
                {
                    const auto sim = simulate_capture(spec, c, packets, setup);
                    write_capture_file(where / capture_name(c, compress), sim.captures);
                    std::size_t n = 0, total = 0;
                    for (const auto &row : sim.drawn)
                        for (int r : row)
                        {
                            n += r != 0;
                            ++total;
                        }
                    corrupted[swap_state_name(setup)][std::to_string(c)] =
                        static_cast<double>(n) / static_cast<double>(total);
                }
            }

            json planted = json::object();
            std::vector<int> local;
            bool any24 = false;
            for (int c : channels)
            {
                if (band_of_channel(c) == Band::band24)
                    any24 = true;
                else
                    local.push_back(c);
            }
            if (any24)
                planted["composite"] = spec.true_chip_offset.on_grid(Grid::composite()).values;
            for (int c : local)
                planted["channel_local"][std::to_string(c)] = spec.true_chip_offset.on_grid(Grid::channel_local(c)).values;

            const json truth{{"format_version", kConfigVersion},
                             {"name", scenes[i].name},
                             {"scene", scene_to_json(spec)},
                             {"channels", channels},
                             {"packets", packets},
                             {"swap", swap},
                             {"aoa_deg", spec.paths.front().aoa_deg},
                             {"cable_offset_rad", spec.cable_offset_rad},
                             {"planted_offset", planted},
                             {"corrupted_fraction", corrupted}};
            write_text(dir / "truth.json", truth.dump(2) + "\n");
            spdlog::info("wrote {} capture file(s) to {}", channels.size() * setups.size(), dir.string());

            if (batch)
                resolved_scenes.push_back({{"name", scenes[i].name}, {"scene", scene_to_json(spec)}});
            else
                config["scene"] = scene_to_json(spec);
        }
        if (batch)
            config["scenes"] = resolved_scenes;
        config["seed"] = seed;
        config["channels"] = channels;
        config["packets"] = packets;
        config["swap"] = swap;
        config["compress"] = compress;
        persist_config(out, config);
    }

    void cmd_correct(const json &input, const fs::path &out)
    {
        json config = input;
        const auto filter = CaptureFilter::from(config);
        const bool swap = config.value("swap", false);
        const int bins = config.value("histogram_bins", 72);
        if (bins < 1)
            throw InvalidArgumentError("histogram_bins must be at least 1");

        auto inputs = string_list(config, "inputs");
        auto swapped_inputs = string_list(config, "swapped_inputs");
        if (swap && swapped_inputs.empty())
        {
            // a simulate --swap directory holds direct/ and swapped/
            std::vector<std::string> direct;
            for (const auto &s : inputs)
            {
                if (!fs::is_directory(fs::path(s) / "direct") || !fs::is_directory(fs::path(s) / "swapped"))
                    throw Error("--swap needs swapped captures: " + s + " has no direct/ and swapped/ subdirectories");
                direct.push_back((fs::path(s) / "direct").string());
                swapped_inputs.push_back((fs::path(s) / "swapped").string());
            }
            inputs = direct;
        }
        if (!swap && !swapped_inputs.empty())
            throw InvalidArgumentError("swapped captures given without --swap");

        const auto direct_sets = load_captures(expand_inputs(inputs), filter);
        const auto obs = make_observations(direct_sets);
        auto report = correct_offsets(obs);
        json summary{{"format_version", kConfigVersion},
                     {"observations", report.observation_count},
                     {"packets_per_channel", obs.packets_per_channel},
                     {"residual_spread_rad", report.residual_spread},
                     {"max_outlier_fraction", max_of(report.per_bin_outlier_fraction)},
                     {"degenerate_observations", report.degenerate_observations},
                     {"final_pass_degenerate", report.final_pass_degenerate}};
        json channels = channel_table(report, obs);

        if (swap)
        {
            const auto swapped_sets = load_captures(expand_inputs(swapped_inputs), filter);
            const auto sobs = make_observations(swapped_sets);
            if (sobs.channels != obs.channels)
                throw Error("direct and swapped captures cover different channels");
            const auto sreport = correct_offsets(sobs);
            const auto chip = swap_calibrate(report.corrected, sreport.corrected);
            const auto cable = cable_offset_estimate(report.corrected, sreport.corrected);
            std::vector<double> cable_values;
            for (std::size_t g = 0; g < cable.values.size(); ++g)
                if (cable.mask[g])
                    cable_values.push_back(cable.values[g]);
            summary["swap"] = {{"cable_offset_rad", circular_median(cable_values)},
                               {"direct_residual_spread_rad", report.residual_spread},
                               {"swapped_residual_spread_rad", sreport.residual_spread},
                               {"antipodal_bins", chip.measured_count() < report.corrected.measured_count()}};
            for (auto &[key, entry] : channels.items())
            {
                const int c = std::stoi(key);
                const double d = report.per_channel_median.at(c), s = sreport.per_channel_median.at(c);
                const auto mean = circular_mean(std::vector<double>{d, s});
                entry["direct_median_rad"] = d;
                entry["swapped_median_rad"] = s;
                entry["median_rad"] = mean ? json(*mean) : json(nullptr);
            }
            report.corrected = chip;
        }
        summary["channels"] = channels;

        make_output_dir(out);
        write_text(out / "correction.csv", correction_csv(report));

        const auto raw = raw_samples(obs);
        std::ostringstream ba;
        ba << "bin,frequency_mhz,before_rad,median_rad,corrected_rad\n";
        for (int g = 0; g < kGlobalBins; ++g)
        {
            const auto i = static_cast<std::size_t>(g);
            const auto before = raw[i].empty() ? std::nullopt : circular_mean(raw[i]);
            const auto median = report.median_stage.mask[i] ? std::optional(report.median_stage.values[i]) : std::nullopt;
            const auto after = report.corrected.mask[i] ? std::optional(report.corrected.values[i]) : std::nullopt;
            ba << g << ',' << format_double(composite::frequency_mhz(g)) << ',' << csv_double(before) << ','
               << csv_double(median) << ',' << csv_double(after) << '\n';
        }
        write_text(out / "before_after.csv", ba.str());

        std::vector<long> counts(static_cast<std::size_t>(bins), 0);
        for (const auto &bin : raw)
            for (double v : bin)
            {
                const auto k = static_cast<std::size_t>(
                    std::clamp(static_cast<int>(std::floor((v + kPi) / kTwoPi * bins)), 0, bins - 1));
                ++counts[k];
            }
        std::ostringstream hist;
        hist << "bin_low_rad,bin_high_rad,count\n";
        for (int k = 0; k < bins; ++k)
            hist << format_double(-kPi + kTwoPi * k / bins) << ',' << format_double(-kPi + kTwoPi * (k + 1) / bins)
                 << ',' << counts[static_cast<std::size_t>(k)] << '\n';
        write_text(out / "histogram.csv", hist.str());

        write_text(out / "correction_summary.json", summary.dump(2) + "\n");
        spdlog::info("corrected {} observations; residual spread {:.6f} rad", report.observation_count,
                     report.residual_spread);

        config["inputs"] = inputs;
        if (swap)
            config["swapped_inputs"] = swapped_inputs;
        config["swap"] = swap;
        config["histogram_bins"] = bins;
        persist_config(out, config);
    }

    void cmd_stitch(const json &input, const fs::path &out)
    {
        json config = input;
        const auto filter = CaptureFilter::from(config);
        const double tolerance = config.value("tolerance", 0.05);
        if (!(tolerance >= 0.0))
            throw InvalidArgumentError("tolerance must be non-negative");
        const auto inputs = string_list(config, "inputs");
        const auto obs = make_observations(load_captures(expand_inputs(inputs), filter));

        auto spectrum = stitch(obs.observations);
        merge_circular_median(spectrum);
        const auto report = overlap_consistency(spectrum, tolerance);

        make_output_dir(out);
        write_text(out / "stitched.csv", stitched_csv(spectrum));
        const json overlap{{"format_version", kConfigVersion},
                           {"tolerance_rad", tolerance},
                           {"bins_checked", report.bins_checked},
                           {"flagged_fraction", report.flagged_fraction()},
                           {"max_spread_rad", report.max_spread},
                           {"flagged_bins", report.flagged_bins}};
        write_text(out / "overlap_report.json", overlap.dump(2) + "\n");
        spdlog::info("{} of {} overlap bins exceed {} rad", report.flagged_bins.size(), report.bins_checked, tolerance);

        config["inputs"] = inputs;
        config["tolerance"] = tolerance;
        persist_config(out, config);
    }

    void cmd_aoa(const json &input, const fs::path &out)
    {
        json config = input;
        const auto filter = CaptureFilter::from(config);
        const SteeringModel model = steering_from_json(config.value("steering", json()));
        AoaPipelineParams params;
        params.num_paths = config.value("num_paths", 1);
        const auto calibration = config.value("calibration", std::string());
        if (!calibration.empty())
            params.chip_calibration = read_correction_csv(calibration);

        struct Scene
        {
            std::string name;
            std::vector<fs::path> files;
            std::optional<fs::path> truth;
        };
        std::vector<Scene> scenes;
        Scene loose{"captures", {}, std::nullopt};
        const auto inputs = string_list(config, "inputs");
        if (inputs.empty())
            throw InvalidArgumentError("no input captures given");
        for (const auto &s : inputs)
        {
            const fs::path p(s);
            if (!fs::exists(p))
                throw Error("input does not exist: " + p.string());
            if (!fs::is_directory(p))
            {
                loose.files.push_back(p);
                continue;
            }
            auto sidecar = [](const fs::path &d) -> std::optional<fs::path>
            {
                if (fs::is_regular_file(d / "truth.json"))
                    return d / "truth.json";
                return std::nullopt;
            };
            auto files = capture_files_in(p);
            if (!files.empty())
            {
                scenes.push_back({p.filename().empty() ? p.parent_path().filename().string() : p.filename().string(),
                                  files, sidecar(p)});
                continue;
            }
            // a batch directory: one scene per subdirectory
            std::vector<fs::path> subdirs;
            for (const auto &e : fs::directory_iterator(p))
                if (e.is_directory() && !capture_files_in(e.path()).empty())
                    subdirs.push_back(e.path());
            std::sort(subdirs.begin(), subdirs.end());
            if (subdirs.empty())
                throw Error("no capture files (*.csik, *.csik.gz) in " + p.string() + " or its subdirectories");
            for (const auto &d : subdirs)
                scenes.push_back({d.filename().string(), capture_files_in(d), sidecar(d)});
        }
        if (!loose.files.empty())
            scenes.push_back(loose);

        make_output_dir(out);
        std::ostringstream table;
        table << "scene,truth_deg,music_deg,phase_slope_deg,error_deg\n";
        const bool single = scenes.size() == 1;
        for (const auto &scene : scenes)
        {
            const auto sets = load_captures(scene.files, filter);
            const auto result = estimate_aoa_endtoend(sets, model, params);
            const fs::path dir = single ? out : out / scene.name;
            make_output_dir(dir);
            write_text(dir / "pseudospectrum.csv", pseudospectrum_csv(result.music));
            std::string summary = aoa_summary_line(result.music);
            summary += result.phase_slope_theta_deg ? " phase_slope_deg=" + format_double(*result.phase_slope_theta_deg)
                                                    : " phase_slope_deg=NA";
            write_text(dir / "aoa_summary.txt", summary + "\n");

            std::optional<double> truth;
            if (scene.truth)
            {
                const auto t = read_json(*scene.truth);
                if (!t.contains("aoa_deg") || !t.at("aoa_deg").is_number())
                    throw Error(scene.truth->string() + ": missing numeric 'aoa_deg'");
                truth = t.at("aoa_deg").get<double>();
            }
            table << scene.name << ',' << csv_double(truth) << ',' << format_double(result.music.peak_theta_deg) << ','
                  << csv_double(result.phase_slope_theta_deg) << ','
                  << (truth ? format_double(result.music.peak_theta_deg - *truth) : std::string()) << '\n';
            spdlog::info("{}: peak {} deg", scene.name, result.music.peak_theta_deg);
        }
        write_text(out / "aoa_vs_truth.csv", table.str());

        config["inputs"] = inputs;
        config["steering"] = steering_to_json(model);
        config["num_paths"] = params.num_paths;
        config["calibration"] = calibration.empty() ? json(nullptr) : json(calibration);
        persist_config(out, config);
    }

    void cmd_plot(const json &input, const fs::path &out)
    {
        json config = input;
        const auto kind = config.value("kind", std::string());
        const auto inputs = string_list(config, "inputs");
        if (inputs.size() != 1)
            throw InvalidArgumentError("plot takes exactly one CSV input");
        const fs::path path(inputs.front());

        static const std::map<std::string, std::vector<std::string>> schemas{
            {"offset",
             {"bin,frequency_mhz,corrected_rad,samples,outlier_fraction",
              "bin,frequency_mhz,before_rad,median_rad,corrected_rad"}},
            {"histogram", {"bin_low_rad,bin_high_rad,count"}},
            {"pseudospectrum", {"theta_deg,tau_ns,power"}},
            {"aoa", {"scene,truth_deg,music_deg,phase_slope_deg,error_deg"}}};
        const auto schema = schemas.find(kind);
        if (schema == schemas.end())
            throw InvalidArgumentError("unknown plot kind '" + kind + "' (offset, histogram, pseudospectrum, aoa)");

        std::istringstream is(read_text(path));
        std::string header;
        std::getline(is, header);
        if (!header.empty() && header.back() == '\r')
            header.pop_back();
        if (std::find(schema->second.begin(), schema->second.end(), header) == schema->second.end())
            throw Error("schema mismatch: " + path.string() + " has header '" + header + "', kind '" + kind +
                        "' expects '" + schema->second.front() + "'");
        const auto columns = split_csv(header);

        std::vector<std::vector<double>> data(columns.size());
        std::vector<std::string> first_column;
        std::string line;
        std::size_t line_no = 1;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            const auto fields = split_csv(line);
            if (fields.size() != columns.size())
                throw ParseError(path.string(), ParseError("expected " + std::to_string(columns.size()) + " fields", line_no));
            first_column.push_back(fields[0]);
            for (std::size_t c = 0; c < fields.size(); ++c)
            {
                if (fields[c].empty() || (kind == "aoa" && c == 0))
                {
                    data[c].push_back(std::nan(""));
                    continue;
                }
                try
                {
                    data[c].push_back(std::stod(fields[c]));
                }
                catch (const std::exception &)
                {
                    throw ParseError(path.string(), ParseError("non-numeric field '" + fields[c] + "'", line_no));
                }
            }
        }

        std::string svg_text;
        if (kind == "offset")
        {
            std::vector<svg::Series> series;
            if (columns[2] == "before_rad")
                series.push_back({"before", "#c0504d", data[1], data[2], true});
            series.push_back({"corrected", "#1f4e79", data[1], columns[2] == "before_rad" ? data[4] : data[2], false});
            svg_text = svg::line_plot({"Phase offset per subcarrier", "Frequency (MHz)", "Offset (rad)"}, series);
        }
        else if (kind == "histogram")
            svg_text = svg::bar_chart({"Measured phase offsets", "Offset (rad)", "Count"}, data[0], data[1], data[2]);
        else if (kind == "pseudospectrum")
        {
            std::vector<double> thetas = data[0], taus = data[1];
            std::sort(thetas.begin(), thetas.end());
            thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
            std::sort(taus.begin(), taus.end());
            taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
            if (thetas.size() * taus.size() != data[0].size())
                throw Error("schema mismatch: " + path.string() + " is not a full theta x tau grid");
            std::vector<std::vector<double>> grid(taus.size(), std::vector<double>(thetas.size(), 0.0));
            for (std::size_t i = 0; i < data[0].size(); ++i)
            {
                const auto c = static_cast<std::size_t>(std::lower_bound(thetas.begin(), thetas.end(), data[0][i]) - thetas.begin());
                const auto r = static_cast<std::size_t>(std::lower_bound(taus.begin(), taus.end(), data[1][i]) - taus.begin());
                grid[r][c] = data[2][i];
            }
            svg_text = svg::heatmap({"MUSIC pseudospectrum (dB)", "Angle of arrival (deg)", "Delay (ns)"}, thetas, taus, grid);
        }
        else
        {
            std::vector<double> lo_hi;
            for (double v : data[1])
                if (std::isfinite(v))
                    lo_hi.push_back(v);
            std::vector<svg::Series> series{{"estimate", "#1f4e79", data[1], data[2], true}};
            if (!lo_hi.empty())
            {
                const auto [lo, hi] = std::minmax_element(lo_hi.begin(), lo_hi.end());
                series.push_back({"truth", "#7f7f7f", {*lo, *hi}, {*lo, *hi}, false});
            }
            svg_text = svg::line_plot({"Estimated vs. true angle of arrival", "True angle (deg)", "Estimated angle (deg)"},
                                      series);
        }

        make_output_dir(out);
        write_text(out / (kind + ".svg"), svg_text);
        config["inputs"] = inputs;
        persist_config(out, config);
    }

    std::string cmd_report(const json &input, const fs::path &out)
    {
        json config = input;
        const auto inputs = string_list(config, "inputs");
        if (inputs.size() != 1)
            throw InvalidArgumentError("report takes exactly one correction_summary.json");
        const auto summary = read_json(inputs.front());
        if (!summary.contains("channels") || !summary.at("channels").is_object())
            throw Error(inputs.front() + ": not a correction summary (no 'channels' table)");

        std::map<int, json> rows;
        for (const auto &[key, entry] : summary.at("channels").items())
            rows[std::stoi(key)] = entry;

        std::ostringstream csv, text;
        csv << "channel,center_mhz,offset_rad,packets\n";
        text << "Receive antenna phase offset, 2.4 GHz band\n\n";
        text << "Channel  Center (MHz)  Offset (rad)\n";
        for (const auto &[c, entry] : rows)
        {
            const auto offset = entry.at("median_rad");
            const double center = entry.at("center_mhz").get<double>();
            csv << c << ',' << format_double(center) << ','
                << (offset.is_number() ? format_double(offset.get<double>()) : std::string()) << ','
                << entry.value("packets", 0) << '\n';
            char line[96];
            if (offset.is_number())
                std::snprintf(line, sizeof line, "%7d  %12.1f  %12.4f\n", c, center, offset.get<double>());
            else
                std::snprintf(line, sizeof line, "%7d  %12.1f  %12s\n", c, center, "n/a");
            text << line;
        }
        if (summary.contains("residual_spread_rad"))
        {
            char line[96];
            std::snprintf(line, sizeof line, "\nResidual spread: %.4f rad\n", summary.at("residual_spread_rad").get<double>());
            text << line;
        }
        if (summary.contains("swap"))
        {
            char line[96];
            std::snprintf(line, sizeof line, "Cable offset estimate: %.4f rad\n",
                          summary.at("swap").at("cable_offset_rad").get<double>());
            text << line;
        }

        make_output_dir(out);
        write_text(out / "offset_table.csv", csv.str());
        write_text(out / "offset_table.txt", text.str());
        config["inputs"] = inputs;
        persist_config(out, config);
        return text.str();
    }

} // namespace csikit::cli
