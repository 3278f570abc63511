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


#pragma once

#include "csikit/aoa.hpp"
#include "csikit/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace csikit::cli
{
    using nlohmann::json;

    inline constexpr int kConfigVersion = 1;

    /// Scene JSON (paths, spacing, chip offset, cable, corruption, noise) to
    /// SceneSpec. Unknown keys are rejected so typos do not pass silently.
    SceneSpec scene_from_json(const json &j);
    json scene_to_json(const SceneSpec &scene);

    SteeringModel steering_from_json(const json &j);
    json steering_to_json(const SteeringModel &model);

    /// Parses "1-13", "1,6,11" or "1-4,9" into a sorted list of channels.
    std::vector<int> parse_channel_list(const std::string &text);

    /// Capture files (*.csik, *.csik.gz) directly inside `dir`, sorted by name.
    std::vector<std::filesystem::path> capture_files_in(const std::filesystem::path &dir);

    /// Reads a correction.csv and returns its corrected_rad column.
    PhaseOffsetVector read_correction_csv(const std::filesystem::path &path);

    // Each command takes the fully resolved configuration and writes its
    // outputs, plus the configuration itself as config.json, into `out`.
    void cmd_simulate(const json &config, const std::filesystem::path &out);
    void cmd_correct(const json &config, const std::filesystem::path &out);
    void cmd_stitch(const json &config, const std::filesystem::path &out);
    void cmd_aoa(const json &config, const std::filesystem::path &out);
    void cmd_plot(const json &config, const std::filesystem::path &out);
    /// Returns the rendered table so the caller can echo it.
    std::string cmd_report(const json &config, const std::filesystem::path &out);

    /// Entry point behind the csikit executable. Returns the process exit code.
    int run(int argc, char **argv);

} // namespace csikit::cli
