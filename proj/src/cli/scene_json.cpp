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

#include <algorithm>
#include <set>

namespace csikit::cli
{
    namespace
    {
        void reject_unknown(const json &j, std::initializer_list<const char *> known, const std::string &where)
        {
            if (!j.is_object())
                throw InvalidSceneError(where + " must be a JSON object");
            const std::set<std::string> allowed(known.begin(), known.end());
            for (const auto &[key, _] : j.items())
                if (!allowed.contains(key))
                    throw InvalidSceneError("unknown key '" + key + "' in " + where);
        }

        template <class T>
        T get_or(const json &j, const char *key, T fallback)
        {
            if (!j.contains(key))
                return fallback;
            try
            {
                return j.at(key).get<T>();
            }
            catch (const json::exception &)
            {
                throw InvalidSceneError(std::string("key '") + key + "' has the wrong type");
            }
        }

        ChipOffsetModel chip_from_json(const json &j)
        {
            if (j.is_number())
                return ChipOffsetModel::constant(j.get<double>());
            reject_unknown(j, {"kind", "value", "slope_rad_per_mhz", "reference_mhz", "values"}, "chip_offset");
            const auto kind = get_or<std::string>(j, "kind", "constant");
            if (kind == "constant")
                return ChipOffsetModel::constant(get_or(j, "value", 0.0));
            if (kind == "linear")
                return ChipOffsetModel::linear(get_or(j, "value", 0.0), get_or(j, "slope_rad_per_mhz", 0.0),
                                               get_or(j, "reference_mhz", 2442.0));
            if (kind == "table")
                return ChipOffsetModel::from_table(get_or(j, "values", std::vector<double>{}));
            if (kind == "reference_24ghz")
                return reference_profile_24ghz();
            throw InvalidSceneError("unknown chip_offset kind '" + kind + "'");
        }

        json chip_to_json(const ChipOffsetModel &m)
        {
            switch (m.kind)
            {
            case ChipOffsetModel::Kind::constant:
                return {{"kind", "constant"}, {"value", m.value}};
            case ChipOffsetModel::Kind::linear:
                return {{"kind", "linear"},
                        {"value", m.value},
                        {"slope_rad_per_mhz", m.slope_rad_per_mhz},
                        {"reference_mhz", m.reference_mhz}};
            case ChipOffsetModel::Kind::table:
                break;
            }
            return {{"kind", "table"}, {"values", m.table}};
        }
    } // namespace

    SceneSpec scene_from_json(const json &j)
    {
        reject_unknown(j,
                       {"paths", "antenna_spacing_m", "chip_offset", "cable_offset_rad", "corruption_prob",
                        "granularity", "noise_std", "rng_seed", "common_phase", "rotation_sets"},
                       "scene");
        SceneSpec s;
        if (!j.contains("paths") || !j.at("paths").is_array())
            throw InvalidSceneError("scene needs a 'paths' array");
        for (const auto &p : j.at("paths"))
        {
            reject_unknown(p, {"gain", "aoa_deg", "delay_ns"}, "path");
            PathSpec path;
            if (p.contains("gain"))
            {
                const auto &g = p.at("gain");
                if (g.is_number())
                    path.complex_gain = g.get<double>();
                else if (g.is_array() && g.size() == 2 && g[0].is_number() && g[1].is_number())
                    path.complex_gain = {g[0].get<double>(), g[1].get<double>()};
                else
                    throw InvalidSceneError("path gain must be a number or [re, im]");
            }
            path.aoa_deg = get_or(p, "aoa_deg", 0.0);
            path.delay_ns = get_or(p, "delay_ns", 0.0);
            s.paths.push_back(path);
        }
        s.antenna_spacing_m = get_or(j, "antenna_spacing_m", s.antenna_spacing_m);
        if (j.contains("chip_offset"))
            s.true_chip_offset = chip_from_json(j.at("chip_offset"));
        s.cable_offset_rad = get_or(j, "cable_offset_rad", 0.0);
        s.corruption_prob = get_or(j, "corruption_prob", 0.0);
        const auto granularity = get_or<std::string>(j, "granularity", "per_subcarrier");
        if (granularity == "per_subcarrier")
            s.granularity = Granularity::per_subcarrier;
        else if (granularity == "per_packet")
            s.granularity = Granularity::per_packet;
        else
            throw InvalidSceneError("granularity must be per_subcarrier or per_packet");
        s.noise_std = get_or(j, "noise_std", 0.0);
        s.rng_seed = get_or<std::uint64_t>(j, "rng_seed", 0);
        s.common_phase = get_or(j, "common_phase", true);
        if (j.contains("rotation_sets"))
        {
            const auto &r = j.at("rotation_sets");
            reject_unknown(r, {"nonnegative", "negative"}, "rotation_sets");
            s.rotation.nonnegative = get_or(r, "nonnegative", s.rotation.nonnegative);
            s.rotation.negative = get_or(r, "negative", s.rotation.negative);
        }
        s.validate();
        return s;
    }

    json scene_to_json(const SceneSpec &s)
    {
        json paths = json::array();
        for (const auto &p : s.paths)
            paths.push_back({{"gain", {p.complex_gain.real(), p.complex_gain.imag()}},
                             {"aoa_deg", p.aoa_deg},
                             {"delay_ns", p.delay_ns}});
        return {{"paths", paths},
                {"antenna_spacing_m", s.antenna_spacing_m},
                {"chip_offset", chip_to_json(s.true_chip_offset)},
                {"cable_offset_rad", s.cable_offset_rad},
                {"corruption_prob", s.corruption_prob},
                {"granularity", s.granularity == Granularity::per_packet ? "per_packet" : "per_subcarrier"},
                {"noise_std", s.noise_std},
                {"rng_seed", s.rng_seed},
                {"common_phase", s.common_phase},
                {"rotation_sets", {{"nonnegative", s.rotation.nonnegative}, {"negative", s.rotation.negative}}}};
    }

    SteeringModel steering_from_json(const json &j)
    {
        SteeringModel m;
        if (j.is_null())
            return m;
        reject_unknown(j,
                       {"antenna_spacing_m", "speed_of_light", "theta_min_deg", "theta_max_deg", "theta_step_deg",
                        "tau_min_ns", "tau_max_ns", "tau_step_ns", "smoothing_window"},
                       "steering");
        m.antenna_spacing_m = get_or(j, "antenna_spacing_m", m.antenna_spacing_m);
        m.speed_of_light = get_or(j, "speed_of_light", m.speed_of_light);
        m.theta_grid_deg = SteeringModel::grid_range(get_or(j, "theta_min_deg", -45.0), get_or(j, "theta_max_deg", 45.0),
                                                     get_or(j, "theta_step_deg", 0.5));
        m.tau_grid_ns = SteeringModel::grid_range(get_or(j, "tau_min_ns", 0.0), get_or(j, "tau_max_ns", 100.0),
                                                  get_or(j, "tau_step_ns", 1.0));
        m.smoothing_window = get_or(j, "smoothing_window", m.smoothing_window);
        m.validate();
        return m;
    }

    json steering_to_json(const SteeringModel &m)
    {
        const auto step = [](const std::vector<double> &g) { return g.size() > 1 ? g[1] - g[0] : 1.0; };
        return {{"antenna_spacing_m", m.antenna_spacing_m},
                {"speed_of_light", m.speed_of_light},
                {"theta_min_deg", m.theta_grid_deg.front()},
                {"theta_max_deg", m.theta_grid_deg.back()},
                {"theta_step_deg", step(m.theta_grid_deg)},
                {"tau_min_ns", m.tau_grid_ns.front()},
                {"tau_max_ns", m.tau_grid_ns.back()},
                {"tau_step_ns", step(m.tau_grid_ns)},
                {"smoothing_window", m.smoothing_window}};
    }

    std::vector<int> parse_channel_list(const std::string &text)
    {
        std::set<int> out;
        std::size_t pos = 0;
        auto number = [&](std::size_t &i)
        {
            std::size_t used = 0;
            int v = 0;
            try
            {
                v = std::stoi(text.substr(i), &used);
            }
            catch (const std::exception &)
            {
                throw InvalidArgumentError("malformed channel list '" + text + "'");
            }
            i += used;
            return v;
        };
        while (pos < text.size())
        {
            const int first = number(pos);
            int last = first;
            if (pos < text.size() && text[pos] == '-')
            {
                ++pos;
                last = number(pos);
            }
            if (last < first)
                throw InvalidArgumentError("descending channel range in '" + text + "'");
            // "36-64" means the valid 5 GHz channels in that span
            const Band band = band_of_channel(first);
            if (!is_valid_channel(band, last))
                throw InvalidChannelError("invalid channel " + std::to_string(last));
            for (int c = first; c <= last; ++c)
                if (is_valid_channel(band, c))
                    out.insert(c);
            if (pos < text.size())
            {
                if (text[pos] != ',')
                    throw InvalidArgumentError("malformed channel list '" + text + "'");
                ++pos;
            }
        }
        if (out.empty())
            throw InvalidArgumentError("empty channel list");
        return {out.begin(), out.end()};
    }

} // namespace csikit::cli
