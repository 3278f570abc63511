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


#include "csikit/csi_model.hpp"

#include "csikit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csikit
{
    const char *band_name(Band band)
    {
        return band == Band::band24 ? "24" : "5";
    }

    const char *swap_state_name(SwapState state)
    {
        switch (state)
        {
        case SwapState::direct:
            return "direct";
        case SwapState::swapped:
            return "swapped";
        case SwapState::over_air:
            break;
        }
        return "over_air";
    }

    SwapState parse_swap_state(const std::string &name)
    {
        if (name == "direct")
            return SwapState::direct;
        if (name == "swapped")
            return SwapState::swapped;
        if (name == "over_air")
            return SwapState::over_air;
        throw InvalidArgumentError("unknown swap state '" + name + "'");
    }

    bool is_valid_channel(Band band, int ch)
    {
        if (band == Band::band24)
            return ch >= 1 && ch <= 13;
        if (ch >= 36 && ch <= 64)
            return ch % 4 == 0;
        if (ch >= 100 && ch <= 144)
            return ch % 4 == 0;
        if (ch >= 149 && ch <= 165)
            return (ch - 149) % 4 == 0;
        return false;
    }

    std::vector<int> valid_channels(Band band)
    {
        std::vector<int> out;
        for (int ch = 1; ch <= 165; ++ch)
            if (is_valid_channel(band, ch))
                out.push_back(ch);
        return out;
    }

    Band band_of_channel(int ch)
    {
        if (is_valid_channel(Band::band24, ch))
            return Band::band24;
        if (is_valid_channel(Band::band5, ch))
            return Band::band5;
        throw InvalidChannelError("invalid channel " + std::to_string(ch));
    }

    double channel_center_frequency(Band band, int ch)
    {
        if (!is_valid_channel(band, ch))
            throw InvalidChannelError("invalid channel " + std::to_string(ch) + " for band " +
                                      band_name(band));
        return band == Band::band24 ? 2407.0 + 5.0 * ch : 5000.0 + 5.0 * ch;
    }

    const std::vector<int> &ht20_subcarrier_indices()
    {
        static const std::vector<int> indices = []
        {
            std::vector<int> v;
            for (int k = -kHt20MaxIndex; k <= kHt20MaxIndex; ++k)
                if (k != 0)
                    v.push_back(k);
            return v;
        }();
        return indices;
    }

    bool CsiFrame::operator==(const CsiFrame &o) const
    {
        if (band != o.band || channel_number != o.channel_number ||
            center_frequency_mhz != o.center_frequency_mhz || bandwidth_mhz != o.bandwidth_mhz ||
            timestamp_us != o.timestamp_us || num_rx_antennas != o.num_rx_antennas ||
            subcarrier_indices != o.subcarrier_indices || rssi_dbm != o.rssi_dbm)
            return false;
        if (gains.rows() != o.gains.rows() || gains.cols() != o.gains.cols())
            return false;
        // exact element comparison; NaN never equals itself
        for (Eigen::Index r = 0; r < gains.rows(); ++r)
            for (Eigen::Index c = 0; c < gains.cols(); ++c)
                if (gains(r, c) != o.gains(r, c))
                    return false;
        return true;
    }

    CsiFrame make_frame(Band band, int ch, std::int64_t ts, Eigen::MatrixXcd gains,
                        std::optional<double> rssi)
    {
        CsiFrame f;
        f.band = band;
        f.channel_number = ch;
        f.center_frequency_mhz = channel_center_frequency(band, ch);
        f.timestamp_us = ts;
        f.num_rx_antennas = static_cast<int>(gains.rows());
        f.subcarrier_indices = ht20_subcarrier_indices();
        f.gains = std::move(gains);
        f.rssi_dbm = rssi;
        return f;
    }

    std::map<int, std::vector<std::size_t>> CaptureSet::by_channel() const
    {
        std::map<int, std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < frames.size(); ++i)
            out[frames[i].channel_number].push_back(i);
        return out;
    }

    double Grid::frequency_mhz(std::size_t i) const
    {
        if (global)
            return 2403.25 + kSubcarrierSpacingMhz * static_cast<double>(i);
        const double center = channel_center_frequency(band_of_channel(channel_number), channel_number);
        return center + kSubcarrierSpacingMhz * ht20_subcarrier_indices().at(i);
    }

    PhaseOffsetVector PhaseOffsetVector::filled(Grid grid, double value)
    {
        return {grid, std::vector<double>(grid.size(), value), std::vector<bool>(grid.size(), true)};
    }

    PhaseOffsetVector PhaseOffsetVector::empty(Grid grid)
    {
        return {grid, std::vector<double>(grid.size(), std::nan("")),
                std::vector<bool>(grid.size(), false)};
    }

    std::size_t PhaseOffsetVector::measured_count() const
    {
        return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    }

    std::vector<std::string> validate_frame(const CsiFrame &f)
    {
        std::vector<std::string> v;
        const auto &idx = f.subcarrier_indices;

        if (std::find(idx.begin(), idx.end(), 0) != idx.end())
            v.emplace_back("DC subcarrier present");
        if (idx.size() != kHt20Subcarriers)
            v.emplace_back("subcarrier count " + std::to_string(idx.size()) + " != 56");
        if (!std::is_sorted(idx.begin(), idx.end()) ||
            std::adjacent_find(idx.begin(), idx.end()) != idx.end())
            v.emplace_back("subcarrier indices not strictly increasing");
        if (std::any_of(idx.begin(), idx.end(), [](int k)
                        { return k < -kHt20MaxIndex || k > kHt20MaxIndex; }))
            v.emplace_back("subcarrier index outside -28..28");

        if (f.num_rx_antennas < 1 || f.num_rx_antennas > kMaxAntennas)
            v.emplace_back("antenna count outside 1..8");
        if (f.gains.rows() != f.num_rx_antennas || f.gains.cols() != kHt20Subcarriers)
            v.emplace_back("gain matrix shape mismatch");
        if (!f.gains.allFinite())
            v.emplace_back("non-finite gain");

        if (f.bandwidth_mhz != kBandwidthMhz)
            v.emplace_back("bandwidth must be 20 MHz");
        if (!is_valid_channel(f.band, f.channel_number))
            v.emplace_back("invalid channel for band");
        else if (f.center_frequency_mhz != channel_center_frequency(f.band, f.channel_number))
            v.emplace_back("center frequency inconsistent with channel");
        if (f.rssi_dbm && !std::isfinite(*f.rssi_dbm))
            v.emplace_back("non-finite rssi");
        return v;
    }

    std::vector<std::string> validate_phase_vector(const PhaseOffsetVector &p)
    {
        std::vector<std::string> v;
        if (p.values.size() != p.grid.size() || p.mask.size() != p.grid.size())
            v.emplace_back("length does not match grid size");
        const std::size_t n = std::min(p.values.size(), p.mask.size());
        constexpr double pi = std::numbers::pi;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!p.mask[i])
                continue;
            const double x = p.values[i];
            if (!std::isfinite(x) || x <= -pi || x > pi)
            {
                v.emplace_back("value at " + std::to_string(i) + " not in (-pi, pi]");
                break;
            }
        }
        return v;
    }

} // namespace csikit
