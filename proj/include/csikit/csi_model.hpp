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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace csikit
{
    enum class Band
    {
        band24,
        band5
    };

    enum class SwapState
    {
        direct,
        swapped,
        over_air
    };

    inline constexpr int kHt20Subcarriers = 56;
    inline constexpr int kHt20MaxIndex = 28;
    inline constexpr double kSubcarrierSpacingMhz = 0.3125;
    inline constexpr int kBandwidthMhz = 20;
    inline constexpr int kMaxAntennas = 8;

    // Composite 2.4 GHz grid, channels 1-13 on 312.5 kHz bins
    inline constexpr int kGlobalBins = 249;

    const char *band_name(Band band);
    const char *swap_state_name(SwapState state);
    SwapState parse_swap_state(const std::string &name);

    /// True for 2.4 GHz channels 1-13 and the 5 GHz channels 36-64, 100-165.
    bool is_valid_channel(Band band, int channel_number);

    /// All valid channels of a band in ascending order.
    std::vector<int> valid_channels(Band band);

    /// Band implied by a channel number; the two channel ranges are disjoint.
    Band band_of_channel(int channel_number);

    /// Center frequency in MHz (2407 + 5 ch for 2.4 GHz, 5000 + 5 ch for 5 GHz).
    /// Throws InvalidChannelError for unknown channels.
    double channel_center_frequency(Band band, int channel_number);

    /// HT20 used subcarriers: -28..-1, 1..28.
    const std::vector<int> &ht20_subcarrier_indices();

    /// One packet's channel estimate. Rows of `gains` are rx antennas, columns
    /// follow `subcarrier_indices`.
    struct CsiFrame
    {
        Band band = Band::band24;
        int channel_number = 1;
        double center_frequency_mhz = 2412.0;
        int bandwidth_mhz = kBandwidthMhz;
        std::int64_t timestamp_us = 0;
        int num_rx_antennas = 2;
        std::vector<int> subcarrier_indices;
        Eigen::MatrixXcd gains;
        std::optional<double> rssi_dbm;

        double subcarrier_frequency_mhz(std::size_t column) const
        {
            return center_frequency_mhz + kSubcarrierSpacingMhz * subcarrier_indices[column];
        }

        bool operator==(const CsiFrame &other) const;
    };

    /// Builds an HT20 frame with derived center frequency and subcarrier layout.
    CsiFrame make_frame(Band band, int channel_number, std::int64_t timestamp_us,
                        Eigen::MatrixXcd gains, std::optional<double> rssi_dbm = std::nullopt);

    struct CaptureSet
    {
        std::vector<CsiFrame> frames;
        std::string label;
        SwapState swap_state = SwapState::over_air;

        /// Frame indices grouped by channel number, file order preserved.
        std::map<int, std::vector<std::size_t>> by_channel() const;

        bool operator==(const CaptureSet &other) const = default;
    };

    /// Grid a phase vector lives on: a single channel's 56 subcarriers or the
    /// 249-bin composite 2.4 GHz grid.
    struct Grid
    {
        bool global = true;
        int channel_number = 0;

        static Grid channel_local(int channel_number) { return {false, channel_number}; }
        static Grid composite() { return {true, 0}; }

        std::size_t size() const { return global ? kGlobalBins : kHt20Subcarriers; }

        /// Frequency of element i in MHz.
        double frequency_mhz(std::size_t i) const;

        bool operator==(const Grid &other) const = default;
    };

    struct PhaseOffsetVector
    {
        Grid grid;
        std::vector<double> values;
        std::vector<bool> mask;

        /// Every element set to `value`, all measured.
        static PhaseOffsetVector filled(Grid grid, double value);
        /// Every element NaN and unmeasured.
        static PhaseOffsetVector empty(Grid grid);

        std::size_t measured_count() const;

        bool operator==(const PhaseOffsetVector &other) const = default;
    };

    /// Invariant violations of a frame; empty iff the frame is well formed.
    std::vector<std::string> validate_frame(const CsiFrame &frame);

    /// Invariant violations of a phase vector.
    std::vector<std::string> validate_phase_vector(const PhaseOffsetVector &vector);

} // namespace csikit
