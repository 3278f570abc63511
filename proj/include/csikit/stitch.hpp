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

#include "csikit/csi_model.hpp"

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csikit
{
    /// Composite grid of 2.4 GHz channels 1-13: bin g sits at
    /// 2403.25 + 0.3125 g MHz, g = 0..248 (2403.25 .. 2480.75 MHz).
    namespace composite
    {
        inline constexpr int kFirstChannel = 1;
        inline constexpr int kLastChannel = 13;
        inline constexpr double kBaseFrequencyMhz = 2403.25;
        // 5 MHz channel spacing in 312.5 kHz bins
        inline constexpr int kBinsPerChannelStep = 16;

        inline double frequency_mhz(int g) { return kBaseFrequencyMhz + kSubcarrierSpacingMhz * g; }
    } // namespace composite

    /// g = 16 (channel - 1) + k + 28. Throws InvalidChannelError for channels
    /// outside 1..13 and InvalidArgumentError for k = 0 or |k| > 28.
    int global_index(int channel_number, int subcarrier);

    /// All (channel, k) pairs landing on bin g, ascending by channel.
    std::vector<std::pair<int, int>> channels_covering(int g);

    /// Bins measured by one channel, ascending.
    std::vector<int> channel_bins(int channel_number);

    /// Lifts a channel-local vector of a 2.4 GHz channel onto the composite grid.
    PhaseOffsetVector to_global(const PhaseOffsetVector &local);

    template <class Value>
    struct Deposit
    {
        int packet = 0;
        int channel = 0;
        int subcarrier = 0;
        Value value{};
    };

    template <class Value>
    struct StitchedSpectrum
    {
        std::vector<std::vector<Deposit<Value>>> per_bin = std::vector<std::vector<Deposit<Value>>>(kGlobalBins);
        std::vector<int> coverage = std::vector<int>(kGlobalBins, 0);
        std::vector<std::optional<double>> merged = std::vector<std::optional<double>>(kGlobalBins);
    };

    using PhaseSpectrum = StitchedSpectrum<double>;
    using GainSpectrum = StitchedSpectrum<std::vector<std::complex<double>>>;

    struct PhaseObservation
    {
        int packet = 0;
        int channel = 0;
        PhaseOffsetVector offsets;
    };

    struct FrameObservation
    {
        int packet = 0;
        CsiFrame frame;
    };

    /// Deposits the measured bins of each observation (channel-local or
    /// composite grid). Throws DuplicateObservationError for a repeated
    /// (packet, channel) pair.
    PhaseSpectrum stitch(std::span<const PhaseObservation> observations);

    /// Deposits per-antenna gain columns of 2.4 GHz frames.
    GainSpectrum stitch(std::span<const FrameObservation> observations);

    /// Fills `merged` with the circular median of each covered bin.
    void merge_circular_median(PhaseSpectrum &spectrum);

    struct OverlapReport
    {
        double tolerance = 0.0;
        /// Largest pairwise circular distance per bin; NaN where coverage < 2.
        std::vector<double> spread;
        std::vector<int> flagged_bins;
        int bins_checked = 0;
        double max_spread = 0.0;

        double flagged_fraction() const
        {
            return bins_checked == 0 ? 0.0 : static_cast<double>(flagged_bins.size()) / bins_checked;
        }
    };

    /// Circular spread of the deposits on every bin covered at least twice.
    OverlapReport overlap_consistency(const PhaseSpectrum &spectrum, double tolerance);

    /// CSV with columns bin,frequency_mhz,coverage,merged_value.
    std::string stitched_csv(const PhaseSpectrum &spectrum);

} // namespace csikit
