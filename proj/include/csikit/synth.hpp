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
#include "csikit/rotation.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace csikit
{
    /// Propagation speed used by the generator and the steering model.
    inline constexpr double kSpeedOfLight = 2.998e8;

    struct PathSpec
    {
        std::complex<double> complex_gain{1.0, 0.0};
        double aoa_deg = 0.0;
        double delay_ns = 0.0;
    };

    /// Planted inter-chain offset as a function of frequency.
    struct ChipOffsetModel
    {
        enum class Kind
        {
            constant,
            linear,
            table
        };

        Kind kind = Kind::constant;
        double value = 0.0;
        double slope_rad_per_mhz = 0.0;
        double reference_mhz = 2442.0;
        /// Composite-grid values (249 bins); linear in frequency between bins,
        /// held constant beyond the ends.
        std::vector<double> table;

        static ChipOffsetModel constant(double radians);
        static ChipOffsetModel linear(double radians_at_reference, double slope_rad_per_mhz, double reference_mhz);
        static ChipOffsetModel from_table(std::vector<double> composite_values);

        double at(double frequency_mhz) const;

        /// The model sampled on a grid, all bins measured.
        PhaseOffsetVector on_grid(Grid grid) const;
    };

    /// Per-channel 2.4 GHz receive offsets of a dual-chain 802.11ac chip
    /// (channels 1-13), usable as a realistic planted profile.
    const std::vector<double> &reference_offsets_24ghz();

    /// Composite-grid profile linear between the channel centers of
    /// reference_offsets_24ghz(), extended past channels 1 and 13 along the end segments.
    ChipOffsetModel reference_profile_24ghz();

    enum class Granularity
    {
        per_packet,
        per_subcarrier
    };

    struct SceneSpec
    {
        std::vector<PathSpec> paths;
        double antenna_spacing_m = 0.09;
        ChipOffsetModel true_chip_offset;
        double cable_offset_rad = 0.0;
        double corruption_prob = 0.0;
        Granularity granularity = Granularity::per_subcarrier;
        double noise_std = 0.0;
        std::uint64_t rng_seed = 0;
        /// Random phase shared by both chains per packet (CFO/PDD surrogate).
        bool common_phase = true;
        RotationModel rotation;

        /// Throws InvalidSceneError.
        void validate() const;
    };

    /// Stable sub-seed for one stream of one unit of work.
    std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

    /// Noise-free far-field response plus the planted chain offset, complex
    /// Gaussian noise and a per-packet common phase. Two antennas; antenna m
    /// sees each path delayed by m d sin(theta) / c.
    CaptureSet generate_multipath_csi(const SceneSpec &scene, int channel_number, int num_packets);

    struct RotationInjection
    {
        CaptureSet captures;
        /// Drawn multiple of pi per frame and subcarrier column; 0 = untouched.
        std::vector<std::vector<int>> drawn;
    };

    /// Multiplies antenna-1 gains by exp(j n pi) with probability
    /// `corruption_prob` per packet or per subcarrier, n drawn uniformly from
    /// the non-zero rotation set selected by the sign of the true offset. In
    /// per-packet mode the sign of the frame's circular-mean true offset picks
    /// the set.
    RotationInjection inject_pll_rotation(const CaptureSet &set, const PhaseOffsetVector &true_offsets,
                                          double corruption_prob, std::uint64_t rng_seed,
                                          Granularity granularity, const RotationModel &model = {});

    /// Antenna-1 gains times exp(+j psi) when direct, exp(-j psi) when swapped.
    CaptureSet emulate_cable_setup(const CaptureSet &set, double cable_offset_rad, bool swapped);

    struct SimulatedCapture
    {
        CaptureSet captures;
        std::vector<std::vector<int>> drawn;
    };

    /// generate -> cable setup (unless over the air) -> rotation injection,
    /// with sub-seeds derived from the scene seed and channel.
    SimulatedCapture simulate_capture(const SceneSpec &scene, int channel_number, int num_packets, SwapState setup);

} // namespace csikit
