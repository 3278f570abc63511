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
#include "csikit/stitch.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace csikit
{
    /// Per-subcarrier phase of antenna `other` relative to antenna `ref`,
    /// wrapped to (-pi, pi]. Bins where either gain is zero are unmeasured.
    PhaseOffsetVector extract_phase_offset(const CsiFrame &frame, int ref_antenna = 0, int other_antenna = 1);

    /// Composite-grid offsets of many packets. Packets are numbered 1..N per
    /// channel.
    struct OffsetObservationSet
    {
        std::vector<PhaseObservation> observations;
        int packets_per_channel = 0;
        std::set<int> channels;

        /// Throws InvalidArgumentError when an invariant is broken.
        void validate() const;
    };

    /// Extracts and lifts every 2.4 GHz frame of the capture sets onto the
    /// composite grid, numbering packets in file order per channel.
    OffsetObservationSet make_observations(std::span<const CaptureSet> captures);

    struct CorrectionReport
    {
        /// Final per-bin offset; unmeasured outside the declared channels.
        PhaseOffsetVector corrected;
        /// Per-bin median before the final outlier pass.
        PhaseOffsetVector median_stage;
        std::vector<int> per_bin_sample_count;
        std::vector<double> per_bin_outlier_fraction;
        /// 1.4826 * MAD of the wrapped residuals of all filtered samples
        /// against the corrected vector.
        double residual_spread = 0.0;
        std::size_t observation_count = 0;
        std::size_t degenerate_observations = 0;
        bool final_pass_degenerate = false;
        /// Circular median of each channel's own stage-1 samples.
        std::map<int, double> per_channel_median;
    };

    /// Removes random pi rotations from repeated offset measurements:
    ///  1. outlier fill along subcarriers of each observation's measured span,
    ///  2. circular median per bin across packets and overlapping channels,
    ///  3. outlier fill of the median vector along the grid.
    ///
    /// The fills run on values unwrapped around the circular median of the
    /// vector being filtered, so spans straddling +/-pi stay contiguous.
    ///
    /// Bins spanned by `obs.channels` must all be measured at least once,
    /// otherwise CoverageError lists the missing bins.
    CorrectionReport correct_offsets(const OffsetObservationSet &obs);

    /// Per-bin circular mean of a direct and a cable-swapped measurement.
    /// Antipodal bins are masked.
    PhaseOffsetVector swap_calibrate(const PhaseOffsetVector &direct, const PhaseOffsetVector &swapped);

    /// Per-bin half circular difference (direct - swapped) / 2: the cable term.
    PhaseOffsetVector cable_offset_estimate(const PhaseOffsetVector &direct, const PhaseOffsetVector &swapped);

    /// CSV with columns bin,frequency_mhz,corrected_rad,samples,outlier_fraction.
    std::string correction_csv(const CorrectionReport &report);

} // namespace csikit
