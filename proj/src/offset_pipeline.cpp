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


#include "csikit/offset_pipeline.hpp"

#include "csikit/capture_io.hpp"
#include "csikit/error.hpp"
#include "csikit/outliers.hpp"
#include "csikit/phase.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

namespace csikit
{
    PhaseOffsetVector extract_phase_offset(const CsiFrame &frame, int ref, int other)
    {
        if (frame.num_rx_antennas < 2 || frame.gains.rows() < 2)
            throw InvalidArgumentError("phase offset extraction needs at least two antennas");
        if (ref < 0 || other < 0 || ref >= frame.gains.rows() || other >= frame.gains.rows() || ref == other)
            throw InvalidArgumentError("invalid antenna pair for phase offset extraction");

        auto out = PhaseOffsetVector::empty(Grid::channel_local(frame.channel_number));
        const auto n = std::min<std::size_t>(out.values.size(), static_cast<std::size_t>(frame.gains.cols()));
        for (std::size_t k = 0; k < n; ++k)
        {
            const auto col = static_cast<Eigen::Index>(k);
            const std::complex<double> h0 = frame.gains(ref, col);
            const std::complex<double> h1 = frame.gains(other, col);
            if (h0 == 0.0 || h1 == 0.0)
                continue;
            out.values[k] = wrap_to_pi(std::arg(h1 * std::conj(h0)));
            out.mask[k] = true;
        }
        return out;
    }

    void OffsetObservationSet::validate() const
    {
        for (const auto &o : observations)
        {
            if (!o.offsets.grid.global)
                throw InvalidArgumentError("observations must be on the composite grid");
            if (o.offsets.values.size() != kGlobalBins || o.offsets.mask.size() != kGlobalBins)
                throw InvalidArgumentError("observation vector length differs from the composite grid");
            if (o.packet < 1 || o.packet > packets_per_channel)
                throw InvalidArgumentError("packet index " + std::to_string(o.packet) + " outside 1.." +
                                           std::to_string(packets_per_channel));
            if (!channels.contains(o.channel))
                throw InvalidArgumentError("observation on undeclared channel " + std::to_string(o.channel));
        }
    }

    OffsetObservationSet make_observations(std::span<const CaptureSet> captures)
    {
        OffsetObservationSet obs;
        std::map<int, int> count;
        for (const auto &set : captures)
            for (const auto &frame : set.frames)
            {
                if (frame.band != Band::band24)
                    throw InvalidArgumentError("offset correction runs on the 2.4 GHz composite grid; got channel " +
                                               std::to_string(frame.channel_number));
                const int packet = ++count[frame.channel_number];
                obs.observations.push_back({packet, frame.channel_number, to_global(extract_phase_offset(frame))});
                obs.channels.insert(frame.channel_number);
                obs.packets_per_channel = std::max(obs.packets_per_channel, packet);
            }
        return obs;
    }

    namespace
    {
        // Filters the masked entries of `values` on a copy unwrapped around
        // their circular median and wraps the result back.
        OutlierFill fill_circular(const std::vector<double> &values, const std::vector<bool> &mask)
        {
            std::vector<double> measured;
            for (std::size_t i = 0; i < values.size(); ++i)
                if (mask[i])
                    measured.push_back(values[i]);
            const double anchor = circular_median(measured);

            std::vector<double> unwrapped(values.size(), 0.0);
            for (std::size_t i = 0; i < values.size(); ++i)
                if (mask[i])
                    unwrapped[i] = anchor + wrap_to_pi(values[i] - anchor);

            auto fill = fill_outliers_linear(unwrapped, mask);
            for (std::size_t i = 0; i < values.size(); ++i)
                fill.values[i] = mask[i] ? wrap_to_pi(fill.values[i]) : values[i];
            return fill;
        }
    } // namespace

    CorrectionReport correct_offsets(const OffsetObservationSet &obs)
    {
        obs.validate();
        const auto bins = static_cast<std::size_t>(kGlobalBins);

        std::vector<std::vector<double>> samples(bins);
        std::vector<int> outliers(bins, 0);
        std::map<int, std::vector<double>> by_channel;
        CorrectionReport report;
        report.observation_count = obs.observations.size();

        // stage 1
        for (const auto &o : obs.observations)
        {
            const auto &v = o.offsets;
            const std::size_t measured = v.measured_count();
            if (measured == 0)
                continue;
            std::vector<double> filtered = v.values;
            std::vector<bool> flagged(bins, false);
            if (measured >= 3)
            {
                auto fill = fill_circular(v.values, v.mask);
                if (fill.degenerate)
                    ++report.degenerate_observations;
                filtered = std::move(fill.values);
                flagged = std::move(fill.outlier);
            }
            for (std::size_t g = 0; g < bins; ++g)
            {
                if (!v.mask[g])
                    continue;
                samples[g].push_back(filtered[g]);
                by_channel[o.channel].push_back(filtered[g]);
                if (flagged[g])
                    ++outliers[g];
            }
        }

        std::vector<bool> required(bins, false);
        for (int c : obs.channels)
            for (int g : channel_bins(c))
                required[static_cast<std::size_t>(g)] = true;
        std::vector<int> missing;
        for (std::size_t g = 0; g < bins; ++g)
            if (required[g] && samples[g].empty())
                missing.push_back(static_cast<int>(g));
        if (!missing.empty())
        {
            std::ostringstream os;
            os << "no observation covers bin(s)";
            for (int g : missing)
                os << ' ' << g;
            throw CoverageError(os.str());
        }

        for (const auto &[c, values] : by_channel)
            report.per_channel_median[c] = circular_median(values);

        // stage 2
        report.median_stage = PhaseOffsetVector::empty(Grid::composite());
        report.per_bin_sample_count.assign(bins, 0);
        report.per_bin_outlier_fraction.assign(bins, 0.0);
        for (std::size_t g = 0; g < bins; ++g)
        {
            if (samples[g].empty())
                continue;
            report.median_stage.values[g] = circular_median(samples[g]);
            report.median_stage.mask[g] = true;
            report.per_bin_sample_count[g] = static_cast<int>(samples[g].size());
            report.per_bin_outlier_fraction[g] =
                static_cast<double>(outliers[g]) / static_cast<double>(samples[g].size());
        }

        // stage 3
        report.corrected = report.median_stage;
        if (report.median_stage.measured_count() >= 3)
        {
            auto fill = fill_circular(report.median_stage.values, report.median_stage.mask);
            report.final_pass_degenerate = fill.degenerate;
            report.corrected.values = std::move(fill.values);
        }

        std::vector<double> residuals;
        for (std::size_t g = 0; g < bins; ++g)
            for (double s : samples[g])
                residuals.push_back(wrap_to_pi(s - report.corrected.values[g]));
        if (!residuals.empty())
        {
            const double center = median(residuals);
            for (double &r : residuals)
                r = std::abs(r - center);
            report.residual_spread = kMadScale * median(std::move(residuals));
        }
        return report;
    }

    namespace
    {
        void check_pair(const PhaseOffsetVector &a, const PhaseOffsetVector &b)
        {
            if (!(a.grid == b.grid) || a.values.size() != b.values.size() || a.mask != b.mask)
                throw InvalidArgumentError("direct and swapped measurements must share grid and mask");
        }
    } // namespace

    PhaseOffsetVector swap_calibrate(const PhaseOffsetVector &direct, const PhaseOffsetVector &swapped)
    {
        check_pair(direct, swapped);
        constexpr double antipodal = 1e-9;
        auto out = PhaseOffsetVector::empty(direct.grid);
        for (std::size_t i = 0; i < direct.values.size(); ++i)
        {
            if (!direct.mask[i])
                continue;
            // midpoint of the shorter arc; equal inputs come back unchanged
            const double half_gap = wrap_to_pi(swapped.values[i] - direct.values[i]) / 2.0;
            if (std::abs(half_gap) > kPi / 2 - antipodal)
                continue;
            out.values[i] = wrap_to_pi(direct.values[i] + half_gap);
            out.mask[i] = true;
        }
        return out;
    }

    PhaseOffsetVector cable_offset_estimate(const PhaseOffsetVector &direct, const PhaseOffsetVector &swapped)
    {
        check_pair(direct, swapped);
        auto out = PhaseOffsetVector::empty(direct.grid);
        for (std::size_t i = 0; i < direct.values.size(); ++i)
        {
            if (!direct.mask[i])
                continue;
            out.values[i] = wrap_to_pi(direct.values[i] - swapped.values[i]) / 2.0;
            out.mask[i] = true;
        }
        return out;
    }

    std::string correction_csv(const CorrectionReport &r)
    {
        std::ostringstream os;
        os << "bin,frequency_mhz,corrected_rad,samples,outlier_fraction\n";
        for (std::size_t g = 0; g < r.corrected.values.size(); ++g)
        {
            os << g << ',' << format_double(r.corrected.grid.frequency_mhz(g)) << ','
               << (r.corrected.mask[g] ? format_double(r.corrected.values[g]) : std::string()) << ','
               << r.per_bin_sample_count[g] << ',' << format_double(r.per_bin_outlier_fraction[g]) << '\n';
        }
        return os.str();
    }

} // namespace csikit
