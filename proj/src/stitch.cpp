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


#include "csikit/stitch.hpp"

#include "csikit/capture_io.hpp"
#include "csikit/error.hpp"
#include "csikit/phase.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace csikit
{
    int global_index(int channel, int k)
    {
        if (channel < composite::kFirstChannel || channel > composite::kLastChannel)
            throw InvalidChannelError("composite grid covers 2.4 GHz channels 1-13, got " + std::to_string(channel));
        if (k == 0)
            throw InvalidArgumentError("DC subcarrier is not measured in HT20");
        if (k < -kHt20MaxIndex || k > kHt20MaxIndex)
            throw InvalidArgumentError("subcarrier index " + std::to_string(k) + " outside -28..28");
        return composite::kBinsPerChannelStep * (channel - 1) + k + kHt20MaxIndex;
    }

    std::vector<std::pair<int, int>> channels_covering(int g)
    {
        if (g < 0 || g >= kGlobalBins)
            throw InvalidArgumentError("bin " + std::to_string(g) + " outside 0..248");
        std::vector<std::pair<int, int>> out;
        for (int c = composite::kFirstChannel; c <= composite::kLastChannel; ++c)
        {
            const int k = g - composite::kBinsPerChannelStep * (c - 1) - kHt20MaxIndex;
            if (k != 0 && k >= -kHt20MaxIndex && k <= kHt20MaxIndex)
                out.emplace_back(c, k);
        }
        return out;
    }

    std::vector<int> channel_bins(int channel)
    {
        std::vector<int> out;
        for (int k : ht20_subcarrier_indices())
            out.push_back(global_index(channel, k));
        return out;
    }

    PhaseOffsetVector to_global(const PhaseOffsetVector &local)
    {
        if (local.grid.global)
            return local;
        const auto &ks = ht20_subcarrier_indices();
        auto out = PhaseOffsetVector::empty(Grid::composite());
        for (std::size_t i = 0; i < ks.size(); ++i)
        {
            if (!local.mask[i])
                continue;
            const auto g = static_cast<std::size_t>(global_index(local.grid.channel_number, ks[i]));
            out.values[g] = local.values[i];
            out.mask[g] = true;
        }
        return out;
    }

    namespace
    {
        void check_unique(std::set<std::pair<int, int>> &seen, int packet, int channel)
        {
            if (!seen.emplace(packet, channel).second)
                throw DuplicateObservationError("duplicate observation for packet " + std::to_string(packet) +
                                                " on channel " + std::to_string(channel));
        }

        template <class Value>
        void deposit(StitchedSpectrum<Value> &s, int g, Deposit<Value> d)
        {
            s.per_bin[static_cast<std::size_t>(g)].push_back(std::move(d));
            ++s.coverage[static_cast<std::size_t>(g)];
        }
    } // namespace

    PhaseSpectrum stitch(std::span<const PhaseObservation> observations)
    {
        PhaseSpectrum s;
        std::set<std::pair<int, int>> seen;
        const auto &ks = ht20_subcarrier_indices();
        for (const auto &o : observations)
        {
            check_unique(seen, o.packet, o.channel);
            if (o.offsets.grid.global)
            {
                for (int g = 0; g < kGlobalBins; ++g)
                {
                    if (!o.offsets.mask[static_cast<std::size_t>(g)])
                        continue;
                    const int k = g - composite::kBinsPerChannelStep * (o.channel - 1) - kHt20MaxIndex;
                    deposit(s, g, {o.packet, o.channel, k, o.offsets.values[static_cast<std::size_t>(g)]});
                }
                continue;
            }
            if (o.offsets.grid.channel_number != o.channel)
                throw InvalidArgumentError("observation channel differs from its grid channel");
            for (std::size_t i = 0; i < ks.size(); ++i)
                if (o.offsets.mask[i])
                    deposit(s, global_index(o.channel, ks[i]), {o.packet, o.channel, ks[i], o.offsets.values[i]});
        }
        return s;
    }

    GainSpectrum stitch(std::span<const FrameObservation> observations)
    {
        GainSpectrum s;
        std::set<std::pair<int, int>> seen;
        for (const auto &o : observations)
        {
            const auto &f = o.frame;
            if (f.band != Band::band24)
                throw InvalidArgumentError("only 2.4 GHz frames can be stitched");
            check_unique(seen, o.packet, f.channel_number);
            for (std::size_t col = 0; col < f.subcarrier_indices.size(); ++col)
            {
                std::vector<std::complex<double>> column(static_cast<std::size_t>(f.gains.rows()));
                for (Eigen::Index a = 0; a < f.gains.rows(); ++a)
                    column[static_cast<std::size_t>(a)] = f.gains(a, static_cast<Eigen::Index>(col));
                const int k = f.subcarrier_indices[col];
                deposit(s, global_index(f.channel_number, k), {o.packet, f.channel_number, k, std::move(column)});
            }
        }
        return s;
    }

    void merge_circular_median(PhaseSpectrum &s)
    {
        for (std::size_t g = 0; g < s.per_bin.size(); ++g)
        {
            if (s.per_bin[g].empty())
            {
                s.merged[g].reset();
                continue;
            }
            std::vector<double> values;
            for (const auto &d : s.per_bin[g])
                values.push_back(d.value);
            s.merged[g] = circular_median(values);
        }
    }

    OverlapReport overlap_consistency(const PhaseSpectrum &s, double tolerance)
    {
        OverlapReport r;
        r.tolerance = tolerance;
        r.spread.assign(s.per_bin.size(), std::nan(""));
        for (std::size_t g = 0; g < s.per_bin.size(); ++g)
        {
            const auto &bin = s.per_bin[g];
            if (bin.size() < 2)
                continue;
            double spread = 0.0;
            for (std::size_t i = 0; i < bin.size(); ++i)
                for (std::size_t j = i + 1; j < bin.size(); ++j)
                    spread = std::max(spread, circular_distance(bin[i].value, bin[j].value));
            r.spread[g] = spread;
            ++r.bins_checked;
            r.max_spread = std::max(r.max_spread, spread);
            if (spread > tolerance)
                r.flagged_bins.push_back(static_cast<int>(g));
        }
        return r;
    }

    std::string stitched_csv(const PhaseSpectrum &s)
    {
        std::ostringstream os;
        os << "bin,frequency_mhz,coverage,merged_value\n";
        for (int g = 0; g < kGlobalBins; ++g)
        {
            const auto &m = s.merged[static_cast<std::size_t>(g)];
            os << g << ',' << format_double(composite::frequency_mhz(g)) << ','
               << s.coverage[static_cast<std::size_t>(g)] << ',' << (m ? format_double(*m) : std::string()) << '\n';
        }
        return os.str();
    }

} // namespace csikit
