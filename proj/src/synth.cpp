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


#include "csikit/synth.hpp"

#include "csikit/error.hpp"
#include "csikit/phase.hpp"
#include "csikit/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace csikit
{
    ChipOffsetModel ChipOffsetModel::constant(double radians)
    {
        ChipOffsetModel m;
        m.kind = Kind::constant;
        m.value = radians;
        return m;
    }

    ChipOffsetModel ChipOffsetModel::linear(double radians, double slope, double reference)
    {
        ChipOffsetModel m;
        m.kind = Kind::linear;
        m.value = radians;
        m.slope_rad_per_mhz = slope;
        m.reference_mhz = reference;
        return m;
    }

    ChipOffsetModel ChipOffsetModel::from_table(std::vector<double> values)
    {
        if (values.size() != kGlobalBins)
            throw InvalidSceneError("chip offset table must have 249 composite-grid values");
        ChipOffsetModel m;
        m.kind = Kind::table;
        m.table = std::move(values);
        return m;
    }

    double ChipOffsetModel::at(double f) const
    {
        switch (kind)
        {
        case Kind::constant:
            return value;
        case Kind::linear:
            return value + slope_rad_per_mhz * (f - reference_mhz);
        case Kind::table:
            break;
        }
        const double pos = (f - composite::kBaseFrequencyMhz) / kSubcarrierSpacingMhz;
        if (pos <= 0.0)
            return table.front();
        if (pos >= kGlobalBins - 1)
            return table.back();
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        if (frac == 0.0)
            return table[lo];
        return table[lo] + (table[lo + 1] - table[lo]) * frac;
    }

    PhaseOffsetVector ChipOffsetModel::on_grid(Grid grid) const
    {
        auto out = PhaseOffsetVector::filled(grid, 0.0);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = wrap_to_pi(at(grid.frequency_mhz(i)));
        return out;
    }

    const std::vector<double> &reference_offsets_24ghz()
    {
        static const std::vector<double> values{-0.1628, -0.1557, -0.1477, -0.1388, -0.1303, -0.1228, -0.1163,
                                                -0.1114, -0.1079, -0.1054, -0.1031, -0.1044, -0.0883};
        return values;
    }

    ChipOffsetModel reference_profile_24ghz()
    {
        const auto &per_channel = reference_offsets_24ghz();
        std::vector<double> table(kGlobalBins);
        for (int g = 0; g < kGlobalBins; ++g)
        {
            // channel c is centered on bin 16 (c - 1) + 28
            const double pos = (g - kHt20MaxIndex) / static_cast<double>(composite::kBinsPerChannelStep);
            // linear between channel centres, extended with the end segments' slopes
            const auto lo = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, 11.0));
            const double frac = pos - static_cast<double>(lo);
            table[static_cast<std::size_t>(g)] = per_channel[lo] + (per_channel[lo + 1] - per_channel[lo]) * frac;
        }
        return ChipOffsetModel::from_table(std::move(table));
    }

    void SceneSpec::validate() const
    {
        if (paths.empty())
            throw InvalidSceneError("scene needs at least one path");
        for (const auto &p : paths)
        {
            if (!(std::abs(p.complex_gain) > 0.0) || !std::isfinite(std::abs(p.complex_gain)))
                throw InvalidSceneError("path gain must be finite and non-zero");
            if (!(p.aoa_deg >= -90.0 && p.aoa_deg <= 90.0))
                throw InvalidSceneError("path angle must lie in -90..90 degrees");
            if (!std::isfinite(p.delay_ns) || p.delay_ns < 0.0)
                throw InvalidSceneError("path delay must be finite and non-negative");
        }
        if (!(antenna_spacing_m > 0.0) || !std::isfinite(antenna_spacing_m))
            throw InvalidSceneError("antenna spacing must be positive");
        if (!(corruption_prob >= 0.0 && corruption_prob <= 1.0))
            throw InvalidSceneError("corruption probability must lie in [0, 1]");
        if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
            throw InvalidSceneError("noise standard deviation must be non-negative");
        if (!std::isfinite(cable_offset_rad))
            throw InvalidSceneError("cable offset must be finite");
        if (true_chip_offset.kind == ChipOffsetModel::Kind::table && true_chip_offset.table.size() != kGlobalBins)
            throw InvalidSceneError("chip offset table must have 249 composite-grid values");
    }

    std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    {
        // splitmix64 finalizer over a running combination
        auto mix = [](std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        return mix(mix(mix(seed) ^ a) ^ b);
    }

    CaptureSet generate_multipath_csi(const SceneSpec &scene, int channel, int num_packets)
    {
        scene.validate();
        if (num_packets < 1)
            throw InvalidArgumentError("at least one packet must be generated");
        const Band band = band_of_channel(channel);
        const double center = channel_center_frequency(band, channel);
        const auto &ks = ht20_subcarrier_indices();

        CaptureSet set;
        set.label = "ch" + std::to_string(channel);
        set.swap_state = SwapState::over_air;
        set.frames.reserve(static_cast<std::size_t>(num_packets));

        for (int t = 0; t < num_packets; ++t)
        {
            std::mt19937_64 rng(derive_seed(scene.rng_seed, static_cast<std::uint64_t>(channel),
                                            static_cast<std::uint64_t>(t)));
            std::uniform_real_distribution<double> phase(-kPi, kPi);
            std::normal_distribution<double> noise(0.0, scene.noise_std / std::sqrt(2.0));
            const auto common = scene.common_phase ? std::polar(1.0, phase(rng)) : std::complex<double>(1.0, 0.0);

            Eigen::MatrixXcd gains(2, kHt20Subcarriers);
            for (std::size_t col = 0; col < ks.size(); ++col)
            {
                const double f_mhz = center + kSubcarrierSpacingMhz * ks[col];
                const double f_hz = f_mhz * 1e6;
                for (int m = 0; m < 2; ++m)
                {
                    std::complex<double> h{0.0, 0.0};
                    for (const auto &p : scene.paths)
                    {
                        const double delay = -kTwoPi * f_hz * p.delay_ns * 1e-9;
                        const double spatial = -kTwoPi * scene.antenna_spacing_m * m *
                                               std::sin(p.aoa_deg * kPi / 180.0) * f_hz / kSpeedOfLight;
                        h += p.complex_gain * std::polar(1.0, delay + spatial);
                    }
                    if (m == 1)
                        h *= std::polar(1.0, scene.true_chip_offset.at(f_mhz));
                    h *= common;
                    if (scene.noise_std > 0.0)
                    {
                        const double re = noise(rng);
                        const double im = noise(rng);
                        h += std::complex<double>(re, im);
                    }
                    gains(m, static_cast<Eigen::Index>(col)) = h;
                }
            }
            set.frames.push_back(make_frame(band, channel, 1000LL * (t + 1), std::move(gains)));
        }
        return set;
    }

    namespace
    {
        double true_offset_at(const PhaseOffsetVector &truth, const CsiFrame &frame, std::size_t col)
        {
            const int k = frame.subcarrier_indices[col];
            std::size_t i = 0;
            if (truth.grid.global)
                i = static_cast<std::size_t>(global_index(frame.channel_number, k));
            else
            {
                if (truth.grid.channel_number != frame.channel_number)
                    throw InvalidArgumentError("true offsets are for channel " +
                                               std::to_string(truth.grid.channel_number) + ", frame is on " +
                                               std::to_string(frame.channel_number));
                i = col;
            }
            if (!truth.mask.at(i))
                throw InvalidArgumentError("true offset missing for a corrupted bin");
            return truth.values[i];
        }

        int draw_rotation(std::mt19937_64 &rng, const std::vector<int> &choices)
        {
            std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
            return choices[pick(rng)];
        }
    } // namespace

    RotationInjection inject_pll_rotation(const CaptureSet &set, const PhaseOffsetVector &truth, double prob,
                                          std::uint64_t seed, Granularity granularity, const RotationModel &model)
    {
        if (!(prob >= 0.0 && prob <= 1.0))
            throw InvalidArgumentError("corruption probability must lie in [0, 1]");

        RotationInjection out{set, {}};
        out.drawn.resize(set.frames.size());
        for (std::size_t fi = 0; fi < set.frames.size(); ++fi)
        {
            auto &frame = out.captures.frames[fi];
            if (frame.num_rx_antennas != 2)
                throw InvalidArgumentError("rotation injection expects two-antenna frames");
            const std::size_t cols = frame.subcarrier_indices.size();
            auto &drawn = out.drawn[fi];
            drawn.assign(cols, 0);
            if (prob == 0.0)
                continue;

            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(fi)));
            std::bernoulli_distribution corrupt(prob);

            if (granularity == Granularity::per_packet)
            {
                if (!corrupt(rng))
                    continue;
                std::vector<double> truth_values(cols);
                for (std::size_t c = 0; c < cols; ++c)
                    truth_values[c] = true_offset_at(truth, frame, c);
                const double sign_ref = circular_mean(truth_values).value_or(truth_values.front());
                const auto choices = model.nonzero_set_for(sign_ref);
                if (choices.empty())
                    continue;
                std::fill(drawn.begin(), drawn.end(), draw_rotation(rng, choices));
            }
            else
            {
                for (std::size_t c = 0; c < cols; ++c)
                {
                    if (!corrupt(rng))
                        continue;
                    const auto choices = model.nonzero_set_for(true_offset_at(truth, frame, c));
                    if (!choices.empty())
                        drawn[c] = draw_rotation(rng, choices);
                }
            }
            // exp(j n pi) is exactly +/-1
            for (std::size_t c = 0; c < cols; ++c)
                if (drawn[c] % 2 != 0)
                    frame.gains(1, static_cast<Eigen::Index>(c)) = -frame.gains(1, static_cast<Eigen::Index>(c));
        }
        return out;
    }

    CaptureSet emulate_cable_setup(const CaptureSet &set, double psi, bool swapped)
    {
        CaptureSet out = set;
        out.swap_state = swapped ? SwapState::swapped : SwapState::direct;
        if (psi == 0.0)
            return out;
        const auto rot = std::polar(1.0, swapped ? -psi : psi);
        for (auto &frame : out.frames)
        {
            if (frame.num_rx_antennas != 2)
                throw InvalidArgumentError("cable emulation expects two-antenna frames");
            frame.gains.row(1) *= rot;
        }
        return out;
    }

    SimulatedCapture simulate_capture(const SceneSpec &scene, int channel, int num_packets, SwapState setup)
    {
        // the swapped run is a separate measurement with its own noise
        SceneSpec run = scene;
        if (setup == SwapState::swapped)
            run.rng_seed = derive_seed(scene.rng_seed, 0x73776170ULL);
        CaptureSet set = generate_multipath_csi(run, channel, num_packets);
        if (setup != SwapState::over_air)
            set = emulate_cable_setup(set, scene.cable_offset_rad, setup == SwapState::swapped);

        const Grid grid = band_of_channel(channel) == Band::band24 ? Grid::composite() : Grid::channel_local(channel);
        const auto truth = scene.true_chip_offset.on_grid(grid);
        const std::uint64_t stream = setup == SwapState::swapped ? 2 : 1;
        auto injected = inject_pll_rotation(set, truth, scene.corruption_prob,
                                            derive_seed(scene.rng_seed, 0x726f74ULL + stream,
                                                        static_cast<std::uint64_t>(channel)),
                                            scene.granularity, scene.rotation);
        injected.captures.label = set.label;
        return {std::move(injected.captures), std::move(injected.drawn)};
    }

} // namespace csikit
