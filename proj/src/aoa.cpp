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


#include "csikit/aoa.hpp"

#include "csikit/capture_io.hpp"
#include "csikit/error.hpp"
#include "csikit/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace csikit
{
    std::vector<double> SteeringModel::grid_range(double first, double last, double step)
    {
        if (!(step > 0.0) || last < first)
            throw InvalidArgumentError("grid range needs step > 0 and last >= first");
        std::vector<double> out;
        const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(first + step * static_cast<double>(i));
        return out;
    }

    void SteeringModel::validate() const
    {
        if (!(antenna_spacing_m > 0.0) || !(speed_of_light > 0.0))
            throw InvalidArgumentError("antenna spacing and propagation speed must be positive");
        if (theta_grid_deg.empty() || tau_grid_ns.empty())
            throw InvalidArgumentError("search grids must not be empty");
        if (!std::is_sorted(theta_grid_deg.begin(), theta_grid_deg.end()) ||
            !std::is_sorted(tau_grid_ns.begin(), tau_grid_ns.end()))
            throw InvalidArgumentError("search grids must be sorted");
        if (theta_grid_deg.front() < -90.0 || theta_grid_deg.back() > 90.0)
            throw InvalidArgumentError("angle grid must lie within -90..90 degrees");
        if (smoothing_window < 2 || smoothing_window > kHt20MaxIndex)
            throw InvalidArgumentError("smoothing window must lie in 2..28");
    }

    double steering_phase(double theta_deg, double frequency_hz, const SteeringModel &model)
    {
        return -kTwoPi * model.antenna_spacing_m * std::sin(theta_deg * kPi / 180.0) * frequency_hz /
               model.speed_of_light;
    }

    namespace
    {
        // One 20 MHz capture: subcarrier index and per-antenna gains, ascending by index.
        struct CaptureColumns
        {
            double center_mhz = 0.0;
            std::vector<int> subcarriers;
            std::vector<std::vector<std::complex<double>>> gains;
        };

        SmoothedMatrix smooth(const std::vector<CaptureColumns> &captures, const SteeringModel &model)
        {
            model.validate();
            const int L = model.smoothing_window;
            int antennas = 0;
            for (const auto &c : captures)
                for (const auto &g : c.gains)
                {
                    if (antennas == 0)
                        antennas = static_cast<int>(g.size());
                    else if (antennas != static_cast<int>(g.size()))
                        throw InvalidArgumentError("captures disagree on antenna count");
                }
            if (antennas != 0 && antennas < 2)
                throw InvalidArgumentError("smoothing needs at least two antennas");

            struct Window
            {
                std::size_t capture;
                std::size_t start;
            };
            std::vector<Window> windows;
            for (std::size_t ci = 0; ci < captures.size(); ++ci)
            {
                const auto &ks = captures[ci].subcarriers;
                std::size_t run_start = 0;
                for (std::size_t i = 1; i <= ks.size(); ++i)
                {
                    if (i < ks.size() && ks[i] == ks[i - 1] + 1)
                        continue;
                    const std::size_t run = i - run_start;
                    for (std::size_t s = 0; s + static_cast<std::size_t>(L) <= run; ++s)
                        windows.push_back({ci, run_start + s});
                    run_start = i;
                }
            }
            if (windows.empty())
                throw InsufficientDataError("no run of " + std::to_string(L) +
                                            " contiguous subcarriers available for smoothing");

            SmoothedMatrix out;
            out.antennas = antennas;
            out.window = L;
            out.columns.resize(antennas * L, static_cast<Eigen::Index>(windows.size()));
            double freq_sum = 0.0;
            for (std::size_t w = 0; w < windows.size(); ++w)
            {
                const auto &c = captures[windows[w].capture];
                double k_sum = 0.0;
                for (int l = 0; l < L; ++l)
                {
                    const std::size_t i = windows[w].start + static_cast<std::size_t>(l);
                    k_sum += c.subcarriers[i];
                    for (int m = 0; m < antennas; ++m)
                        out.columns(m * L + l, static_cast<Eigen::Index>(w)) = c.gains[i][static_cast<std::size_t>(m)];
                }
                freq_sum += (c.center_mhz + kSubcarrierSpacingMhz * k_sum / L) * 1e6;
            }
            out.mean_frequency_hz = freq_sum / static_cast<double>(windows.size());
            return out;
        }
    } // namespace

    SmoothedMatrix build_smoothed_matrix(std::span<const CsiFrame> frames, const SteeringModel &model)
    {
        std::vector<CaptureColumns> captures;
        for (const auto &f : frames)
        {
            CaptureColumns c;
            c.center_mhz = f.center_frequency_mhz;
            c.subcarriers = f.subcarrier_indices;
            for (Eigen::Index col = 0; col < f.gains.cols(); ++col)
            {
                std::vector<std::complex<double>> g(static_cast<std::size_t>(f.gains.rows()));
                for (Eigen::Index a = 0; a < f.gains.rows(); ++a)
                    g[static_cast<std::size_t>(a)] = f.gains(a, col);
                c.gains.push_back(std::move(g));
            }
            captures.push_back(std::move(c));
        }
        return smooth(captures, model);
    }

    SmoothedMatrix build_smoothed_matrix(const GainSpectrum &spectrum, const SteeringModel &model)
    {
        std::map<std::pair<int, int>, std::map<int, std::vector<std::complex<double>>>> grouped;
        for (const auto &bin : spectrum.per_bin)
            for (const auto &d : bin)
                grouped[{d.packet, d.channel}][d.subcarrier] = d.value;

        std::vector<CaptureColumns> captures;
        for (const auto &[key, columns] : grouped)
        {
            CaptureColumns c;
            c.center_mhz = channel_center_frequency(Band::band24, key.second);
            for (const auto &[k, g] : columns)
            {
                c.subcarriers.push_back(k);
                c.gains.push_back(g);
            }
            captures.push_back(std::move(c));
        }
        return smooth(captures, model);
    }

    int eigengap_model_order(std::span<const double> ev)
    {
        if (ev.size() < 2)
            return 1;
        const double floor = std::max(ev.front(), 0.0) * 1e-15 + std::numeric_limits<double>::min();
        int best = 1;
        double best_ratio = -1.0;
        for (std::size_t i = 0; i + 1 < ev.size(); ++i)
        {
            const double ratio = std::max(ev[i], 0.0) / std::max(ev[i + 1], floor);
            if (ratio > best_ratio)
            {
                best_ratio = ratio;
                best = static_cast<int>(i) + 1;
            }
        }
        return best;
    }

    AoaResult music_spectrum(const SmoothedMatrix &smoothed, const SteeringModel &model, int num_paths)
    {
        model.validate();
        const auto &X = smoothed.columns;
        const Eigen::Index rows = X.rows();
        const int L = smoothed.window;
        if (rows == 0 || rows != smoothed.antennas * L)
            throw InvalidArgumentError("smoothed matrix shape does not match its window");
        if (X.cols() < rows)
            throw InsufficientDataError("MUSIC needs at least " + std::to_string(rows) + " columns, got " +
                                        std::to_string(X.cols()));
        if (num_paths < 0 || num_paths >= rows)
            throw InvalidArgumentError("number of paths must lie in 0.." + std::to_string(rows - 1));

        const Eigen::MatrixXcd R = X * X.adjoint() / static_cast<double>(X.cols());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(R);
        if (solver.info() != Eigen::Success)
            throw DegenerateSubspaceError("covariance eigendecomposition failed");

        AoaResult out;
        const auto &ascending = solver.eigenvalues();
        for (Eigen::Index i = rows - 1; i >= 0; --i)
            out.eigenvalue_profile.push_back(std::max(ascending(i), 0.0));
        const double largest = out.eigenvalue_profile.front();
        if (!(largest > 0.0) || !std::isfinite(largest))
            throw DegenerateSubspaceError("covariance is zero; no signal subspace");

        const auto rank = static_cast<int>(std::count_if(out.eigenvalue_profile.begin(), out.eigenvalue_profile.end(),
                                                         [&](double l)
                                                         { return l > largest * 1e-10; }));
        out.num_paths = num_paths == 0 ? eigengap_model_order(out.eigenvalue_profile) : num_paths;
        if (out.num_paths > rank)
            throw DegenerateSubspaceError("covariance rank " + std::to_string(rank) + " is below the " +
                                          std::to_string(out.num_paths) + " requested paths");
        const double next = out.eigenvalue_profile[static_cast<std::size_t>(out.num_paths)];
        out.eigengap = out.eigenvalue_profile[static_cast<std::size_t>(out.num_paths - 1)] /
                       std::max(next, largest * 1e-300 + std::numeric_limits<double>::min());

        // eigenvectors come in ascending order: the first rows - K span the noise subspace
        const Eigen::MatrixXcd En = solver.eigenvectors().leftCols(rows - out.num_paths);
        const Eigen::MatrixXcd Q = En * En.adjoint();

        out.theta_grid_deg = model.theta_grid_deg;
        out.tau_grid_ns = model.tau_grid_ns;
        out.pseudospectrum.resize(static_cast<Eigen::Index>(model.theta_grid_deg.size()),
                                  static_cast<Eigen::Index>(model.tau_grid_ns.size()));

        const double df = kSubcarrierSpacingMhz * 1e6;
        std::vector<Eigen::VectorXcd> delay_vectors;
        for (double tau : model.tau_grid_ns)
        {
            Eigen::VectorXcd t(L);
            for (int l = 0; l < L; ++l)
                t(l) = std::polar(1.0, -kTwoPi * df * l * tau * 1e-9);
            delay_vectors.push_back(std::move(t));
        }

        Eigen::VectorXcd a(rows);
        double best = -1.0;
        for (std::size_t i = 0; i < model.theta_grid_deg.size(); ++i)
        {
            const double spatial = steering_phase(model.theta_grid_deg[i], smoothed.mean_frequency_hz, model);
            for (std::size_t j = 0; j < delay_vectors.size(); ++j)
            {
                for (int m = 0; m < smoothed.antennas; ++m)
                    a.segment(m * L, L) = delay_vectors[j] * std::polar(1.0, m * spatial);
                const double denom = std::real(a.dot(Q * a));
                const double p = 1.0 / std::max(denom, std::numeric_limits<double>::min());
                out.pseudospectrum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p;
                if (p > best)
                {
                    best = p;
                    out.peak_theta_deg = model.theta_grid_deg[i];
                    out.peak_tau_ns = model.tau_grid_ns[j];
                }
            }
        }
        return out;
    }

    std::vector<SpectrumPeak> local_maxima(const AoaResult &r, std::size_t max_count)
    {
        const auto &P = r.pseudospectrum;
        std::vector<SpectrumPeak> peaks;
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            for (Eigen::Index j = 0; j < P.cols(); ++j)
            {
                bool is_max = true;
                for (Eigen::Index di = -1; di <= 1 && is_max; ++di)
                    for (Eigen::Index dj = -1; dj <= 1; ++dj)
                    {
                        if (di == 0 && dj == 0)
                            continue;
                        const Eigen::Index ii = i + di, jj = j + dj;
                        if (ii < 0 || jj < 0 || ii >= P.rows() || jj >= P.cols())
                            continue;
                        if (P(ii, jj) >= P(i, j))
                        {
                            is_max = false;
                            break;
                        }
                    }
                if (is_max)
                    peaks.push_back({r.theta_grid_deg[static_cast<std::size_t>(i)],
                                     r.tau_grid_ns[static_cast<std::size_t>(j)], P(i, j)});
            }
        std::sort(peaks.begin(), peaks.end(), [](const SpectrumPeak &a, const SpectrumPeak &b)
                  { return a.power > b.power; });
        if (peaks.size() > max_count)
            peaks.resize(max_count);
        return peaks;
    }

    double phase_slope_aoa(const PhaseOffsetVector &v, const SteeringModel &model)
    {
        std::vector<double> phases;
        double freq_sum = 0.0;
        for (std::size_t i = 0; i < v.values.size(); ++i)
            if (v.mask[i])
            {
                phases.push_back(v.values[i]);
                freq_sum += v.grid.frequency_mhz(i) * 1e6;
            }
        if (phases.size() < 10)
            throw InsufficientDataError("phase slope estimate needs at least 10 measured bins");
        const auto mean_phase = circular_mean(phases);
        if (!mean_phase)
            throw InsufficientDataError("measured phases cancel; no circular mean");
        const double mean_freq = freq_sum / static_cast<double>(phases.size());
        const double arg = -*mean_phase * model.speed_of_light / (kTwoPi * mean_freq * model.antenna_spacing_m);
        if (std::abs(arg) > 1.0)
        {
            std::ostringstream os;
            os << "arcsine argument " << arg << " outside [-1, 1]";
            throw OutOfRangeError(os.str(), arg);
        }
        return std::asin(arg) * 180.0 / kPi;
    }

    EndToEndResult estimate_aoa_endtoend(std::span<const CaptureSet> captures, const SteeringModel &model,
                                         const AoaPipelineParams &params)
    {
        std::size_t frames = 0;
        for (const auto &c : captures)
            frames += c.frames.size();
        if (frames == 0)
            throw InsufficientDataError("no packets to estimate the angle of arrival from");
        if (params.chip_calibration && !params.chip_calibration->grid.global)
            throw InvalidArgumentError("chip calibration must be on the composite grid");

        EndToEndResult out;
        out.correction = correct_offsets(make_observations(captures));
        const auto &corrected = out.correction.corrected;

        std::vector<FrameObservation> aligned;
        std::map<int, int> count;
        for (const auto &set : captures)
            for (const auto &frame : set.frames)
            {
                FrameObservation o{++count[frame.channel_number], frame};
                const auto measured = extract_phase_offset(frame);
                for (std::size_t col = 0; col < frame.subcarrier_indices.size(); ++col)
                {
                    const auto g = static_cast<std::size_t>(global_index(frame.channel_number, frame.subcarrier_indices[col]));
                    auto h1 = o.frame.gains(1, static_cast<Eigen::Index>(col));
                    if (measured.mask[col] && std::abs(wrap_to_pi(measured.values[col] - corrected.values[g])) > kPi / 2)
                        h1 = -h1;
                    if (params.chip_calibration)
                    {
                        if (!params.chip_calibration->mask[g])
                            throw CoverageError("chip calibration does not cover bin " + std::to_string(g));
                        h1 *= std::polar(1.0, -params.chip_calibration->values[g]);
                    }
                    o.frame.gains(1, static_cast<Eigen::Index>(col)) = h1;
                }
                aligned.push_back(std::move(o));
            }

        out.array_phase = corrected;
        if (params.chip_calibration)
            for (std::size_t g = 0; g < out.array_phase.values.size(); ++g)
                if (out.array_phase.mask[g])
                    out.array_phase.values[g] = wrap_to_pi(corrected.values[g] - params.chip_calibration->values[g]);

        const auto spectrum = stitch(aligned);
        out.music = music_spectrum(build_smoothed_matrix(spectrum, model), model, params.num_paths);
        try
        {
            out.phase_slope_theta_deg = phase_slope_aoa(out.array_phase, model);
        }
        catch (const Error &e)
        {
            out.phase_slope_error = e.what();
        }
        return out;
    }

    std::string pseudospectrum_csv(const AoaResult &r)
    {
        std::ostringstream os;
        os << "theta_deg,tau_ns,power\n";
        for (std::size_t i = 0; i < r.theta_grid_deg.size(); ++i)
            for (std::size_t j = 0; j < r.tau_grid_ns.size(); ++j)
                os << format_double(r.theta_grid_deg[i]) << ',' << format_double(r.tau_grid_ns[j]) << ','
                   << format_double(r.pseudospectrum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                   << '\n';
        return os.str();
    }

    std::string aoa_summary_line(const AoaResult &r)
    {
        return "peak_theta_deg=" + format_double(r.peak_theta_deg) + " peak_tau_ns=" + format_double(r.peak_tau_ns) +
               " eigengap=" + format_double(r.eigengap);
    }

} // namespace csikit
