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
#include "csikit/offset_pipeline.hpp"
#include "csikit/stitch.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csikit
{
    /// Uniform linear array model and search grids for MUSIC.
    struct SteeringModel
    {
        double antenna_spacing_m = 0.09;
        double speed_of_light = 2.998e8;
        std::vector<double> theta_grid_deg = grid_range(-45.0, 45.0, 0.5);
        std::vector<double> tau_grid_ns = grid_range(0.0, 100.0, 1.0);
        int smoothing_window = 16;

        /// first, first + step, ... up to and including last (to 1e-9 of a step).
        static std::vector<double> grid_range(double first, double last, double step);

        /// Throws InvalidArgumentError.
        void validate() const;
    };

    /// -2 pi d sin(theta) f / c
    double steering_phase(double theta_deg, double frequency_hz, const SteeringModel &model);

    /// Spatially smoothed data matrix: one column of height M*L per packet and
    /// per length-L run of contiguous subcarriers within one 20 MHz capture.
    struct SmoothedMatrix
    {
        Eigen::MatrixXcd columns;
        int antennas = 2;
        int window = 16;
        /// Mean center frequency of the windows, Hz.
        double mean_frequency_hz = 0.0;
    };

    SmoothedMatrix build_smoothed_matrix(std::span<const CsiFrame> frames, const SteeringModel &model);
    SmoothedMatrix build_smoothed_matrix(const GainSpectrum &spectrum, const SteeringModel &model);

    struct AoaResult
    {
        std::vector<double> theta_grid_deg;
        std::vector<double> tau_grid_ns;
        /// rows follow theta, columns follow tau
        Eigen::MatrixXd pseudospectrum;
        double peak_theta_deg = 0.0;
        double peak_tau_ns = 0.0;
        /// Covariance eigenvalues, descending.
        std::vector<double> eigenvalue_profile;
        int num_paths = 1;
        /// lambda_K / lambda_(K+1) for the K signal eigenvalues used.
        double eigengap = 0.0;
    };

    /// Model order by the largest ratio between consecutive eigenvalues.
    int eigengap_model_order(std::span<const double> descending_eigenvalues);

    /// MUSIC pseudospectrum over the theta x tau grid. The spatial phase of
    /// every steering vector is evaluated at the matrix's mean frequency.
    /// num_paths = 0 selects the order via eigengap_model_order.
    AoaResult music_spectrum(const SmoothedMatrix &smoothed, const SteeringModel &model, int num_paths = 1);

    struct SpectrumPeak
    {
        double theta_deg = 0.0;
        double tau_ns = 0.0;
        double power = 0.0;
    };

    /// Strict local maxima (8-neighbourhood) in descending power.
    std::vector<SpectrumPeak> local_maxima(const AoaResult &result, std::size_t max_count);

    /// Angle whose steering phase at the mean bin frequency equals the
    /// circular mean of the measured bins. Needs at least 10 measured bins;
    /// throws OutOfRangeError when |arcsin argument| > 1.
    double phase_slope_aoa(const PhaseOffsetVector &corrected, const SteeringModel &model);

    struct AoaPipelineParams
    {
        /// Chain offset measured separately; subtracted from the corrected
        /// offsets before estimation. Composite grid.
        std::optional<PhaseOffsetVector> chip_calibration;
        int num_paths = 1;
    };

    struct EndToEndResult
    {
        AoaResult music;
        std::optional<double> phase_slope_theta_deg;
        std::string phase_slope_error;
        CorrectionReport correction;
        /// Corrected offsets with the chip calibration removed.
        PhaseOffsetVector array_phase;
    };

    /// Extract offsets, correct them, undo the pi rotation of every bin of
    /// every frame against the corrected offsets and subtract the chip
    /// calibration from antenna 1, stitch, smooth and run MUSIC. The phase
    /// slope estimate is returned as a cross-check.
    EndToEndResult estimate_aoa_endtoend(std::span<const CaptureSet> captures, const SteeringModel &model,
                                         const AoaPipelineParams &params);

    /// CSV with columns theta_deg,tau_ns,power.
    std::string pseudospectrum_csv(const AoaResult &result);

    /// "peak_theta_deg=<v> peak_tau_ns=<v> eigengap=<v>"
    std::string aoa_summary_line(const AoaResult &result);

} // namespace csikit
