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

#include <span>
#include <vector>

namespace csikit
{
    // Outlier gate: |x - median| > 3 * 1.4826 * MAD over the measured samples.
    inline constexpr double kMadScale = 1.4826;
    inline constexpr double kOutlierThreshold = 3.0;

    struct OutlierFill
    {
        std::vector<double> values;
        std::vector<bool> outlier;
        /// Fewer than two inliers were left; values were returned unchanged.
        bool degenerate = false;

        std::size_t outlier_count() const;
    };

    /// Detects outliers by the scaled-MAD gate and replaces each with a linear
    /// interpolation between its nearest inlier neighbours by index. Leading
    /// and trailing outliers are extrapolated from the two nearest inliers.
    /// Unmeasured samples (mask false) are passed through and never take part.
    ///
    /// An empty mask means every sample is measured. Throws
    /// InsufficientDataError with fewer than three measured samples.
    OutlierFill fill_outliers_linear(std::span<const double> values, const std::vector<bool> &mask = {});

} // namespace csikit
