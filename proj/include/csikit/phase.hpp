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

#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace csikit
{
    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    /// Wraps to (-pi, pi]. Throws InvalidArgumentError for non-finite input.
    double wrap_to_pi(double radians);

    /// |wrap(a - b)|
    double circular_distance(double a, double b);

    /// Angle of the resultant of unit phasors; nullopt when the resultant
    /// length is below `min_resultant` (per sample) or the input is empty.
    std::optional<double> circular_mean(std::span<const double> angles, double min_resultant = 1e-9);

    /// Linear median; midpoint of the two central values for even counts.
    /// `values` is reordered.
    double median_inplace(std::span<double> values);

    double median(std::vector<double> values);

    /// Circular median of phase samples, wrapped to (-pi, pi].
    ///
    /// The sample minimising the summed circular distance to all others is the
    /// anchor (ties go to the smallest value, so the result does not depend on
    /// sample order). Samples are unwrapped into anchor + (-pi, pi], the linear
    /// median is taken and the result is wrapped back.
    double circular_median(std::span<const double> angles);

    /// Maps every value into reference + (-pi, pi].
    std::vector<double> unwrap_around(std::span<const double> angles, double reference);

} // namespace csikit
