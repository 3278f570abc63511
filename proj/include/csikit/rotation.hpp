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

#include <optional>
#include <vector>

namespace csikit
{
    /// Sets of multiples of pi by which a measured inter-chain phase may sit
    /// away from the true offset, selected by the sign of the true offset.
    struct RotationModel
    {
        std::vector<int> nonnegative{-2, -1, 0, 1};
        std::vector<int> negative{-1, 0, 1, 2};

        const std::vector<int> &set_for(double true_offset) const
        {
            return true_offset >= 0.0 ? nonnegative : negative;
        }

        /// The set without the identity rotation.
        std::vector<int> nonzero_set_for(double true_offset) const;
    };

    inline constexpr double kDefaultRotationTolerance = 0.05;

    /// The rotation n with measured = reference + n*pi (mod 2pi), or nullopt
    /// when no candidate leaves a residual below `tolerance`.
    ///
    /// n and n +/- 2 produce identical wrapped phases, so ties resolve to the
    /// smallest |n|, then to the n that keeps reference + n*pi inside
    /// (-pi, pi] (-1 for a non-negative reference, +1 otherwise).
    std::optional<int> classify_rotation(double measured, double reference,
                                         double tolerance = kDefaultRotationTolerance,
                                         const RotationModel &model = {});

} // namespace csikit
