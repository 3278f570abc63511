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


#include "csikit/rotation.hpp"

#include "csikit/phase.hpp"

#include <cmath>
#include <cstdlib>

namespace csikit
{
    std::vector<int> RotationModel::nonzero_set_for(double true_offset) const
    {
        std::vector<int> out;
        for (int n : set_for(true_offset))
            if (n != 0)
                out.push_back(n);
        return out;
    }

    std::optional<int> classify_rotation(double measured, double reference, double tolerance,
                                         const RotationModel &model)
    {
        constexpr double tie = 1e-12;
        const auto &candidates = model.set_for(reference);
        if (candidates.empty())
            return std::nullopt;

        const auto residual = [&](int n)
        { return std::abs(wrap_to_pi(measured - reference - n * kPi)); };
        const auto in_range = [&](int n)
        {
            const double shifted = reference + n * kPi;
            return shifted > -kPi && shifted <= kPi;
        };
        const auto preferred = [&](int a, int b)
        {
            if (std::abs(a) != std::abs(b))
                return std::abs(a) < std::abs(b);
            if (in_range(a) != in_range(b))
                return in_range(a);
            return a < b;
        };

        double smallest = residual(candidates.front());
        for (int n : candidates)
            smallest = std::min(smallest, residual(n));
        if (smallest >= tolerance)
            return std::nullopt;

        std::optional<int> best;
        for (int n : candidates)
            if (residual(n) <= smallest + tie && (!best || preferred(n, *best)))
                best = n;
        return best;
    }

} // namespace csikit
