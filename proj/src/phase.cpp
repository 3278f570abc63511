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


#include "csikit/phase.hpp"

#include "csikit/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace csikit
{
    double wrap_to_pi(double x)
    {
        if (!std::isfinite(x))
            throw InvalidArgumentError("wrap_to_pi: non-finite input");
        double r = std::remainder(x, kTwoPi);
        if (r <= -kPi)
            r += kTwoPi;
        else if (r > kPi)
            r -= kTwoPi;
        return r;
    }

    double circular_distance(double a, double b)
    {
        return std::abs(wrap_to_pi(a - b));
    }

    std::optional<double> circular_mean(std::span<const double> angles, double min_resultant)
    {
        if (angles.empty())
            return std::nullopt;
        std::complex<double> sum{0.0, 0.0};
        for (double a : angles)
            sum += std::polar(1.0, a);
        if (std::abs(sum) < min_resultant * static_cast<double>(angles.size()))
            return std::nullopt;
        return wrap_to_pi(std::arg(sum));
    }

    double median_inplace(std::span<double> v)
    {
        if (v.empty())
            throw InvalidArgumentError("median of empty sample");
        const std::size_t n = v.size();
        const std::size_t mid = n / 2;
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
        const double upper = v[mid];
        if (n % 2 == 1)
            return upper;
        const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        return lower + (upper - lower) / 2.0;
    }

    double median(std::vector<double> values)
    {
        return median_inplace(values);
    }

    std::vector<double> unwrap_around(std::span<const double> angles, double reference)
    {
        std::vector<double> out;
        out.reserve(angles.size());
        for (double a : angles)
            out.push_back(reference + wrap_to_pi(a - reference));
        return out;
    }

    double circular_median(std::span<const double> angles)
    {
        if (angles.empty())
            throw InvalidArgumentError("circular median of empty sample");

        double anchor = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (double candidate : angles)
        {
            double cost = 0.0;
            for (double other : angles)
                cost += circular_distance(candidate, other);
            const double c = wrap_to_pi(candidate);
            if (cost < best || (cost == best && c < anchor))
            {
                best = cost;
                anchor = c;
            }
        }
        auto unwrapped = unwrap_around(angles, anchor);
        return wrap_to_pi(median_inplace(unwrapped));
    }

} // namespace csikit
