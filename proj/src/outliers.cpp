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


#include "csikit/outliers.hpp"

#include "csikit/error.hpp"
#include "csikit/phase.hpp"

#include <algorithm>
#include <cmath>

namespace csikit
{
    std::size_t OutlierFill::outlier_count() const
    {
        return static_cast<std::size_t>(std::count(outlier.begin(), outlier.end(), true));
    }

    OutlierFill fill_outliers_linear(std::span<const double> v, const std::vector<bool> &mask)
    {
        const std::size_t n = v.size();
        if (!mask.empty() && mask.size() != n)
            throw InvalidArgumentError("fill_outliers_linear: mask length differs from data");
        const auto measured = [&](std::size_t i)
        { return mask.empty() || mask[i]; };

        std::vector<std::size_t> idx;
        std::vector<double> sample;
        for (std::size_t i = 0; i < n; ++i)
            if (measured(i))
            {
                idx.push_back(i);
                sample.push_back(v[i]);
            }
        if (idx.size() < 3)
            throw InsufficientDataError("fill_outliers_linear needs at least 3 measured samples");

        const double center = median(sample);
        std::vector<double> deviation(sample.size());
        std::transform(sample.begin(), sample.end(), deviation.begin(),
                       [center](double x)
                       { return std::abs(x - center); });
        const double gate = kOutlierThreshold * kMadScale * median(deviation);

        OutlierFill out{std::vector<double>(v.begin(), v.end()), std::vector<bool>(n, false), false};
        std::vector<std::size_t> inliers;
        for (std::size_t j = 0; j < idx.size(); ++j)
        {
            if (std::abs(sample[j] - center) > gate)
                out.outlier[idx[j]] = true;
            else
                inliers.push_back(idx[j]);
        }
        if (inliers.size() < 2)
        {
            out.degenerate = true;
            return out;
        }
        if (inliers.size() == idx.size())
            return out;

        const auto line = [&](std::size_t a, std::size_t b, std::size_t at)
        {
            const double xa = static_cast<double>(a), xb = static_cast<double>(b);
            return v[a] + (v[b] - v[a]) * (static_cast<double>(at) - xa) / (xb - xa);
        };

        // inliers is sorted; upper_bound finds the right-hand neighbour
        for (std::size_t i : idx)
        {
            if (!out.outlier[i])
                continue;
            const auto right = std::upper_bound(inliers.begin(), inliers.end(), i);
            if (right == inliers.begin())
                out.values[i] = line(right[0], right[1], i);
            else if (right == inliers.end())
                out.values[i] = line(right[-2], right[-1], i);
            else
                out.values[i] = line(right[-1], right[0], i);
        }
        return out;
    }

} // namespace csikit
