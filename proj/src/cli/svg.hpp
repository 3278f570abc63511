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

#include <string>
#include <vector>

namespace csikit::cli::svg
{
    struct Series
    {
        std::string label;
        std::string color;
        std::vector<double> x;
        std::vector<double> y;
        bool markers = false;
    };

    struct Axes
    {
        std::string title;
        std::string x_label;
        std::string y_label;
    };

    // All output uses fixed canvas dimensions and fixed-precision numbers, so
    // identical data always renders to identical bytes.

    std::string line_plot(const Axes &axes, const std::vector<Series> &series);

    std::string bar_chart(const Axes &axes, const std::vector<double> &left_edges, const std::vector<double> &right_edges,
                          const std::vector<double> &heights);

    /// Heatmap of values[row][col] on the given row (y) and column (x)
    /// coordinates, in dB relative to the maximum, with the maximum marked.
    std::string heatmap(const Axes &axes, const std::vector<double> &x, const std::vector<double> &y,
                        const std::vector<std::vector<double>> &values);

} // namespace csikit::cli::svg
