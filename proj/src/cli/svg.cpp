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


#include "svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace csikit::cli::svg
{
    namespace
    {
        constexpr double kWidth = 720, kHeight = 440;
        constexpr double kLeft = 80, kRight = 24, kTop = 40, kBottom = 60;

        std::string fixed(double v, int precision = 2)
        {
            if (v == 0.0)
                v = 0.0; // drop negative zero
            std::array<char, 48> buf{};
            const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
            return {buf.data(), r.ptr};
        }

        std::string tick_label(double v)
        {
            if (std::abs(v) < 1e-12)
                v = 0.0;
            std::array<char, 48> buf{};
            const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
            return {buf.data(), r.ptr};
        }

        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                if (c == '<')
                    out += "&lt;";
                else if (c == '>')
                    out += "&gt;";
                else if (c == '&')
                    out += "&amp;";
                else
                    out.push_back(c);
            }
            return out;
        }

        struct Range
        {
            double lo = 0.0, hi = 1.0;
        };

        Range range_of(const std::vector<const std::vector<double> *> &data)
        {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto *v : data)
                for (double x : *v)
                    if (std::isfinite(x))
                    {
                        lo = std::min(lo, x);
                        hi = std::max(hi, x);
                    }
            if (!std::isfinite(lo))
                return {};
            if (hi - lo < 1e-12)
            {
                lo -= 0.5;
                hi += 0.5;
            }
            return {lo, hi};
        }

        double nice_step(double span)
        {
            const double raw = span / 6.0;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            for (double m : {1.0, 2.0, 5.0})
                if (m * mag >= raw)
                    return m * mag;
            return 10.0 * mag;
        }

        class Frame
        {
          public:
            Frame(Range x, Range y) : x_(x), y_(y) {}

            double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
            double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

            void header(std::ostringstream &os, const Axes &axes) const
            {
                os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                   << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0) << "\" height=\""
                   << fixed(kHeight, 0) << "\" viewBox=\"0 0 " << fixed(kWidth, 0) << ' ' << fixed(kHeight, 0)
                   << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
                   << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
                   << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
                   << escape(axes.title) << "</text>\n";
            }

            void axes(std::ostringstream &os, const Axes &axes) const
            {
                const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
                os << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y1) << "\" width=\"" << fixed(x1 - x0)
                   << "\" height=\"" << fixed(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
                ticks(os, x_, true);
                ticks(os, y_, false);
                os << "<text x=\"" << fixed((x0 + x1) / 2) << "\" y=\"" << fixed(kHeight - 18)
                   << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n"
                   << "<text x=\"18\" y=\"" << fixed((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
                   << fixed((y0 + y1) / 2) << ")\">" << escape(axes.y_label) << "</text>\n";
            }

          private:
            void ticks(std::ostringstream &os, Range r, bool horizontal) const
            {
                const double step = nice_step(r.hi - r.lo);
                for (double t = std::ceil(r.lo / step - 1e-9) * step; t <= r.hi + step * 1e-9; t += step)
                {
                    if (horizontal)
                    {
                        const double x = px(t), y = kHeight - kBottom;
                        os << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(x) << "\" y2=\""
                           << fixed(y + 5) << "\" stroke=\"black\"/>\n<text x=\"" << fixed(x) << "\" y=\"" << fixed(y + 18)
                           << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
                    }
                    else
                    {
                        const double y = py(t), x = kLeft;
                        os << "<line x1=\"" << fixed(x - 5) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(x)
                           << "\" y2=\"" << fixed(y) << "\" stroke=\"black\"/>\n<text x=\"" << fixed(x - 8) << "\" y=\""
                           << fixed(y + 4) << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
                    }
                }
            }

            Range x_, y_;
        };

        // Five-stop blue-green-yellow ramp.
        std::string ramp(double t)
        {
            static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                         {59, 82, 139},
                                                                         {33, 145, 140},
                                                                         {94, 201, 98},
                                                                         {253, 231, 37}}};
            t = std::clamp(t, 0.0, 1.0) * 4.0;
            const auto i = static_cast<std::size_t>(std::min(std::floor(t), 3.0));
            const double f = t - static_cast<double>(i);
            std::ostringstream os;
            os << "rgb(";
            for (int c = 0; c < 3; ++c)
            {
                const double v = stops[i][c] + (stops[i + 1][c] - stops[i][c]) * f;
                os << (c ? "," : "") << static_cast<int>(std::lround(v));
            }
            os << ')';
            return os.str();
        }
    } // namespace

    std::string line_plot(const Axes &axes, const std::vector<Series> &series)
    {
        std::vector<const std::vector<double> *> xs, ys;
        for (const auto &s : series)
        {
            xs.push_back(&s.x);
            ys.push_back(&s.y);
        }
        const Frame frame(range_of(xs), range_of(ys));
        std::ostringstream os;
        frame.header(os, axes);
        frame.axes(os, axes);
        double legend_y = kTop + 16;
        for (const auto &s : series)
        {
            // break the polyline at missing values
            std::vector<std::string> runs(1);
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                {
                    if (!runs.back().empty())
                        runs.emplace_back();
                    continue;
                }
                runs.back() += (runs.back().empty() ? "" : " ") + fixed(frame.px(s.x[i])) + ',' + fixed(frame.py(s.y[i]));
                if (s.markers)
                    os << "<circle cx=\"" << fixed(frame.px(s.x[i])) << "\" cy=\"" << fixed(frame.py(s.y[i]))
                       << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
            if (!s.markers)
                for (const auto &r : runs)
                    if (!r.empty())
                        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << r
                           << "\"/>\n";
            if (!s.label.empty())
            {
                os << "<rect x=\"" << fixed(kWidth - kRight - 150) << "\" y=\"" << fixed(legend_y - 9)
                   << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n<text x=\""
                   << fixed(kWidth - kRight - 132) << "\" y=\"" << fixed(legend_y + 1) << "\">" << escape(s.label)
                   << "</text>\n";
                legend_y += 18;
            }
        }
        os << "</svg>\n";
        return os.str();
    }

    std::string bar_chart(const Axes &axes, const std::vector<double> &left, const std::vector<double> &right,
                          const std::vector<double> &heights)
    {
        std::vector<double> ys = heights;
        ys.push_back(0.0);
        const Frame frame(range_of({&left, &right}), range_of({&ys}));
        std::ostringstream os;
        frame.header(os, axes);
        for (std::size_t i = 0; i < heights.size(); ++i)
        {
            const double x0 = frame.px(left[i]), x1 = frame.px(right[i]);
            const double y0 = frame.py(0.0), y1 = frame.py(heights[i]);
            os << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(std::min(y0, y1)) << "\" width=\""
               << fixed(std::max(x1 - x0, 0.0)) << "\" height=\"" << fixed(std::abs(y0 - y1))
               << "\" fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
        }
        frame.axes(os, axes);
        os << "</svg>\n";
        return os.str();
    }

    std::string heatmap(const Axes &axes, const std::vector<double> &x, const std::vector<double> &y,
                        const std::vector<std::vector<double>> &values)
    {
        const auto half_step = [](const std::vector<double> &v)
        { return v.size() > 1 ? (v[1] - v[0]) / 2.0 : 0.5; };
        const double hx = half_step(x), hy = half_step(y);
        std::vector<double> xr{x.front() - hx, x.back() + hx}, yr{y.front() - hy, y.back() + hy};
        const Frame frame(range_of({&xr}), range_of({&yr}));

        double peak = 0.0;
        std::size_t pr = 0, pc = 0;
        for (std::size_t r = 0; r < values.size(); ++r)
            for (std::size_t c = 0; c < values[r].size(); ++c)
                if (values[r][c] > peak)
                {
                    peak = values[r][c];
                    pr = r;
                    pc = c;
                }

        constexpr double floor_db = -40.0;
        std::ostringstream os;
        frame.header(os, axes);
        for (std::size_t r = 0; r < values.size(); ++r)
            for (std::size_t c = 0; c < values[r].size(); ++c)
            {
                const double v = values[r][c];
                const double db = v > 0.0 && peak > 0.0 ? 10.0 * std::log10(v / peak) : floor_db;
                const double x0 = frame.px(x[c] - hx), x1 = frame.px(x[c] + hx);
                const double y0 = frame.py(y[r] + hy), y1 = frame.py(y[r] - hy);
                os << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y0) << "\" width=\"" << fixed(x1 - x0)
                   << "\" height=\"" << fixed(y1 - y0) << "\" fill=\"" << ramp(1.0 - db / floor_db) << "\"/>\n";
            }
        frame.axes(os, axes);
        if (!values.empty())
            os << "<circle cx=\"" << fixed(frame.px(x[pc])) << "\" cy=\"" << fixed(frame.py(y[pr]))
               << "\" r=\"6\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n<text x=\""
               << fixed(frame.px(x[pc]) + 9) << "\" y=\"" << fixed(frame.py(y[pr]) - 9) << "\" fill=\"red\">peak "
               << tick_label(x[pc]) << ", " << tick_label(y[pr]) << "</text>\n";
        os << "</svg>\n";
        return os.str();
    }

} // namespace csikit::cli::svg
