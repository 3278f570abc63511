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


#include "csikit/capture_io.hpp"

#include "csikit/error.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace csikit
{
    namespace
    {
        constexpr std::string_view kMagic = "CSIKIT";
        constexpr std::string_view kVersion = "v1";

        std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            std::size_t start = 0;
            while (true)
            {
                const std::size_t pos = s.find(sep, start);
                out.push_back(s.substr(start, pos - start));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        std::vector<std::string_view> split_ws(std::string_view s)
        {
            std::vector<std::string_view> out;
            std::size_t i = 0;
            while (i < s.size())
            {
                while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
                    ++i;
                std::size_t j = i;
                while (j < s.size() && s[j] != ' ' && s[j] != '\t')
                    ++j;
                if (j > i)
                    out.push_back(s.substr(i, j - i));
                i = j;
            }
            return out;
        }

        // Splits "key=value"; throws when the key differs.
        std::string_view expect_key(std::string_view token, std::string_view key, std::size_t line)
        {
            if (token.size() <= key.size() || token.substr(0, key.size()) != key ||
                token[key.size()] != '=')
                throw ParseError("expected field '" + std::string(key) + "=', got '" +
                                     std::string(token) + "'",
                                 line);
            return token.substr(key.size() + 1);
        }

        template <class T>
        T parse_number(std::string_view s, std::string_view what, std::size_t line)
        {
            T value{};
            const auto *end = s.data() + s.size();
            const auto res = std::from_chars(s.data(), end, value);
            if (res.ec != std::errc() || res.ptr != end)
                throw ParseError("malformed " + std::string(what) + " '" + std::string(s) + "'", line);
            return value;
        }

        std::string escape_label(const std::string &label)
        {
            static constexpr char hex[] = "0123456789ABCDEF";
            std::string out;
            for (unsigned char c : label)
            {
                const bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                                   (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-' ||
                                   c == '/' || c == ':';
                if (plain)
                    out.push_back(static_cast<char>(c));
                else
                {
                    out.push_back('%');
                    out.push_back(hex[c >> 4]);
                    out.push_back(hex[c & 15]);
                }
            }
            return out;
        }

        std::string unescape_label(std::string_view s, std::size_t line)
        {
            std::string out;
            for (std::size_t i = 0; i < s.size(); ++i)
            {
                if (s[i] != '%')
                {
                    out.push_back(s[i]);
                    continue;
                }
                if (i + 2 >= s.size())
                    throw ParseError("truncated label escape", line);
                unsigned value = 0;
                const auto res = std::from_chars(s.data() + i + 1, s.data() + i + 3, value, 16);
                if (res.ec != std::errc() || res.ptr != s.data() + i + 3)
                    throw ParseError("bad label escape", line);
                out.push_back(static_cast<char>(value));
                i += 2;
            }
            return out;
        }

        struct Header
        {
            int antennas = 0;
            Band band = Band::band24;
            SwapState swap = SwapState::over_air;
            std::string label;
        };

        Header parse_header(std::string_view line_text)
        {
            const auto tokens = split_ws(line_text);
            if (tokens.size() < 4 || tokens[0] != kMagic)
                throw ParseError("malformed header: expected 'CSIKIT v1 antennas=<M> band=<24|5>'", 1);
            if (tokens[1] != kVersion)
                throw ParseError("unsupported format version '" + std::string(tokens[1]) + "'", 1);

            Header h;
            h.antennas = parse_number<int>(expect_key(tokens[2], "antennas", 1), "antenna count", 1);
            if (h.antennas < 1 || h.antennas > kMaxAntennas)
                throw ParseError("malformed header: antenna count outside 1..8", 1);
            const auto band = expect_key(tokens[3], "band", 1);
            if (band == "24")
                h.band = Band::band24;
            else if (band == "5")
                h.band = Band::band5;
            else
                throw ParseError("malformed header: band must be 24 or 5", 1);

            for (std::size_t i = 4; i < tokens.size(); ++i)
            {
                const auto tok = tokens[i];
                if (tok.starts_with("swap="))
                {
                    try
                    {
                        h.swap = parse_swap_state(std::string(tok.substr(5)));
                    }
                    catch (const InvalidArgumentError &e)
                    {
                        throw ParseError(std::string("malformed header: ") + e.what(), 1);
                    }
                }
                else if (tok.starts_with("label="))
                    h.label = unescape_label(tok.substr(6), 1);
                else
                    throw ParseError("malformed header: unknown field '" + std::string(tok) + "'", 1);
            }
            return h;
        }

        CsiFrame parse_record(std::string_view text, const Header &h, std::size_t line)
        {
            const auto tokens = split_ws(text);
            if (tokens.size() != 4)
                throw ParseError("record must have fields ch, ts, rssi, H", line);

            const int ch = parse_number<int>(expect_key(tokens[0], "ch", line), "channel", line);
            if (!is_valid_channel(h.band, ch))
                throw ParseError("invalid channel " + std::to_string(ch) + " for band " +
                                     band_name(h.band),
                                 line);
            const auto ts = parse_number<std::int64_t>(expect_key(tokens[1], "ts", line), "timestamp", line);

            std::optional<double> rssi;
            const auto rssi_text = expect_key(tokens[2], "rssi", line);
            if (rssi_text != "NA")
            {
                rssi = parse_number<double>(rssi_text, "rssi", line);
                if (!std::isfinite(*rssi))
                    throw ParseError("non-finite rssi", line);
            }

            const auto pairs = split(expect_key(tokens[3], "H", line), ';');
            const std::size_t expected = static_cast<std::size_t>(h.antennas) * kHt20Subcarriers;
            if (pairs.size() != expected)
                throw ParseError("subcarrier count: expected " + std::to_string(expected) +
                                     " complex values (" + std::to_string(h.antennas) + " x 56), got " +
                                     std::to_string(pairs.size()),
                                 line);

            Eigen::MatrixXcd gains(h.antennas, kHt20Subcarriers);
            for (std::size_t i = 0; i < pairs.size(); ++i)
            {
                const auto parts = split(pairs[i], ',');
                if (parts.size() != 2)
                    throw ParseError("malformed complex value '" + std::string(pairs[i]) + "'", line);
                const double re = parse_number<double>(parts[0], "real part", line);
                const double im = parse_number<double>(parts[1], "imaginary part", line);
                if (!std::isfinite(re) || !std::isfinite(im))
                    throw ParseError("non-finite complex value at index " + std::to_string(i), line);
                gains(static_cast<Eigen::Index>(i / kHt20Subcarriers),
                      static_cast<Eigen::Index>(i % kHt20Subcarriers)) = {re, im};
            }
            return make_frame(h.band, ch, ts, std::move(gains), rssi);
        }

        std::string slurp_gz(const std::filesystem::path &path)
        {
            // gzread passes uncompressed files through unchanged
            std::unique_ptr<gzFile_s, int (*)(gzFile)> file(gzopen(path.c_str(), "rb"), gzclose);
            if (!file)
                throw Error("cannot open " + path.string());
            std::string out;
            std::array<char, 1 << 16> buf{};
            while (true)
            {
                const int n = gzread(file.get(), buf.data(), static_cast<unsigned>(buf.size()));
                if (n < 0)
                    throw Error("read error in " + path.string());
                if (n == 0)
                    break;
                out.append(buf.data(), static_cast<std::size_t>(n));
            }
            return out;
        }
    } // namespace

    std::string format_double(double value)
    {
        std::array<char, 32> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
        return {buf.data(), res.ptr};
    }

    CaptureSet parse_capture(std::string_view text)
    {
        CaptureSet set;
        std::size_t line_no = 0;
        std::optional<Header> header;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos)
                end = text.size();
            auto line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);

            if (!header)
            {
                if (line.empty() && pos > text.size())
                    break;
                header = parse_header(line);
                set.swap_state = header->swap;
                set.label = header->label;
                continue;
            }
            if (line.find_first_not_of(" \t") == std::string_view::npos)
                continue;
            set.frames.push_back(parse_record(line, *header, line_no));
        }
        if (!header)
            throw ParseError("malformed header: empty input", 1);
        return set;
    }

    std::string serialize_capture(const CaptureSet &set, int antennas, Band band)
    {
        if (!set.frames.empty())
        {
            antennas = set.frames.front().num_rx_antennas;
            band = set.frames.front().band;
        }
        std::ostringstream os;
        os << kMagic << ' ' << kVersion << " antennas=" << antennas << " band=" << band_name(band);
        if (set.swap_state != SwapState::over_air)
            os << " swap=" << swap_state_name(set.swap_state);
        if (!set.label.empty())
            os << " label=" << escape_label(set.label);
        os << '\n';

        for (const auto &f : set.frames)
        {
            if (f.num_rx_antennas != antennas || f.band != band)
                throw InvalidArgumentError("capture frames must share antenna count and band");
            if (!validate_frame(f).empty())
                throw InvalidArgumentError("refusing to serialize an invalid frame: " + validate_frame(f).front());
            os << "ch=" << f.channel_number << " ts=" << f.timestamp_us << " rssi="
               << (f.rssi_dbm ? format_double(*f.rssi_dbm) : std::string("NA")) << " H=";
            for (Eigen::Index a = 0; a < f.gains.rows(); ++a)
                for (Eigen::Index k = 0; k < f.gains.cols(); ++k)
                {
                    if (a != 0 || k != 0)
                        os << ';';
                    os << format_double(f.gains(a, k).real()) << ',' << format_double(f.gains(a, k).imag());
                }
            os << '\n';
        }
        return os.str();
    }

    CaptureSet read_capture_file(const std::filesystem::path &path)
    {
        const std::string text = slurp_gz(path);
        try
        {
            return parse_capture(text);
        }
        catch (const ParseError &e)
        {
            throw ParseError(path.string(), e);
        }
    }

    void write_capture_file(const std::filesystem::path &path, const CaptureSet &set)
    {
        const std::string text = serialize_capture(set);
        if (path.extension() == ".gz")
        {
            std::unique_ptr<gzFile_s, int (*)(gzFile)> file(gzopen(path.c_str(), "wb9"), gzclose);
            if (!file)
                throw Error("cannot write " + path.string());
            if (gzwrite(file.get(), text.data(), static_cast<unsigned>(text.size())) !=
                static_cast<int>(text.size()))
                throw Error("write error in " + path.string());
            return;
        }
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw Error("cannot write " + path.string());
        os << text;
        if (!os)
            throw Error("write error in " + path.string());
    }

} // namespace csikit
