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

#include <filesystem>
#include <string>
#include <string_view>

namespace csikit
{
    // Text capture format, one record per line after the header:
    //
    //   CSIKIT v1 antennas=<M> band=<24|5> [swap=<state>] [label=<escaped>]
    //   ch=<n> ts=<us> rssi=<dbm|NA> H=<r,i;r,i;...>
    //
    // H carries M*56 pairs, antenna-major, subcarriers ascending. Doubles are
    // written in shortest round-trip form.

    CaptureSet parse_capture(std::string_view text);

    /// Serializes a capture set. Empty sets need the antenna count and band
    /// that would otherwise come from the frames.
    std::string serialize_capture(const CaptureSet &set, int antennas = 2, Band band = Band::band24);

    /// Reads a capture file, plain or gzip-compressed. Parse errors carry the
    /// file name.
    CaptureSet read_capture_file(const std::filesystem::path &path);

    /// Writes a capture file; a `.gz` extension selects gzip output.
    void write_capture_file(const std::filesystem::path &path, const CaptureSet &set);

    /// Shortest round-trip decimal representation.
    std::string format_double(double value);

} // namespace csikit
