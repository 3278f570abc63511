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

#include <stdexcept>
#include <string>

namespace csikit
{
    /// Base class of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InvalidChannelError : public Error
    {
    public:
        using Error::Error;
    };

    class ParseError : public Error
    {
    public:
        ParseError(const std::string &what, std::size_t line)
            : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

        /// Prefixes an existing parse error with the file it came from.
        ParseError(const std::string &file, const ParseError &inner)
            : Error(file + ": " + inner.what()), line_(inner.line_) {}

        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class InvalidArgumentError : public Error
    {
    public:
        using Error::Error;
    };

    class InvalidSceneError : public Error
    {
    public:
        using Error::Error;
    };

    class CoverageError : public Error
    {
    public:
        using Error::Error;
    };

    class DuplicateObservationError : public Error
    {
    public:
        using Error::Error;
    };

    class InsufficientDataError : public Error
    {
    public:
        using Error::Error;
    };

    class DegenerateSubspaceError : public Error
    {
    public:
        using Error::Error;
    };

    class OutOfRangeError : public Error
    {
    public:
        OutOfRangeError(const std::string &what, double raw)
            : Error(what), raw_(raw) {}

        /// Offending raw value (e.g. the arcsine argument).
        double raw() const noexcept { return raw_; }

    private:
        double raw_;
    };

} // namespace csikit
