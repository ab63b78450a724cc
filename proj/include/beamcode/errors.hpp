// SPDX-License-Identifier: Apache-2.0
//
// beamcode: beam-coded in-packet beamforming training for mmWave phased arrays
// Copyright (C) 2026 The beamcode authors
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

#ifndef BEAMCODE_ERRORS_HPP
#define BEAMCODE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beamcode
{

// Sizes of two operands disagree (weight length vs. array size, code length vs. field count).
class dimension_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Radiation pattern is identically zero, so no lobe structure exists.
class undefined_pattern_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// A request needs more mutually orthogonal beams than the array geometry provides.
class capacity_error : public std::invalid_argument
{
public:
    capacity_error(const std::string &what, std::size_t achievable)
        : std::invalid_argument(what), achievable_(achievable) {}

    std::size_t achievable() const noexcept { return achievable_; }

private:
    std::size_t achievable_;
};

// Malformed experiment configuration (maps to CLI exit status 2).
class config_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace beamcode

#endif
