// SPDX-License-Identifier: Apache-2.0
//
// irsuav: planning toolkit for IRS-assisted UAV OFDMA downlinks
// Copyright (C) 2026 The irsuav authors
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

namespace irsuav
{

// UAV or user sits exactly over the IRS horizontally; azimuth is undefined.
class DegenerateGeometry : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidAlpha : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class InconsistentAllocation : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

class ZeroDual : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Minimum-rate constraints cannot be met.
class Infeasible : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SubproblemInfeasible : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string &field, const std::string &what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace irsuav
