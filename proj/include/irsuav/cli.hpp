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

#include <ostream>
#include <string>
#include <vector>

namespace irsuav
{

enum ExitCode
{
    kExitOk = 0,
    kExitConfig = 1,
    kExitInfeasible = 2
};

// args excludes the program name. Result files go to --out; diagnostics go to err.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace irsuav
