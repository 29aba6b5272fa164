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

#include "irsuav/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace irsuav
{

inline constexpr double kSpeedOfLight = 3.0e8;

struct IrsSpec
{
    Vec3 location{200.0, 500.0, 30.0};
    int m_r = 64;
    int m_c = 64;
    double d_r = 0.01; // PRU spacing along rows [m]
    double d_c = 0.01;
    double amplitude_a = 0.9;
};

struct UserSpec
{
    Vec3 location;
    double alpha_ug = 2.5;
    double alpha_rg = 2.5;
    double kappa_ug = 10.0; // linear
    double kappa_rg = 10.0;
    double r_min = 0.5; // bit/s/Hz, per-subcarrier normalized
};

struct OfdmNumerology
{
    std::size_t n_f = 128;
    double delta_f = 1.0e5;
    double f_c = 3.0e9;
    double beta0 = 1.0e-5;
    double noise_psd = 1.0e-3 * std::pow(10.0, -169.0 / 10.0); // W/Hz
    double p_max = 1.0e-3 * std::pow(10.0, 35.0 / 10.0);       // W

    double sigma2() const { return noise_psd * delta_f; }
};

struct UavLimits
{
    Vec3 q_initial{0.0, 0.0, 100.0};
    Vec3 q_final{500.0, 500.0, 100.0};
    std::size_t n_slots = 60; // positions q[1..N], endpoints included
    double dt = 1.0;
    double v_max = 20.0;
    double z_min = 100.0;
    double z_max = 120.0;
    bool freeze_altitude = false;

    double step_limit() const { return dt * v_max; }
};

struct Scenario
{
    std::vector<UserSpec> users;
    IrsSpec irs;
    OfdmNumerology ofdm;
    UavLimits uav;

    std::size_t n_users() const { return users.size(); }

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Desk-scale default: three users, user 1 close to the IRS.
Scenario desk_scenario();

} // namespace irsuav
