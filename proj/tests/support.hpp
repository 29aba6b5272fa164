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

#include "irsuav/scenario.hpp"

#include <random>

namespace irsuav::testing
{

// Desk-style layout with users, IRS and endpoints drawn inside a 500 m square.
inline Scenario random_scenario(std::mt19937_64 &rng, std::size_t n_users = 3, int m = 16, std::size_t n_f = 32,
                                std::size_t n_slots = 12)
{
    std::uniform_real_distribution<double> xy(20.0, 480.0);
    std::uniform_real_distribution<double> kdb(2.0, 14.0);
    std::uniform_real_distribution<double> alpha(2.0, 3.0);
    Scenario sc = desk_scenario();
    sc.users.clear();
    for (std::size_t k = 0; k < n_users; ++k)
    {
        UserSpec u;
        u.location = {xy(rng), xy(rng), 0.0};
        u.alpha_ug = alpha(rng);
        u.alpha_rg = alpha(rng);
        u.kappa_ug = std::pow(10.0, kdb(rng) / 10.0);
        u.kappa_rg = std::pow(10.0, kdb(rng) / 10.0);
        u.r_min = 0.2;
        sc.users.push_back(u);
    }
    sc.irs.location = {xy(rng), xy(rng), 30.0};
    sc.irs.m_r = m;
    sc.irs.m_c = m;
    sc.ofdm.n_f = n_f;
    sc.uav.n_slots = n_slots;
    sc.uav.q_initial = {xy(rng), xy(rng), 100.0};
    sc.uav.q_final = {xy(rng), xy(rng), 100.0};
    const double span = (sc.uav.q_final - sc.uav.q_initial).norm();
    sc.uav.v_max = std::max(20.0, 1.5 * span / double(n_slots - 1));
    return sc;
}

inline Vec3 random_uav(std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> xy(0.0, 500.0);
    std::uniform_real_distribution<double> z(100.0, 120.0);
    return {xy(rng), xy(rng), z(rng)};
}

} // namespace irsuav::testing
