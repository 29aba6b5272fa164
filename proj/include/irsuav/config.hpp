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

#include "irsuav/planner.hpp"
#include "irsuav/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace irsuav
{

struct UserEntry
{
    Vec3 location;
    double r_min = 0.5;
    double alpha_ug = 2.5;
    double alpha_rg = 2.5;
    double rician_ug_db = 10.0;
    double rician_rg_db = 10.0;

    bool operator==(const UserEntry &) const = default;
};

// File-level configuration, in the units written by humans (dB, dBm).
struct ScenarioFile
{
    std::vector<UserEntry> users;

    Vec3 irs_location{200.0, 500.0, 30.0};
    int m_r = 64;
    int m_c = 64;
    std::optional<double> spacing_r; // default c / (10 f_c)
    std::optional<double> spacing_c;
    double amplitude = 0.9;

    std::size_t n_f = 128;
    double delta_f_hz = 1.0e5;
    double f_c_hz = 3.0e9;
    double beta0_db = -50.0;
    double noise_psd_dbm_hz = -169.0;
    double p_max_dbm = 35.0;

    Vec3 q_initial{0.0, 0.0, 100.0};
    Vec3 q_final{500.0, 500.0, 100.0};
    std::size_t n_slots = 60;
    double dt_s = 1.0;
    double v_max = 20.0;
    double z_min = 100.0;
    double z_max = 120.0;
    bool freeze_altitude = false;

    double alpha = 0.14;
    double epsilon = 1e-3;
    int iter_max = 20;
    int ra_max_outer = 200;
    bool tdma = false;

    std::uint64_t seed = 1;
    double eta = 0.8;
    std::size_t mc_runs = 200;
    std::vector<double> alpha_grid;
    std::vector<double> kappa_sweep_db;
    double placement_step = 50.0;
    int irs_user = 1; // 1-based, for channel-probe

    bool operator==(const ScenarioFile &) const = default;
};

ScenarioFile default_scenario_file();

// Throws ConfigError naming the field (with line/column where known).
ScenarioFile parse_scenario_text(const std::string &text);
ScenarioFile load_scenario_file(const std::string &path);
std::string serialize_scenario(const ScenarioFile &f);

Scenario to_scenario(const ScenarioFile &f);
PlannerOptions to_planner_options(const ScenarioFile &f);

double db_to_linear(double db);
double dbm_to_watt(double dbm);

} // namespace irsuav
