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

#include "irsuav/scenario.hpp"
#include "irsuav/errors.hpp"

#include <cmath>
#include <string>

namespace irsuav
{

namespace
{
void require(bool ok, const std::string &field, const std::string &what)
{
    if (!ok)
        throw ConfigError(field, what);
}
} // namespace

void Scenario::validate() const
{
    require(!users.empty(), "users", "at least one user is required");
    for (std::size_t k = 0; k < users.size(); ++k)
    {
        const auto &u = users[k];
        const std::string p = "users[" + std::to_string(k) + "].";
        require(u.location.finite(), p + "location", "must be finite");
        require(u.alpha_ug >= 2.0, p + "alpha_ug", "path-loss exponent must be >= 2");
        require(u.alpha_rg >= 2.0, p + "alpha_rg", "path-loss exponent must be >= 2");
        require(u.kappa_ug >= 0.0, p + "rician_ug_db", "Rician factor must be nonnegative");
        require(u.kappa_rg >= 0.0, p + "rician_rg_db", "Rician factor must be nonnegative");
        require(u.r_min >= 0.0, p + "r_min", "must be nonnegative");
        require(std::hypot(u.location.x - irs.location.x, u.location.y - irs.location.y) > 0.0,
                p + "location", "user is horizontally co-located with the IRS");
    }
    require(irs.m_r >= 1, "irs.m_r", "must be >= 1");
    require(irs.m_c >= 1, "irs.m_c", "must be >= 1");
    require(irs.d_r > 0.0, "irs.spacing_r", "must be positive");
    require(irs.d_c > 0.0, "irs.spacing_c", "must be positive");
    require(irs.amplitude_a >= 0.0 && irs.amplitude_a <= 1.0, "irs.amplitude", "must lie in [0, 1]");
    require(ofdm.n_f >= 4, "ofdm.n_f", "must be >= 4");
    require(ofdm.delta_f > 0.0, "ofdm.delta_f_hz", "must be positive");
    require(ofdm.f_c > 0.0, "ofdm.f_c_hz", "must be positive");
    require(ofdm.beta0 > 0.0, "ofdm.beta0_db", "must be finite");
    require(ofdm.sigma2() > 0.0, "ofdm.noise_psd_dbm_hz", "noise power must be positive");
    require(ofdm.p_max >= 0.0, "ofdm.p_max_dbm", "must be nonnegative");
    require(uav.n_slots >= 1, "uav.n_slots", "must be >= 1");
    require(uav.dt > 0.0, "uav.dt_s", "must be positive");
    require(uav.v_max >= 0.0, "uav.v_max", "must be nonnegative");
    require(uav.z_min <= uav.z_max, "uav.z_max", "must be >= z_min");
    require(uav.z_min > irs.location.z, "uav.z_min", "UAV must fly above the IRS");
    require(uav.q_initial.z >= uav.z_min && uav.q_initial.z <= uav.z_max, "uav.q_initial", "altitude outside [z_min, z_max]");
    require(uav.q_final.z >= uav.z_min && uav.q_final.z <= uav.z_max, "uav.q_final", "altitude outside [z_min, z_max]");
    const double span = dist(uav.q_initial, uav.q_final);
    require(span <= uav.step_limit() * double(uav.n_slots - 1) * (1.0 + 1e-12) + 1e-9, "uav.v_max",
            "endpoints unreachable within n_slots * dt * v_max");
}

Scenario desk_scenario()
{
    Scenario s;
    s.irs.location = {200.0, 500.0, 30.0};
    s.irs.m_r = s.irs.m_c = 64;
    s.irs.d_r = s.irs.d_c = kSpeedOfLight / (10.0 * s.ofdm.f_c);
    UserSpec u;
    u.location = {230.0, 470.0, 0.0};
    s.users.push_back(u);
    u.location = {420.0, 180.0, 0.0};
    s.users.push_back(u);
    u.location = {80.0, 300.0, 0.0};
    s.users.push_back(u);
    return s;
}

} // namespace irsuav
