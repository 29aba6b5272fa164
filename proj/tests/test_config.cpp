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

#include "irsuav/config.hpp"
#include "irsuav/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace irsuav;

namespace
{

const char *kMinimal = R"(users:
  - location: [10, 20]
  - location: [30, 40, 0]
    r_min: 0.25
    rician_ug_db: 3
irs:
  location: [0, 50, 30]
)";

std::string error_of(const std::string &text)
{
    try
    {
        parse_scenario_text(text);
    }
    catch (const ConfigError &e)
    {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("decibel conversions")
{
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(-50.0) == doctest::Approx(1e-5));
    CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watt(35.0) == doctest::Approx(3.16227766));
    CHECK(dbm_to_watt(-169.0) == doctest::Approx(1.2589254e-20));
}

TEST_CASE("minimal file fills defaults and converts units")
{
    const ScenarioFile f = parse_scenario_text(kMinimal);
    REQUIRE(f.users.size() == 2);
    CHECK(f.users[0].location == Vec3{10.0, 20.0, 0.0});
    CHECK(f.users[1].r_min == 0.25);
    const Scenario sc = to_scenario(f);
    CHECK(sc.users[1].kappa_ug == doctest::Approx(std::pow(10.0, 0.3)));
    CHECK(sc.users[0].kappa_rg == doctest::Approx(10.0));
    CHECK(sc.ofdm.beta0 == doctest::Approx(1e-5));
    CHECK(sc.ofdm.p_max == doctest::Approx(dbm_to_watt(35.0)));
    CHECK(sc.ofdm.sigma2() == doctest::Approx(dbm_to_watt(-169.0) * 1e5));
    CHECK(sc.irs.d_r == doctest::Approx(0.01));
    CHECK(sc.irs.location == Vec3{0.0, 50.0, 30.0});
    const PlannerOptions o = to_planner_options(f);
    CHECK(o.epsilon == 1e-3);
    CHECK(o.iter_max == 20);
}

TEST_CASE("load, serialize and reload give the same configuration")
{
    const ScenarioFile d = default_scenario_file();
    CHECK(parse_scenario_text(serialize_scenario(d)) == d);

    ScenarioFile f = parse_scenario_text(kMinimal);
    f.spacing_r = 0.0123456789012345;
    f.alpha_grid = {0.02, 0.1, 1.0 / 7.0};
    f.kappa_sweep_db = {2.0, 6.5};
    f.freeze_altitude = true;
    f.tdma = true;
    f.seed = 18446744073709551557ull;
    f.users[0].alpha_rg = 2.0 + 1.0 / 3.0;
    const ScenarioFile back = parse_scenario_text(serialize_scenario(f));
    CHECK(back == f);
    CHECK(serialize_scenario(back) == serialize_scenario(f));
}

TEST_CASE("missing required fields are named with their position")
{
    CHECK(error_of("irs:\n  location: [0, 0, 30]\n").find("users") != std::string::npos);
    CHECK(error_of("users:\n  - location: [1, 2]\n").find("irs") != std::string::npos);

    const std::string e = error_of("users:\n  - location: [1, 2]\n  - r_min: 0.3\nirs:\n  location: [0, 0, 30]\n");
    CHECK(e.find("users[1].location") != std::string::npos);
    CHECK(e.find("line 3") != std::string::npos);

    const std::string bad = error_of(std::string(kMinimal) + "ofdm:\n  n_f: lots\n");
    CHECK(bad.find("ofdm.n_f") != std::string::npos);
    CHECK(bad.find("line 9") != std::string::npos);
}

TEST_CASE("out-of-range values are rejected")
{
    CHECK(error_of(std::string(kMinimal) + "experiment:\n  eta: 1.5\n").find("experiment.eta") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "experiment:\n  irs_user: 3\n").find("irs_user") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "uav:\n  z_min: 130\n").find("uav") != std::string::npos);
    CHECK(error_of("users: [").find("parse error") != std::string::npos);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.yaml"), ConfigError);
}
