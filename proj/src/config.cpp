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

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace irsuav
{

namespace
{

std::string where(const YAML::Node &n)
{
    const YAML::Mark m = n.Mark();
    if (m.is_null())
        return "";
    return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

template <typename T>
T scalar(const YAML::Node &n, const std::string &field)
{
    try
    {
        return n.as<T>();
    }
    catch (const YAML::Exception &)
    {
        throw ConfigError(field, "invalid value" + where(n));
    }
}

template <typename T>
void opt(const YAML::Node &parent, const char *key, const std::string &prefix, T &out)
{
    const YAML::Node n = parent[key];
    if (n)
        out = scalar<T>(n, prefix + key);
}

Vec3 vec(const YAML::Node &n, const std::string &field, double z_default)
{
    if (!n.IsSequence() || (n.size() != 2 && n.size() != 3))
        throw ConfigError(field, "expected [x, y] or [x, y, z]" + where(n));
    Vec3 v{scalar<double>(n[0], field), scalar<double>(n[1], field), z_default};
    if (n.size() == 3)
        v.z = scalar<double>(n[2], field);
    return v;
}

void opt_vec(const YAML::Node &parent, const char *key, const std::string &prefix, Vec3 &out)
{
    const YAML::Node n = parent[key];
    if (n)
        out = vec(n, prefix + key, out.z);
}

YAML::Node section(const YAML::Node &root, const char *key)
{
    const YAML::Node n = root[key];
    if (n && !n.IsMap())
        throw ConfigError(key, "expected a mapping" + where(n));
    return n;
}

void emit_vec(YAML::Emitter &out, const Vec3 &v)
{
    out << YAML::Flow << YAML::BeginSeq << v.x << v.y << v.z << YAML::EndSeq;
}

} // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

ScenarioFile default_scenario_file()
{
    ScenarioFile f;
    UserEntry u;
    u.location = {230.0, 470.0, 0.0};
    f.users.push_back(u);
    u.location = {420.0, 180.0, 0.0};
    f.users.push_back(u);
    u.location = {80.0, 300.0, 0.0};
    f.users.push_back(u);
    return f;
}

ScenarioFile parse_scenario_text(const std::string &text)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException &e)
    {
        throw ConfigError("", std::string("parse error: ") + e.what());
    }
    if (!root.IsMap())
        throw ConfigError("", "top level must be a mapping");

    ScenarioFile f;
    const YAML::Node users = root["users"];
    if (!users)
        throw ConfigError("users", "required field is missing");
    if (!users.IsSequence() || users.size() == 0)
        throw ConfigError("users", "expected a non-empty list" + where(users));
    for (std::size_t k = 0; k < users.size(); ++k)
    {
        const YAML::Node u = users[k];
        const std::string p = "users[" + std::to_string(k) + "].";
        if (!u.IsMap())
            throw ConfigError("users[" + std::to_string(k) + "]", "expected a mapping" + where(u));
        UserEntry e;
        if (!u["location"])
            throw ConfigError(p + "location", "required field is missing" + where(u));
        e.location = vec(u["location"], p + "location", 0.0);
        opt(u, "r_min", p, e.r_min);
        opt(u, "alpha_ug", p, e.alpha_ug);
        opt(u, "alpha_rg", p, e.alpha_rg);
        opt(u, "rician_ug_db", p, e.rician_ug_db);
        opt(u, "rician_rg_db", p, e.rician_rg_db);
        f.users.push_back(e);
    }

    if (const YAML::Node irs = section(root, "irs"))
    {
        if (!irs["location"])
            throw ConfigError("irs.location", "required field is missing" + where(irs));
        f.irs_location = vec(irs["location"], "irs.location", 0.0);
        opt(irs, "m_r", "irs.", f.m_r);
        opt(irs, "m_c", "irs.", f.m_c);
        if (irs["spacing_r"])
            f.spacing_r = scalar<double>(irs["spacing_r"], "irs.spacing_r");
        if (irs["spacing_c"])
            f.spacing_c = scalar<double>(irs["spacing_c"], "irs.spacing_c");
        opt(irs, "amplitude", "irs.", f.amplitude);
    }
    else
        throw ConfigError("irs", "required field is missing");

    if (const YAML::Node o = section(root, "ofdm"))
    {
        opt(o, "n_f", "ofdm.", f.n_f);
        opt(o, "delta_f_hz", "ofdm.", f.delta_f_hz);
        opt(o, "f_c_hz", "ofdm.", f.f_c_hz);
        opt(o, "beta0_db", "ofdm.", f.beta0_db);
        opt(o, "noise_psd_dbm_hz", "ofdm.", f.noise_psd_dbm_hz);
        opt(o, "p_max_dbm", "ofdm.", f.p_max_dbm);
    }
    if (const YAML::Node u = section(root, "uav"))
    {
        opt_vec(u, "q_initial", "uav.", f.q_initial);
        opt_vec(u, "q_final", "uav.", f.q_final);
        opt(u, "n_slots", "uav.", f.n_slots);
        opt(u, "dt_s", "uav.", f.dt_s);
        opt(u, "v_max", "uav.", f.v_max);
        opt(u, "z_min", "uav.", f.z_min);
        opt(u, "z_max", "uav.", f.z_max);
        opt(u, "freeze_altitude", "uav.", f.freeze_altitude);
    }
    if (const YAML::Node s = section(root, "solver"))
    {
        opt(s, "alpha", "solver.", f.alpha);
        opt(s, "epsilon", "solver.", f.epsilon);
        opt(s, "iter_max", "solver.", f.iter_max);
        opt(s, "ra_max_outer", "solver.", f.ra_max_outer);
        opt(s, "tdma", "solver.", f.tdma);
    }
    if (const YAML::Node e = section(root, "experiment"))
    {
        opt(e, "seed", "experiment.", f.seed);
        opt(e, "eta", "experiment.", f.eta);
        opt(e, "mc_runs", "experiment.", f.mc_runs);
        opt(e, "alpha_grid", "experiment.", f.alpha_grid);
        opt(e, "kappa_sweep_db", "experiment.", f.kappa_sweep_db);
        opt(e, "placement_step", "experiment.", f.placement_step);
        opt(e, "irs_user", "experiment.", f.irs_user);
    }
    if (f.eta <= 0.0 || f.eta >= 1.0)
        throw ConfigError("experiment.eta", "must lie in (0, 1)");
    if (f.irs_user < 1 || std::size_t(f.irs_user) > f.users.size())
        throw ConfigError("experiment.irs_user", "must name an existing user (1-based)");
    to_scenario(f).validate();
    return f;
}

ScenarioFile load_scenario_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("scenario", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string serialize_scenario(const ScenarioFile &f)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "users" << YAML::Value << YAML::BeginSeq;
    for (const auto &u : f.users)
    {
        out << YAML::BeginMap;
        out << YAML::Key << "location" << YAML::Value;
        emit_vec(out, u.location);
        out << YAML::Key << "r_min" << YAML::Value << u.r_min;
        out << YAML::Key << "alpha_ug" << YAML::Value << u.alpha_ug;
        out << YAML::Key << "alpha_rg" << YAML::Value << u.alpha_rg;
        out << YAML::Key << "rician_ug_db" << YAML::Value << u.rician_ug_db;
        out << YAML::Key << "rician_rg_db" << YAML::Value << u.rician_rg_db;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "irs" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "location" << YAML::Value;
    emit_vec(out, f.irs_location);
    out << YAML::Key << "m_r" << YAML::Value << f.m_r;
    out << YAML::Key << "m_c" << YAML::Value << f.m_c;
    if (f.spacing_r)
        out << YAML::Key << "spacing_r" << YAML::Value << *f.spacing_r;
    if (f.spacing_c)
        out << YAML::Key << "spacing_c" << YAML::Value << *f.spacing_c;
    out << YAML::Key << "amplitude" << YAML::Value << f.amplitude;
    out << YAML::EndMap;

    out << YAML::Key << "ofdm" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "n_f" << YAML::Value << f.n_f;
    out << YAML::Key << "delta_f_hz" << YAML::Value << f.delta_f_hz;
    out << YAML::Key << "f_c_hz" << YAML::Value << f.f_c_hz;
    out << YAML::Key << "beta0_db" << YAML::Value << f.beta0_db;
    out << YAML::Key << "noise_psd_dbm_hz" << YAML::Value << f.noise_psd_dbm_hz;
    out << YAML::Key << "p_max_dbm" << YAML::Value << f.p_max_dbm;
    out << YAML::EndMap;

    out << YAML::Key << "uav" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "q_initial" << YAML::Value;
    emit_vec(out, f.q_initial);
    out << YAML::Key << "q_final" << YAML::Value;
    emit_vec(out, f.q_final);
    out << YAML::Key << "n_slots" << YAML::Value << f.n_slots;
    out << YAML::Key << "dt_s" << YAML::Value << f.dt_s;
    out << YAML::Key << "v_max" << YAML::Value << f.v_max;
    out << YAML::Key << "z_min" << YAML::Value << f.z_min;
    out << YAML::Key << "z_max" << YAML::Value << f.z_max;
    out << YAML::Key << "freeze_altitude" << YAML::Value << f.freeze_altitude;
    out << YAML::EndMap;

    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "alpha" << YAML::Value << f.alpha;
    out << YAML::Key << "epsilon" << YAML::Value << f.epsilon;
    out << YAML::Key << "iter_max" << YAML::Value << f.iter_max;
    out << YAML::Key << "ra_max_outer" << YAML::Value << f.ra_max_outer;
    out << YAML::Key << "tdma" << YAML::Value << f.tdma;
    out << YAML::EndMap;

    out << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << f.seed;
    out << YAML::Key << "eta" << YAML::Value << f.eta;
    out << YAML::Key << "mc_runs" << YAML::Value << f.mc_runs;
    out << YAML::Key << "alpha_grid" << YAML::Value << YAML::Flow << f.alpha_grid;
    out << YAML::Key << "kappa_sweep_db" << YAML::Value << YAML::Flow << f.kappa_sweep_db;
    out << YAML::Key << "placement_step" << YAML::Value << f.placement_step;
    out << YAML::Key << "irs_user" << YAML::Value << f.irs_user;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

Scenario to_scenario(const ScenarioFile &f)
{
    Scenario s;
    for (const auto &e : f.users)
    {
        UserSpec u;
        u.location = e.location;
        u.r_min = e.r_min;
        u.alpha_ug = e.alpha_ug;
        u.alpha_rg = e.alpha_rg;
        u.kappa_ug = db_to_linear(e.rician_ug_db);
        u.kappa_rg = db_to_linear(e.rician_rg_db);
        s.users.push_back(u);
    }
    s.irs.location = f.irs_location;
    s.irs.m_r = f.m_r;
    s.irs.m_c = f.m_c;
    s.irs.d_r = f.spacing_r.value_or(kSpeedOfLight / (10.0 * f.f_c_hz));
    s.irs.d_c = f.spacing_c.value_or(kSpeedOfLight / (10.0 * f.f_c_hz));
    s.irs.amplitude_a = f.amplitude;
    s.ofdm.n_f = f.n_f;
    s.ofdm.delta_f = f.delta_f_hz;
    s.ofdm.f_c = f.f_c_hz;
    s.ofdm.beta0 = db_to_linear(f.beta0_db);
    s.ofdm.noise_psd = dbm_to_watt(f.noise_psd_dbm_hz);
    s.ofdm.p_max = dbm_to_watt(f.p_max_dbm);
    s.uav.q_initial = f.q_initial;
    s.uav.q_final = f.q_final;
    s.uav.n_slots = f.n_slots;
    s.uav.dt = f.dt_s;
    s.uav.v_max = f.v_max;
    s.uav.z_min = f.z_min;
    s.uav.z_max = f.z_max;
    s.uav.freeze_altitude = f.freeze_altitude;
    return s;
}

PlannerOptions to_planner_options(const ScenarioFile &f)
{
    PlannerOptions o;
    o.epsilon = f.epsilon;
    o.iter_max = f.iter_max;
    o.tdma = f.tdma;
    o.ra.max_outer = f.ra_max_outer;
    return o;
}

} // namespace irsuav
