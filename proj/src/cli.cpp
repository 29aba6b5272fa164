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

#include "irsuav/cli.hpp"
#include "irsuav/channel.hpp"
#include "irsuav/config.hpp"
#include "irsuav/errors.hpp"
#include "irsuav/fading_mc.hpp"
#include "irsuav/planner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#ifndef IRSUAV_GIT_DESCRIBE
#define IRSUAV_GIT_DESCRIBE "unknown"
#endif

namespace irsuav
{

namespace
{

namespace fs = std::filesystem;

struct Flags
{
    std::string scenario;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool freeze_altitude = false;
    std::string baseline;
    std::optional<std::size_t> mc_runs;
    std::optional<int> irs_user;
};

class Csv
{
public:
    Csv(const fs::path &path, const std::string &header) : os_(path)
    {
        if (!os_)
            throw std::runtime_error("cannot write " + path.string());
        os_ << std::setprecision(9) << header << '\n';
    }
    template <typename... T>
    void row(const T &...v)
    {
        bool first = true;
        ((os_ << (first ? "" : ",") << v, first = false), ...);
        os_ << '\n';
    }

private:
    std::ofstream os_;
};

struct Context
{
    ScenarioFile file;
    Scenario sc;
    PlannerOptions opts;
    double alpha = 0.0;
    std::uint64_t seed = 1;
    fs::path out;
};

Context make_context(const Flags &f)
{
    Context c;
    c.file = load_scenario_file(f.scenario);
    if (f.freeze_altitude)
        c.file.freeze_altitude = true;
    if (f.mc_runs)
        c.file.mc_runs = *f.mc_runs;
    if (f.irs_user)
    {
        if (*f.irs_user < 1 || std::size_t(*f.irs_user) > c.file.users.size())
            throw ConfigError("--irs-user", "must name an existing user (1-based)");
        c.file.irs_user = *f.irs_user;
    }
    c.alpha = f.alpha.value_or(c.file.alpha);
    if (!(c.alpha > 0.0 && c.alpha < 0.25))
        throw ConfigError("solver.alpha", "must lie in (0, 0.25)");
    c.seed = f.seed.value_or(c.file.seed);
    c.sc = to_scenario(c.file);
    c.opts = to_planner_options(c.file);
    c.out = f.out_dir;
    fs::create_directories(c.out);
    return c;
}

void write_metadata(const Context &c, const std::string &cmd, double wall, bool feasible)
{
    nlohmann::json j;
    j["command"] = cmd;
    j["seed"] = c.seed;
    j["alpha"] = c.alpha;
    j["git_describe"] = IRSUAV_GIT_DESCRIBE;
    j["wall_time_s"] = wall;
    j["feasible"] = feasible;
    j["users"] = c.sc.n_users();
    j["n_f"] = c.sc.ofdm.n_f;
    j["n_slots"] = c.sc.uav.n_slots;
    j["irs_m_r"] = c.sc.irs.m_r;
    j["irs_m_c"] = c.sc.irs.m_c;
    std::ofstream(c.out / "metadata.json") << j.dump(2) << '\n';
}

void write_trajectory(const fs::path &p, const Trajectory &t)
{
    Csv csv(p, "n,x,y,z");
    for (std::size_t n = 0; n < t.size(); ++n)
        csv.row(n + 1, t.positions[n].x, t.positions[n].y, t.positions[n].z);
}

void write_allocation(const fs::path &p, const Allocation &a)
{
    Csv csv(p, "n,i,k,k_irs,p");
    for (std::size_t n = 0; n < a.n_slots; ++n)
        for (std::size_t i = 0; i < a.n_f; ++i)
        {
            const int k = a.user[n * a.n_f + i];
            if (k < 0)
                continue;
            csv.row(n + 1, i + 1, k + 1, a.irs[n] + 1, a.power[n * a.n_f + i]);
        }
}

void write_users(const fs::path &p, const Solution &s, const Scenario &sc)
{
    Csv csv(p, "k,rate,r_min,r_min_applied");
    for (std::size_t k = 0; k < sc.n_users(); ++k)
        csv.row(k + 1, s.per_user_rates[k], sc.users[k].r_min, sc.users[k].r_min * s.rmin_scale);
}

int status(const Solution &s, std::ostream &err)
{
    if (s.feasible)
        return kExitOk;
    err << "infeasible: minimum-rate constraints cannot be met (best scale " << s.rmin_scale << ")\n";
    return kExitInfeasible;
}

int cmd_solve(const Context &c, std::ostream &out, std::ostream &err)
{
    const Solution s = alternate(c.sc, c.alpha, c.opts);
    write_trajectory(c.out / "trajectory.csv", s.trajectory);
    write_allocation(c.out / "allocation.csv", s.allocation);
    write_users(c.out / "users.csv", s, c.sc);
    Csv rates(c.out / "rates.csv", "iteration,step,lb_raw,lb");
    for (std::size_t j = 0; j < s.iteration_trace.size(); ++j)
        rates.row(j + 1, j % 2 == 0 ? "ra" : "trajectory", s.iteration_trace[j],
                  s.iteration_trace[j] / double(c.sc.ofdm.n_f));
    out << std::setprecision(9) << "lb_sum_rate " << s.lb_sum_rate_normalized << " (raw " << s.lb_sum_rate
        << ") after " << s.iterations << " iterations\n";
    return status(s, err);
}

std::vector<double> default_alpha_grid()
{
    std::vector<double> g;
    for (int j = 1; j <= 12; ++j)
        g.push_back(0.02 * j);
    return g;
}

int cmd_sweep(const Context &c, std::ostream &out, std::ostream &)
{
    const auto grid = c.file.alpha_grid.empty() ? default_alpha_grid() : c.file.alpha_grid;
    const AlphaSweep sw = sweep_alpha(c.sc, grid, c.opts);
    Csv csv(c.out / "alpha_sweep.csv", "alpha,lb,ub");
    for (const auto &pt : sw.curve)
        csv.row(pt.alpha, pt.lb, pt.ub);
    out << std::setprecision(9) << "alpha_star " << sw.alpha_star << '\n';
    return kExitOk;
}

int cmd_baselines(const Context &c, const std::string &which, std::ostream &out, std::ostream &err)
{
    std::vector<std::pair<std::string, Solution>> runs;
    if (which.empty() || which == "proposed")
        runs.emplace_back("proposed", alternate(c.sc, c.alpha, c.opts));
    if (which.empty() || which == "1")
        runs.emplace_back("baseline1", baseline_straight_line(c.sc, c.alpha, c.opts));
    if (which.empty() || which == "2")
        runs.emplace_back("baseline2", baseline_no_irs(c.sc, c.alpha, c.opts));
    if (which.empty() || which == "tdma")
        runs.emplace_back("tdma", baseline_tdma(c.sc, c.alpha, c.opts));
    Csv csv(c.out / "baselines.csv", "scheme,lb_raw,lb,feasible,iterations");
    int code = kExitOk;
    out << std::setprecision(9);
    for (const auto &[name, s] : runs)
    {
        csv.row(name, s.lb_sum_rate, s.lb_sum_rate_normalized, int(s.feasible), s.iterations);
        out << name << ' ' << s.lb_sum_rate_normalized << '\n';
        if (!s.feasible)
        {
            err << name << ": ";
            code = status(s, err);
        }
    }
    if (runs.size() == 1)
    {
        write_trajectory(c.out / "trajectory.csv", runs[0].second.trajectory);
        write_allocation(c.out / "allocation.csv", runs[0].second.allocation);
    }
    return code;
}

int cmd_outage(const Context &c, std::ostream &out, std::ostream &err)
{
    std::vector<std::optional<double>> kappas;
    for (double k : c.file.kappa_sweep_db)
        kappas.emplace_back(k);
    if (kappas.empty())
        kappas.emplace_back();
    Csv csv(c.out / "outage.csv", "rician_db,eta,avg_system_outage_rate,los_sum_rate,eta_los_sum_rate,feasible");
    int code = kExitOk;
    out << std::setprecision(9);
    for (const auto &kdb : kappas)
    {
        Scenario sc = c.sc;
        if (kdb)
            for (auto &u : sc.users)
                u.kappa_ug = u.kappa_rg = db_to_linear(*kdb);
        const Solution s = alternate(conservative_scenario(sc, c.file.eta), c.alpha, c.opts);
        const OutageReport r = run_outage(s, sc, c.file.eta, c.file.mc_runs, c.seed);
        const double label = kdb ? *kdb : 10.0 * std::log10(sc.users.front().kappa_ug);
        csv.row(label, r.eta, r.avg_system_outage_rate, r.los_sum_rate, r.eta * r.los_sum_rate, int(s.feasible));
        out << "rician_db " << label << " outage " << r.avg_system_outage_rate << '\n';
        if (!s.feasible)
            code = status(s, err);
    }
    return code;
}

int cmd_place(const Context &c, std::ostream &out, std::ostream &)
{
    double x0 = std::min(c.sc.uav.q_initial.x, c.sc.uav.q_final.x), x1 = std::max(c.sc.uav.q_initial.x, c.sc.uav.q_final.x);
    double y0 = std::min(c.sc.uav.q_initial.y, c.sc.uav.q_final.y), y1 = std::max(c.sc.uav.q_initial.y, c.sc.uav.q_final.y);
    for (const auto &u : c.sc.users)
    {
        x0 = std::min(x0, u.location.x), x1 = std::max(x1, u.location.x);
        y0 = std::min(y0, u.location.y), y1 = std::max(y1, u.location.y);
    }
    const auto cand = boundary_grid(x0, x1, y0, y1, c.file.placement_step, c.sc.irs.location.z);
    const PlacementResult r = irs_placement_search(c.sc, cand, c.alpha, c.opts);
    Csv csv(c.out / "placement.csv", "x,y,z,lb");
    for (const auto &[p, v] : r.rate_map)
        csv.row(p.x, p.y, p.z, v);
    out << std::setprecision(9) << "best " << r.best_location.x << ' ' << r.best_location.y << ' '
        << r.best_location.z << " lb " << r.best_rate << '\n';
    return std::isnan(r.best_rate) ? int(kExitInfeasible) : int(kExitOk);
}

int cmd_probe(const Context &c, std::ostream &out, std::ostream &)
{
    const std::size_t assisted = std::size_t(c.file.irs_user - 1);
    const Trajectory t = Trajectory::straight_line(c.sc.uav);
    Csv csv(c.out / "channel_probe.csv", "n,k,i,gain,peak,trough,dc,period_subcarriers");
    for (std::size_t n = 0; n < t.size(); ++n)
        for (std::size_t k = 0; k < c.sc.n_users(); ++k)
        {
            const GainLevels lv = gain_levels(k, assisted, t.positions[n], c.sc);
            const double period = fading_period(k, assisted, t.positions[n], c.sc);
            for (std::size_t i = 0; i < c.sc.ofdm.n_f; ++i)
                csv.row(n + 1, k + 1, i + 1, los_composite_gain(k, assisted, i, t.positions[n], c.sc), lv.peak,
                        lv.trough, lv.dc, period);
        }
    out << "probe rows " << t.size() * c.sc.n_users() * c.sc.ofdm.n_f << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Trajectory and resource planning for IRS-assisted UAV OFDMA downlinks", "irsuav"};
    app.require_subcommand(1);
    Flags f;
    std::string chosen;
    const std::vector<std::string> names = {"solve", "sweep-alpha", "baselines", "outage", "place-irs",
                                            "channel-probe"};
    for (const auto &name : names)
    {
        CLI::App *sub = app.add_subcommand(name);
        sub->add_option("--scenario", f.scenario, "scenario YAML file")->required();
        sub->add_option("--alpha", f.alpha, "subcarrier mode fraction");
        sub->add_option("--seed", f.seed, "Monte Carlo seed");
        sub->add_option("--out", f.out_dir, "output directory");
        sub->add_flag("--freeze-altitude", f.freeze_altitude, "hold the UAV at z_min");
        sub->add_option("--mc-runs", f.mc_runs, "Monte Carlo runs");
        sub->add_option("--irs-user", f.irs_user, "assisted user for channel-probe (1-based)");
        if (name == "baselines")
            sub->add_option("--baseline", f.baseline, "1, 2, tdma or proposed")
                ->check(CLI::IsMember({"1", "2", "tdma", "proposed"}));
        sub->callback([&chosen, name] { chosen = name; });
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try
    {
        app.parse(rev);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        const Context c = make_context(f);
        int code = kExitOk;
        if (chosen == "solve")
            code = cmd_solve(c, out, err);
        else if (chosen == "sweep-alpha")
            code = cmd_sweep(c, out, err);
        else if (chosen == "baselines")
            code = cmd_baselines(c, f.baseline, out, err);
        else if (chosen == "outage")
            code = cmd_outage(c, out, err);
        else if (chosen == "place-irs")
            code = cmd_place(c, out, err);
        else
            code = cmd_probe(c, out, err);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_metadata(c, chosen, wall, code == kExitOk);
        return code;
    }
    catch (const ConfigError &e)
    {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const Infeasible &e)
    {
        err << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    }
    catch (const SubproblemInfeasible &e)
    {
        err << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    }
}

} // namespace irsuav
