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

#include "irsuav/planner.hpp"
#include "irsuav/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace irsuav
{

namespace
{

bool rates_ok(const std::vector<double> &rates, const std::vector<double> &rmin)
{
    for (std::size_t k = 0; k < rmin.size(); ++k)
        if (rates[k] < rmin[k] - 1e-6)
            return false;
    return true;
}

RaResult ra_at(const Trajectory &traj, const ModePartition &part, const Scenario &sc, RaOptions ro, double scale)
{
    ro.rmin_scale = scale;
    return solve_subproblem1(traj.positions, part, sc, ro);
}

Solution pipeline(const Scenario &sc, double alpha, const PlannerOptions &opts, Bound bound)
{
    sc.validate();
    const ModePartition part = mode_partition(alpha, sc.ofdm.n_f);
    RaOptions ro = opts.ra;
    ro.bound = bound;
    ro.tdma = ro.tdma || opts.tdma;

    Solution sol;
    sol.alpha = alpha;
    sol.bound = bound;
    sol.trajectory = Trajectory::straight_line(sc.uav);

    double scale = 1.0, base = 1.0;
    RaResult ra;
    try
    {
        ra = ra_at(sol.trajectory, part, sc, ro, 1.0);
    }
    catch (const Infeasible &)
    {
        if (!opts.bootstrap)
            throw;
        double lo = 0.0, hi = 1.0;
        RaResult keep = ra_at(sol.trajectory, part, sc, ro, 0.0);
        for (int t = 0; t < 12; ++t)
        {
            const double mid = 0.5 * (lo + hi);
            try
            {
                keep = ra_at(sol.trajectory, part, sc, ro, mid);
                lo = mid;
            }
            catch (const Infeasible &)
            {
                hi = mid;
            }
        }
        ra = std::move(keep);
        base = scale = lo;
    }
    Allocation alloc = ra.alloc;
    double current = ra.objective;
    sol.iteration_trace.push_back(current);

    int iter = 0;
    if (!std::isinf(opts.epsilon))
    {
        for (iter = 1; iter <= opts.iter_max; ++iter)
        {
            const TrajectoryProblem pb = make_trajectory_problem(alloc, part, sc, bound, scale);
            try
            {
                ScaResult sca = solve_subproblem2(pb, sol.trajectory, sc.uav, opts.sca);
                sol.trajectory = std::move(sca.trajectory);
                current = sca.trace.back();
            }
            catch (const SubproblemInfeasible &)
            {
                // keep the incumbent trajectory
            }
            sol.iteration_trace.push_back(current);
            const std::size_t m = sol.iteration_trace.size();
            const bool restoring = scale < 1.0;
            if (iter >= 2 && !restoring)
            {
                const double prev = sol.iteration_trace[m - 3];
                if (std::abs(current - prev) <= opts.epsilon * std::abs(prev))
                    break;
            }
            if (iter == opts.iter_max)
                break;

            double next_scale = scale;
            if (restoring)
            {
                const int r = std::min(iter, opts.bootstrap_rounds);
                next_scale = r >= opts.bootstrap_rounds ? 1.0
                                                        : std::pow(base, double(opts.bootstrap_rounds - r) /
                                                                             double(opts.bootstrap_rounds));
                next_scale = std::max(next_scale, scale);
            }
            try
            {
                RaResult nr = ra_at(sol.trajectory, part, sc, ro, next_scale);
                if (next_scale > scale || nr.objective >= current)
                {
                    alloc = std::move(nr.alloc);
                    current = nr.objective;
                    scale = next_scale;
                }
            }
            catch (const Infeasible &)
            {
            }
            sol.iteration_trace.push_back(current);
        }
    }

    const GainTable gt = make_gain_table(sol.trajectory.positions, part, sc, bound);
    const AllocationRates rates = evaluate_allocation(alloc, gt, sc.ofdm.sigma2());
    sol.allocation = std::move(alloc);
    sol.lb_sum_rate = rates.objective;
    sol.lb_sum_rate_normalized = rates.objective / double(sc.ofdm.n_f);
    sol.per_user_rates.resize(sc.n_users());
    for (std::size_t k = 0; k < sc.n_users(); ++k)
        sol.per_user_rates[k] = rates.user_raw[k] / double(sc.ofdm.n_f);
    sol.rmin_scale = scale;
    sol.feasible = scale >= 1.0 && rates_ok(sol.per_user_rates, effective_rmin(sc, 1.0));
    sol.iterations = iter;
    return sol;
}

} // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn)
{
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(mu);
                    if (!err)
                        err = std::current_exception();
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

Solution alternate(const Scenario &sc, double alpha, const PlannerOptions &opts)
{
    return pipeline(sc, alpha, opts, Bound::Lower);
}

Solution solve_upper_bound(const Scenario &sc, double alpha, const PlannerOptions &opts)
{
    return pipeline(sc, alpha, opts, Bound::Upper);
}

AlphaSweep sweep_alpha(const Scenario &sc, const std::vector<double> &grid, const PlannerOptions &opts)
{
    AlphaSweep out;
    out.curve.resize(grid.size());
    parallel_for(grid.size() * 2, [&](std::size_t t) {
        const std::size_t a = t / 2;
        out.curve[a].alpha = grid[a];
        try
        {
            const Solution s = (t % 2 == 0) ? alternate(sc, grid[a], opts) : solve_upper_bound(sc, grid[a], opts);
            if (s.feasible)
                (t % 2 == 0 ? out.curve[a].lb : out.curve[a].ub) = s.lb_sum_rate_normalized;
        }
        catch (const Infeasible &)
        {
        }
    });
    double best = -1.0;
    for (const auto &p : out.curve)
        if (!std::isnan(p.lb) && p.lb > best)
        {
            best = p.lb;
            out.alpha_star = p.alpha;
        }
    if (best < 0.0 && !grid.empty())
        throw Infeasible("no feasible approximation parameter on the grid");
    return out;
}

Solution baseline_straight_line(const Scenario &sc, double alpha, const PlannerOptions &opts)
{
    PlannerOptions o = opts;
    o.epsilon = std::numeric_limits<double>::infinity();
    return alternate(sc, alpha, o);
}

Solution baseline_no_irs(const Scenario &sc, double alpha, const PlannerOptions &opts)
{
    Scenario s = sc;
    s.irs.amplitude_a = 0.0;
    return alternate(s, alpha, opts);
}

Solution baseline_tdma(const Scenario &sc, double alpha, const PlannerOptions &opts)
{
    PlannerOptions o = opts;
    o.tdma = true;
    return alternate(sc, alpha, o);
}

PlacementResult irs_placement_search(const Scenario &sc, const std::vector<Vec3> &candidates, double alpha,
                                     const PlannerOptions &opts)
{
    PlacementResult out;
    out.rate_map.resize(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t c) {
        Scenario s = sc;
        s.irs.location = candidates[c];
        out.rate_map[c] = {candidates[c], std::numeric_limits<double>::quiet_NaN()};
        try
        {
            const Solution sol = alternate(s, alpha, opts);
            if (sol.feasible)
                out.rate_map[c].second = sol.lb_sum_rate_normalized;
        }
        catch (const Infeasible &)
        {
        }
        catch (const ConfigError &)
        {
        }
    });
    for (const auto &[loc, rate] : out.rate_map)
        if (!std::isnan(rate) && (std::isnan(out.best_rate) || rate > out.best_rate))
        {
            out.best_rate = rate;
            out.best_location = loc;
        }
    return out;
}

std::vector<Vec3> boundary_grid(double x0, double x1, double y0, double y1, double step, double height)
{
    std::vector<Vec3> pts;
    auto edge = [&](Vec3 a, Vec3 b) {
        const double len = (b - a).norm();
        const int m = std::max(1, int(std::round(len / step)));
        for (int t = 0; t < m; ++t)
            pts.push_back(a + (b - a) * (double(t) / double(m)));
    };
    edge({x0, y0, height}, {x1, y0, height});
    edge({x1, y0, height}, {x1, y1, height});
    edge({x1, y1, height}, {x0, y1, height});
    edge({x0, y1, height}, {x0, y0, height});
    return pts;
}

} // namespace irsuav
