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

#include "irsuav/ra_solver.hpp"
#include "irsuav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace irsuav
{

namespace
{
constexpr double kLn2 = std::numbers::ln2;
constexpr double kVarrhoFloor = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Group
{
    int k = 0;
    double g = 0.0;
    std::size_t count = 0;
    double p = 0.0;
};

// Exact weighted water-filling over groups sharing one power budget.
// p = [w_k/(varrho ln2) - sigma2/g]^+ with sum count*p = p_max. Returns varrho.
double waterfill_groups(std::vector<Group> &groups, const std::vector<double> &w, double sigma2, double p_max)
{
    struct Item
    {
        std::size_t at;
        double c, f, b;
    };
    std::vector<Item> items;
    for (std::size_t a = 0; a < groups.size(); ++a)
    {
        groups[a].p = 0.0;
        const double c = w[std::size_t(groups[a].k)] / kLn2;
        if (groups[a].g > 0.0 && c > 0.0 && groups[a].count > 0)
        {
            const double f = sigma2 / groups[a].g;
            items.push_back({a, c, f, f / c});
        }
    }
    if (items.empty())
        return kVarrhoFloor;
    std::stable_sort(items.begin(), items.end(), [](const Item &x, const Item &y) { return x.b < y.b; });

    double sum_c = 0.0, sum_f = 0.0, lambda = 0.0;
    std::size_t active = 0;
    for (std::size_t r = 0; r < items.size(); ++r)
    {
        const double m = double(groups[items[r].at].count);
        sum_c += m * items[r].c;
        sum_f += m * items[r].f;
        lambda = (p_max + sum_f) / sum_c;
        active = r + 1;
        if (r + 1 == items.size() || lambda <= items[r + 1].b)
            break;
    }
    for (std::size_t r = 0; r < active; ++r)
        groups[items[r].at].p = std::max(0.0, items[r].c * lambda - items[r].f);
    return std::max(1.0 / lambda, kVarrhoFloor);
}

double group_value(double w, double g, double varrho, double sigma2, double &p)
{
    p = 0.0;
    if (g <= 0.0)
        return 0.0;
    p = std::max(0.0, w / (varrho * kLn2) - sigma2 / g);
    if (p <= 0.0)
        return 0.0;
    return w * std::log2(1.0 + p * g / sigma2) - varrho * p;
}

struct SlotPick
{
    int kp = 0;
    std::array<int, 4> k_of_mode{};
    double value = 0.0;
    double power = 0.0;
};

// Lagrangian maximization of one slot at fixed (nu, varrho).
SlotPick pick_slot(const GainTable &gt, std::size_t n, const std::vector<double> &w, double varrho, double sigma2,
                   bool tdma)
{
    const std::size_t K = gt.n_users;
    SlotPick best;
    best.value = -kInf;
    for (std::size_t kp = 0; kp < K; ++kp)
    {
        if (tdma)
        {
            for (std::size_t k = 0; k < K; ++k)
            {
                double total = 0.0, power = 0.0, p = 0.0;
                for (int j = 0; j < 4; ++j)
                {
                    const double m = double(gt.part.size(j));
                    total += m * group_value(w[k], gt.at(n, k, kp, j), varrho, sigma2, p);
                    power += m * p;
                }
                if (total > best.value)
                {
                    best.value = total;
                    best.power = power;
                    best.kp = int(kp);
                    best.k_of_mode.fill(int(k));
                }
            }
            continue;
        }
        SlotPick cand;
        cand.kp = int(kp);
        for (int j = 0; j < 4; ++j)
        {
            double bv = -kInf, bp = 0.0, p = 0.0;
            int bk = 0;
            for (std::size_t k = 0; k < K; ++k)
            {
                const double v = group_value(w[k], gt.at(n, k, kp, j), varrho, sigma2, p);
                if (v > bv)
                {
                    bv = v;
                    bp = p;
                    bk = int(k);
                }
            }
            const double m = double(gt.part.size(j));
            cand.value += m * bv;
            cand.power += m * bp;
            cand.k_of_mode[std::size_t(j)] = bk;
        }
        if (cand.value > best.value)
            best = cand;
    }
    return best;
}

SlotPick solve_slot(const GainTable &gt, std::size_t n, const std::vector<double> &w, double sigma2, double p_max,
                    bool tdma)
{
    const double max_w = *std::max_element(w.begin(), w.end());
    if (p_max <= 0.0)
        return pick_slot(gt, n, w, kInf, sigma2, tdma);
    double hi = max_w * double(gt.part.n_f) / (kLn2 * p_max);
    double lo = hi;
    bool bracketed = false;
    for (int t = 0; t < 200; ++t)
    {
        lo *= 0.25;
        if (pick_slot(gt, n, w, lo, sigma2, tdma).power >= p_max)
        {
            bracketed = true;
            break;
        }
    }
    if (bracketed)
        for (int t = 0; t < 60 && hi / lo > 1.0 + 1e-12; ++t)
        {
            const double mid = std::sqrt(lo * hi);
            if (pick_slot(gt, n, w, mid, sigma2, tdma).power >= p_max)
                lo = mid;
            else
                hi = mid;
        }
    return pick_slot(gt, n, w, bracketed ? hi : lo, sigma2, tdma);
}

std::vector<Group> slot_groups(const Allocation &a, const GainTable &gt, std::size_t n)
{
    std::vector<Group> groups;
    const int kp = a.irs[n];
    if (kp < 0)
        return groups;
    std::vector<std::size_t> slot_of(gt.n_users * 4, std::size_t(-1));
    for (std::size_t i = 0; i < a.n_f; ++i)
    {
        const int k = a.user[n * a.n_f + i];
        if (k < 0)
            continue;
        const int j = gt.part.mode_of(i);
        std::size_t &at = slot_of[std::size_t(k) * 4 + std::size_t(j)];
        if (at == std::size_t(-1))
        {
            at = groups.size();
            groups.push_back({k, gt.at(n, std::size_t(k), std::size_t(kp), j), 0, 0.0});
        }
        ++groups[at].count;
    }
    return groups;
}

// Distributes group powers back onto subcarriers of slot n.
void apply_groups(Allocation &a, const GainTable &gt, std::size_t n, const std::vector<Group> &groups)
{
    for (std::size_t i = 0; i < a.n_f; ++i)
        a.power[n * a.n_f + i] = 0.0;
    // same keying as slot_groups
    std::vector<std::size_t> slot_of(gt.n_users * 4, std::size_t(-1));
    std::size_t next = 0;
    for (std::size_t i = 0; i < a.n_f; ++i)
    {
        const int k = a.user[n * a.n_f + i];
        if (k < 0)
            continue;
        const int j = gt.part.mode_of(i);
        std::size_t &at = slot_of[std::size_t(k) * 4 + std::size_t(j)];
        if (at == std::size_t(-1))
            at = next++;
        a.power[n * a.n_f + i] = groups[at].p;
    }
}

struct Fit
{
    Allocation alloc;
    std::vector<double> nu, varrho, user_raw;
    double objective = 0.0;
    bool feasible = false;
    double deficit = kInf;
};

double max_deficit(const std::vector<double> &user_raw, const std::vector<double> &rmin, std::size_t n_f)
{
    double d = 0.0;
    for (std::size_t k = 0; k < rmin.size(); ++k)
        d = std::max(d, rmin[k] - user_raw[k] / double(n_f));
    return d;
}

bool meets(const std::vector<double> &user_raw, const std::vector<double> &rmin, std::size_t n_f)
{
    for (std::size_t k = 0; k < rmin.size(); ++k)
        if (user_raw[k] / double(n_f) < rmin[k])
            return false;
    return true;
}

// Power-only water-filling of every slot for a fixed schedule and fixed nu.
void fill_schedule(Allocation &a, std::vector<std::vector<Group>> &groups, const GainTable &gt,
                   const std::vector<double> &nu, double sigma2, double p_max, std::vector<double> &varrho)
{
    std::vector<double> w(nu.size());
    for (std::size_t k = 0; k < nu.size(); ++k)
        w[k] = (nu[k] + 1.0) / double(a.n_slots);
    varrho.assign(a.n_slots, kVarrhoFloor);
    for (std::size_t n = 0; n < a.n_slots; ++n)
    {
        varrho[n] = waterfill_groups(groups[n], w, sigma2, p_max);
        apply_groups(a, gt, n, groups[n]);
    }
}

// Best feasible power allocation for a fixed schedule: dual ascent on nu with exact water-filling.
Fit fit_schedule(const Allocation &sched, const GainTable &gt, const std::vector<double> &rmin, double sigma2,
                 double p_max, std::vector<double> nu, int iters)
{
    Fit best;
    std::vector<std::vector<Group>> groups(sched.n_slots);
    for (std::size_t n = 0; n < sched.n_slots; ++n)
        groups[n] = slot_groups(sched, gt, n);
    const std::size_t K = sched.n_users;
    std::vector<double> step(K, 0.5), last(K, 0.0);
    Allocation a = sched;
    std::vector<double> varrho;
    for (int l = 0; l < iters; ++l)
    {
        fill_schedule(a, groups, gt, nu, sigma2, p_max, varrho);
        const AllocationRates r = evaluate_allocation(a, gt, sigma2);
        const bool ok = meets(r.user_raw, rmin, a.n_f);
        const double def = max_deficit(r.user_raw, rmin, a.n_f);
        if ((ok && (!best.feasible || r.objective > best.objective)) || (!best.feasible && !ok && def < best.deficit))
        {
            best.alloc = a;
            best.nu = nu;
            best.varrho = varrho;
            best.user_raw = r.user_raw;
            best.objective = r.objective;
            best.feasible = ok;
            best.deficit = def;
        }
        bool moved = false;
        for (std::size_t k = 0; k < K; ++k)
        {
            const double g = r.user_raw[k] / double(a.n_f) - rmin[k];
            if (nu[k] == 0.0 && g >= 0.0)
                continue;
            if (g * last[k] < 0.0)
                step[k] *= 0.5;
            else
                step[k] *= 1.2;
            last[k] = g;
            const double next = std::max(0.0, nu[k] - step[k] * g);
            moved = moved || std::abs(next - nu[k]) > 1e-12 * (1.0 + nu[k]);
            nu[k] = next;
        }
        if (!moved)
            break;
    }
    return best;
}

struct SlotRates
{
    std::vector<double> rate; // raw, per user
    std::vector<Group> groups;
    double varrho = kVarrhoFloor;
};

SlotRates eval_slot(const Allocation &a, const GainTable &gt, std::size_t n, const std::vector<double> &w,
                    double sigma2, double p_max)
{
    SlotRates e;
    e.rate.assign(a.n_users, 0.0);
    e.groups = slot_groups(a, gt, n);
    e.varrho = waterfill_groups(e.groups, w, sigma2, p_max);
    for (const auto &g : e.groups)
        if (g.p > 0.0)
            e.rate[std::size_t(g.k)] += double(g.count) * std::log2(1.0 + g.p * g.g / sigma2);
    return e;
}

// First-improvement local search over schedules at fixed nu: single-subcarrier and
// whole-mode reassignments, and IRS-user switches. Each move re-water-fills one slot.
// On small instances a move that is infeasible at fixed nu is re-scored with a full fit;
// an improving fit ends the search and is returned through `jump`.
Allocation local_search(const Allocation &start, const GainTable &gt, const std::vector<double> &rmin,
                        const std::vector<double> &nu, double sigma2, double p_max, bool tdma, int max_passes,
                        bool refit_moves, int fit_iters, Fit &jump)
{
    const std::size_t K = start.n_users, NF = start.n_f, N = start.n_slots;
    std::vector<double> w(K);
    for (std::size_t k = 0; k < K; ++k)
        w[k] = (nu[k] + 1.0) / double(N);
    Allocation a = start;
    std::vector<SlotRates> slots(N);
    std::vector<double> user_raw(K, 0.0);
    for (std::size_t n = 0; n < N; ++n)
    {
        slots[n] = eval_slot(a, gt, n, w, sigma2, p_max);
        for (std::size_t k = 0; k < K; ++k)
            user_raw[k] += slots[n].rate[k] / double(N);
    }
    double objective = std::accumulate(user_raw.begin(), user_raw.end(), 0.0);
    if (!meets(user_raw, rmin, NF))
        return start;

    std::vector<int> row(NF);
    auto try_row = [&](std::size_t n, const std::vector<int> &cand, int kp) {
        std::vector<int> saved(a.user.begin() + long(n * NF), a.user.begin() + long((n + 1) * NF));
        const int saved_kp = a.irs[n];
        std::copy(cand.begin(), cand.end(), a.user.begin() + long(n * NF));
        a.irs[n] = kp;
        SlotRates e = eval_slot(a, gt, n, w, sigma2, p_max);
        std::vector<double> next = user_raw;
        for (std::size_t k = 0; k < K; ++k)
            next[k] += (e.rate[k] - slots[n].rate[k]) / double(N);
        const double obj = std::accumulate(next.begin(), next.end(), 0.0);
        if (meets(next, rmin, NF) && obj > objective + 1e-12 * std::max(1.0, objective))
        {
            user_raw = next;
            objective = obj;
            slots[n] = std::move(e);
            return true;
        }
        if (refit_moves && !meets(next, rmin, NF))
        {
            Fit f = fit_schedule(a, gt, rmin, sigma2, p_max, nu, fit_iters);
            if (f.feasible && f.objective > objective * (1.0 + 1e-12))
            {
                objective = f.objective;
                jump = std::move(f);
                return true;
            }
        }
        std::copy(saved.begin(), saved.end(), a.user.begin() + long(n * NF));
        a.irs[n] = saved_kp;
        return false;
    };

    auto eval_slot_row = [&](std::size_t n, const std::vector<int> &cand, int kp) {
        std::vector<int> saved(a.user.begin() + long(n * NF), a.user.begin() + long((n + 1) * NF));
        const int saved_kp = a.irs[n];
        std::copy(cand.begin(), cand.end(), a.user.begin() + long(n * NF));
        a.irs[n] = kp;
        SlotRates e = eval_slot(a, gt, n, w, sigma2, p_max);
        std::copy(saved.begin(), saved.end(), a.user.begin() + long(n * NF));
        a.irs[n] = saved_kp;
        return e;
    };

    for (int pass = 0; pass < max_passes && !jump.feasible; ++pass)
    {
        bool improved = false;
        for (std::size_t n = 0; n < N && !jump.feasible; ++n)
        {
            const int kp = a.irs[n];
            if (kp < 0)
                continue;
            // IRS switch keeping owners, then with owners re-picked for the new IRS user
            for (std::size_t q = 0; q < K; ++q)
            {
                if (int(q) == a.irs[n])
                    continue;
                std::copy(a.user.begin() + long(n * NF), a.user.begin() + long((n + 1) * NF), row.begin());
                if (try_row(n, row, int(q)))
                {
                    improved = true;
                    continue;
                }
                std::array<int, 4> owner{};
                for (int j = 0; j < 4; ++j)
                {
                    double bv = -kInf, p = 0.0;
                    for (std::size_t k = 0; k < K; ++k)
                    {
                        const double v = group_value(w[k], gt.at(n, k, q, j), slots[n].varrho, sigma2, p);
                        if (v > bv)
                            bv = v, owner[std::size_t(j)] = int(k);
                    }
                }
                if (tdma)
                    owner.fill(owner[std::size_t(gt.part.mode_of(0))]);
                for (std::size_t i = 0; i < NF; ++i)
                    row[i] = owner[std::size_t(gt.part.mode_of(i))];
                if (try_row(n, row, int(q)))
                {
                    improved = true;
                    continue;
                }
                // hand subcarriers of this slot to users short of their target, best gain ratio first
                for (std::size_t step = 0; step < NF && !tdma; ++step)
                {
                    std::vector<double> est = user_raw;
                    const SlotRates e = eval_slot_row(n, row, int(q));
                    for (std::size_t k = 0; k < K; ++k)
                        est[k] += (e.rate[k] - slots[n].rate[k]) / double(N);
                    std::size_t d = 0;
                    for (std::size_t k = 1; k < K; ++k)
                        if (rmin[k] - est[k] / double(NF) > rmin[d] - est[d] / double(NF))
                            d = k;
                    if (est[d] / double(NF) >= rmin[d])
                        break;
                    double best_ratio = 0.0;
                    std::size_t pick = NF;
                    for (std::size_t i = 0; i < NF; ++i)
                    {
                        const int o = row[i];
                        if (o == int(d))
                            continue;
                        const int j = gt.part.mode_of(i);
                        const double ratio = gt.at(n, d, q, j) / std::max(gt.at(n, std::size_t(o), q, j), 1e-300);
                        if (ratio > best_ratio)
                            best_ratio = ratio, pick = i;
                    }
                    if (pick == NF)
                        break;
                    row[pick] = int(d);
                    if (try_row(n, row, int(q)))
                    {
                        improved = true;
                        break;
                    }
                }
            }
            if (tdma)
            {
                for (std::size_t b = 0; b < K; ++b)
                {
                    if (a.user[n * NF] == int(b))
                        continue;
                    std::fill(row.begin(), row.end(), int(b));
                    improved = try_row(n, row, a.irs[n]) || improved;
                }
                continue;
            }
            for (int j = 0; j < 4; ++j)
            {
                if (gt.part.size(j) == 0)
                    continue;
                for (std::size_t from = 0; from < K; ++from)
                    for (std::size_t to = 0; to < K; ++to)
                    {
                        if (from == to)
                            continue;
                        // one subcarrier, then the whole mode block of `from`
                        for (int whole = 0; whole < 2; ++whole)
                        {
                            std::copy(a.user.begin() + long(n * NF), a.user.begin() + long((n + 1) * NF),
                                      row.begin());
                            bool any = false;
                            for (std::size_t i = gt.part.end[j]; i-- > gt.part.begin[j];)
                                if (row[i] == int(from))
                                {
                                    row[i] = int(to);
                                    any = true;
                                    if (!whole)
                                        break;
                                }
                            if (any && try_row(n, row, a.irs[n]))
                                improved = true;
                        }
                    }
            }
        }
        if (!improved)
            break;
    }
    std::vector<double> varrho;
    std::vector<std::vector<Group>> groups(N);
    for (std::size_t n = 0; n < N; ++n)
        groups[n] = slot_groups(a, gt, n);
    fill_schedule(a, groups, gt, nu, sigma2, p_max, varrho);
    return a;
}

std::size_t schedule_hash(const Allocation &a)
{
    std::size_t h = 1469598103934665603ull;
    auto mix = [&h](int v) { h = (h ^ std::size_t(v + 2)) * 1099511628211ull; };
    for (int v : a.irs)
        mix(v);
    for (int v : a.user)
        mix(v);
    return h;
}

} // namespace

GainTable make_gain_table(const std::vector<Vec3> &positions, const ModePartition &part, const Scenario &sc,
                          Bound bound)
{
    GainTable gt;
    gt.n_users = sc.n_users();
    gt.n_slots = positions.size();
    gt.part = part;
    const std::size_t K = gt.n_users;
    gt.g.assign(gt.n_slots * K * K * 4, 0.0);
    std::vector<LinkCoeffs> coeffs(K * K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t kp = 0; kp < K; ++kp)
            coeffs[k * K + kp] = link_coeffs(k, kp, part.alpha, sc);
    for (std::size_t n = 0; n < gt.n_slots; ++n)
    {
        const double d_ur = dist(positions[n], sc.irs.location);
        for (std::size_t k = 0; k < K; ++k)
        {
            const double v_ug = std::pow(dist(positions[n], sc.users[k].location), sc.users[k].alpha_ug);
            for (std::size_t kp = 0; kp < K; ++kp)
            {
                const LinkCoeffs &c = coeffs[k * K + kp];
                for (int j = 0; j < 4; ++j)
                {
                    const int jj = k == kp ? j : (bound == Bound::Lower ? 3 : 0);
                    gt.at(n, k, kp, j) = closed_form_gain(c.a, c.b, c.cross(bound, jj), v_ug, d_ur * d_ur);
                }
            }
        }
    }
    return gt;
}

double Allocation::slot_power(std::size_t n) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < n_f; ++i)
        s += power[n * n_f + i];
    return s;
}

DualState::DualState(std::size_t k, std::size_t nf, std::size_t n)
    : n_users(k), n_f(nf), n_slots(n), zeta(nf * n, 0.0), varrho(n, 0.0), gamma(n, 0.0), nu(k, 0.0),
      varsigma(k * k * nf * n, 0.0), varpi(k * k * nf * n, 0.0), xi(k * k * nf * n, 0.0)
{
}

bool DualState::coupling_active(std::size_t n) const
{
    const std::size_t lo = idx4(0, 0, 0, n), hi = idx4(0, 0, 0, n) + n_users * n_users * n_f;
    for (std::size_t a = lo; a < hi; ++a)
        if (varsigma[a] != 0.0 || varpi[a] != 0.0 || xi[a] != 0.0)
            return true;
    return false;
}

double waterfill_power(double nu_k, double varrho_n, double gain, double sigma2, std::size_t n_slots)
{
    if (varrho_n == 0.0)
        throw ZeroDual("power multiplier is zero; water level undefined");
    return std::max(0.0, (nu_k + 1.0) / (varrho_n * kLn2 * double(n_slots)) - sigma2 / gain);
}

double marginal_bracket(double x)
{
    return std::log2(1.0 + x) - x / ((1.0 + x) * kLn2);
}

Marginals marginals(const DualState &dual, const GainTable &gains, double sigma2)
{
    const std::size_t K = dual.n_users, NF = dual.n_f, N = dual.n_slots;
    Marginals m;
    m.m_u.assign(K * NF * N, 0.0);
    m.m_t.assign(K * K * NF * N, 0.0);
    m.p_star.assign(K * K * NF * N, 0.0);
    m.m_s.assign(K * N, 0.0);
    for (std::size_t n = 0; n < N; ++n)
    {
        for (std::size_t kp = 0; kp < K; ++kp)
            m.m_s[n * K + kp] = -dual.gamma[n];
        for (std::size_t i = 0; i < NF; ++i)
            for (std::size_t k = 0; k < K; ++k)
            {
                double mu = -dual.zeta[n * NF + i];
                for (std::size_t kp = 0; kp < K; ++kp)
                {
                    const std::size_t a = dual.idx4(k, kp, i, n);
                    mu += dual.varpi[a] - dual.xi[a];
                    m.m_s[n * K + kp] += dual.varsigma[a] - dual.xi[a];
                    const double g = gains.sub(n, k, kp, i);
                    const double p = g > 0.0 ? waterfill_power(dual.nu[k], std::max(dual.varrho[n], kVarrhoFloor), g,
                                                               sigma2, N)
                                             : 0.0;
                    m.p_star[a] = p;
                    m.m_t[a] = (dual.nu[k] + 1.0) / double(N) * marginal_bracket(p * g / sigma2) - dual.varsigma[a] -
                               dual.varpi[a] + dual.xi[a];
                }
                m.m_u[(n * NF + i) * K + k] = mu;
            }
    }
    return m;
}

Allocation binary_update(const Marginals &m, std::size_t K, std::size_t NF, std::size_t N, bool tdma)
{
    Allocation a(K, NF, N);
    auto mt = [&](std::size_t k, std::size_t kp, std::size_t i, std::size_t n) {
        return m.m_t[((n * NF + i) * K + k) * K + kp] + m.m_u[(n * NF + i) * K + k];
    };
    for (std::size_t n = 0; n < N; ++n)
    {
        double best = -kInf;
        for (std::size_t kp = 0; kp < K; ++kp)
        {
            if (tdma)
            {
                for (std::size_t k = 0; k < K; ++k)
                {
                    double total = m.m_s[n * K + kp];
                    for (std::size_t i = 0; i < NF; ++i)
                        total += mt(k, kp, i, n);
                    if (total > best)
                    {
                        best = total;
                        a.irs[n] = int(kp);
                        for (std::size_t i = 0; i < NF; ++i)
                            a.user[n * NF + i] = int(k);
                    }
                }
                continue;
            }
            double total = m.m_s[n * K + kp];
            for (std::size_t i = 0; i < NF; ++i)
            {
                double bv = -kInf;
                for (std::size_t k = 0; k < K; ++k)
                    bv = std::max(bv, mt(k, kp, i, n));
                total += bv;
            }
            if (total > best)
            {
                best = total;
                a.irs[n] = int(kp);
            }
        }
        if (tdma)
            continue;
        const std::size_t kp = std::size_t(a.irs[n]);
        for (std::size_t i = 0; i < NF; ++i)
        {
            double bv = -kInf;
            for (std::size_t k = 0; k < K; ++k)
                if (mt(k, kp, i, n) > bv)
                {
                    bv = mt(k, kp, i, n);
                    a.user[n * NF + i] = int(k);
                }
        }
    }
    return a;
}

DualState dual_update(const DualState &state, const Allocation &primal, const std::vector<double> &user_rates,
                      const std::vector<double> &r_min, double p_max, const StepSizes &tau)
{
    DualState d = state;
    const std::size_t K = d.n_users, NF = d.n_f, N = d.n_slots;
    for (std::size_t k = 0; k < K; ++k)
        d.nu[k] = std::max(0.0, d.nu[k] - tau.nu * (user_rates[k] - r_min[k]));
    for (std::size_t n = 0; n < N; ++n)
        d.varrho[n] = std::max(0.0, d.varrho[n] - tau.varrho * (p_max - primal.slot_power(n)));
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < NF; ++i)
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t kp = 0; kp < K; ++kp)
                {
                    const std::size_t a = d.idx4(k, kp, i, n);
                    const double u = primal.u(k, i, n), s = primal.s(kp, n), t = primal.t(k, kp, i, n);
                    d.varsigma[a] = std::max(0.0, d.varsigma[a] - tau.varsigma * (s - t));
                    d.varpi[a] = std::max(0.0, d.varpi[a] - tau.varpi * (u - t));
                    d.xi[a] = std::max(0.0, d.xi[a] - tau.xi * (1.0 + t - u - s));
                }
    return d;
}

AllocationRates evaluate_allocation(const Allocation &a, const GainTable &gains, double sigma2)
{
    AllocationRates r;
    r.user_raw.assign(a.n_users, 0.0);
    for (std::size_t n = 0; n < a.n_slots; ++n)
    {
        const int kp = a.irs[n];
        if (kp < 0)
            continue;
        for (std::size_t i = 0; i < a.n_f; ++i)
        {
            const int k = a.user[n * a.n_f + i];
            const double p = a.power[n * a.n_f + i];
            if (k < 0 || p <= 0.0)
                continue;
            const double g = gains.sub(n, std::size_t(k), std::size_t(kp), i);
            r.user_raw[std::size_t(k)] += lb_rate(1.0, p, g, sigma2);
        }
    }
    for (auto &v : r.user_raw)
    {
        v /= double(a.n_slots);
        r.objective += v;
    }
    return r;
}

std::vector<double> effective_rmin(const Scenario &sc, double scale)
{
    std::vector<double> r(sc.n_users());
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = sc.users[k].r_min * scale;
    return r;
}

double waterfill_kkt_residual(const RaResult &res, const GainTable &gains, double sigma2, double p_max)
{
    const Allocation &a = res.alloc;
    double worst = 0.0;
    for (std::size_t n = 0; n < a.n_slots; ++n)
    {
        const int kp = a.irs[n];
        if (kp < 0)
            continue;
        bool any = false;
        for (std::size_t i = 0; i < a.n_f; ++i)
        {
            const int k = a.user[n * a.n_f + i];
            if (k < 0)
                continue;
            const double g = gains.sub(n, std::size_t(k), std::size_t(kp), i);
            const double p = a.power[n * a.n_f + i];
            if (g <= 0.0)
            {
                worst = std::max(worst, std::abs(p));
                continue;
            }
            any = true;
            const double level = (res.dual.nu[std::size_t(k)] + 1.0) / (res.dual.varrho[n] * kLn2 * double(a.n_slots));
            if (p > 0.0)
                worst = std::max(worst, std::abs(level - sigma2 / g - p));
            else
                worst = std::max(worst, std::max(0.0, level - sigma2 / g));
        }
        if (any)
            worst = std::max(worst, std::abs(a.slot_power(n) - p_max) / std::max(1.0, p_max));
    }
    return worst;
}

RaResult solve_subproblem1(const std::vector<Vec3> &positions, const ModePartition &part, const Scenario &sc,
                           const RaOptions &opts)
{
    return solve_subproblem1(make_gain_table(positions, part, sc, opts.bound), sc, opts);
}

RaResult solve_subproblem1(const GainTable &gt, const Scenario &sc, const RaOptions &opts)
{
    const std::size_t K = gt.n_users, NF = gt.part.n_f, N = gt.n_slots;
    const double sigma2 = sc.ofdm.sigma2();
    const double p_max = sc.ofdm.p_max;
    const std::vector<double> rmin = effective_rmin(sc, opts.rmin_scale);

    std::vector<double> nu(K, 0.0), w(K);
    struct Candidate
    {
        std::size_t hash;
        double score; // objective if feasible, -deficit otherwise
        bool feasible;
        Allocation alloc;
        std::vector<double> nu;
    };
    std::vector<Candidate> cands;
    const std::size_t keep = 8;

    Allocation cur(K, NF, N);
    std::vector<std::vector<Group>> groups(N);
    std::vector<double> varrho;
    double dual_best = kInf, primal_best = -kInf;
    int iterations = 0;
    for (int l = 1; l <= opts.max_outer; ++l)
    {
        iterations = l;
        for (std::size_t k = 0; k < K; ++k)
            w[k] = (nu[k] + 1.0) / double(N);
        for (std::size_t n = 0; n < N; ++n)
        {
            const SlotPick pk = solve_slot(gt, n, w, sigma2, p_max, opts.tdma);
            cur.irs[n] = pk.kp;
            for (std::size_t i = 0; i < NF; ++i)
                cur.user[n * NF + i] = pk.k_of_mode[std::size_t(gt.part.mode_of(i))];
            groups[n] = slot_groups(cur, gt, n);
        }
        fill_schedule(cur, groups, gt, nu, sigma2, p_max, varrho);
        const AllocationRates r = evaluate_allocation(cur, gt, sigma2);
        const bool ok = meets(r.user_raw, rmin, NF);
        double lagr = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            lagr += (nu[k] + 1.0) * r.user_raw[k] - nu[k] * double(NF) * rmin[k];
        dual_best = std::min(dual_best, lagr);

        const double score = ok ? r.objective : -max_deficit(r.user_raw, rmin, NF);
        const std::size_t h = schedule_hash(cur);
        auto it = std::find_if(cands.begin(), cands.end(), [h](const Candidate &c) { return c.hash == h; });
        if (it == cands.end())
        {
            cands.push_back({h, score, ok, cur, nu});
            std::stable_sort(cands.begin(), cands.end(), [](const Candidate &x, const Candidate &y) {
                if (x.feasible != y.feasible)
                    return x.feasible;
                return x.score > y.score;
            });
            if (cands.size() > keep)
                cands.pop_back();
        }
        if (ok)
            primal_best = std::max(primal_best, r.objective);

        bool all_zero = true;
        for (double v : nu)
            all_zero = all_zero && v == 0.0;
        if (ok && all_zero)
            break;
        if (ok && primal_best > 0.0 && (dual_best - primal_best) / primal_best < opts.gap_tol)
            break;

        const double tau = opts.tau0 / std::sqrt(double(l));
        bool capped = false;
        for (std::size_t k = 0; k < K; ++k)
        {
            nu[k] = std::max(0.0, nu[k] - tau * (r.user_raw[k] / double(NF) - rmin[k]));
            capped = capped || nu[k] > opts.nu_cap;
        }
        if (capped)
            break;
    }

    Fit best;
    for (const auto &c : cands)
    {
        Fit f = fit_schedule(c.alloc, gt, rmin, sigma2, p_max, c.nu, opts.polish_iters);
        if ((f.feasible && (!best.feasible || f.objective > best.objective)) ||
            (!best.feasible && !f.feasible && f.deficit < best.deficit))
            best = std::move(f);
    }

    // Greedy repair: hand subcarriers to the most deficient user until the targets are met.
    for (int round = 0; round < 60 && !best.feasible && !cands.empty(); ++round)
    {
        Allocation sched = best.alloc;
        std::vector<double> r(K);
        std::size_t worst = 0;
        for (std::size_t k = 0; k < K; ++k)
        {
            r[k] = best.user_raw[k] / double(NF);
            if (rmin[k] - r[k] > rmin[worst] - r[worst])
                worst = k;
        }
        const double need = (rmin[worst] - r[worst]) * double(NF) * double(N) * 1.25;
        struct Move
        {
            double score, est;
            std::size_t n, i;
        };
        std::vector<Move> moves;
        const double p_each = p_max / double(NF);
        for (std::size_t n = 0; n < N && opts.tdma; ++n)
        {
            const int owner = sched.user[n * NF];
            if (owner == int(worst) || (owner >= 0 && r[std::size_t(owner)] <= rmin[std::size_t(owner)]))
                continue;
            double est = 0.0, loss = 0.0;
            for (std::size_t i = 0; i < NF; ++i)
            {
                est += std::log2(1.0 + p_each * gt.sub(n, worst, std::size_t(sched.irs[n]), i) / sigma2);
                if (owner >= 0)
                    loss += std::log2(1.0 + p_each * gt.sub(n, std::size_t(owner), std::size_t(sched.irs[n]), i) / sigma2);
            }
            if (est > 0.0)
                moves.push_back({est / (loss + 1e-9), est, n, NF});
        }
        for (std::size_t n = 0; n < N && !opts.tdma; ++n)
            for (std::size_t i = 0; i < NF; ++i)
            {
                const int owner = sched.user[n * NF + i];
                if (owner == int(worst))
                    continue;
                const double g = gt.sub(n, worst, std::size_t(sched.irs[n]), i);
                const double est = std::log2(1.0 + p_each * g / sigma2);
                if (est <= 0.0)
                    continue;
                double loss = 0.0;
                if (owner >= 0)
                {
                    const auto o = std::size_t(owner);
                    if (r[o] <= rmin[o])
                        continue;
                    loss = std::log2(1.0 + p_each * gt.sub(n, o, std::size_t(sched.irs[n]), i) / sigma2);
                }
                moves.push_back({est / (loss + 1e-9), est, n, i});
            }
        if (moves.empty())
            break;
        std::stable_sort(moves.begin(), moves.end(), [](const Move &a, const Move &b) { return a.score > b.score; });
        double got = 0.0;
        for (const auto &mv : moves)
        {
            if (mv.i == NF)
                std::fill(sched.user.begin() + long(mv.n * NF), sched.user.begin() + long((mv.n + 1) * NF), int(worst));
            else
                sched.user[mv.n * NF + mv.i] = int(worst);
            got += mv.est;
            if (got >= need)
                break;
        }
        Fit f = fit_schedule(sched, gt, rmin, sigma2, p_max, best.nu, opts.polish_iters);
        if (!f.feasible && f.deficit >= best.deficit - 1e-12)
        {
            best.alloc = sched; // keep moving even without visible progress
            best.user_raw = f.user_raw;
            continue;
        }
        best = std::move(f);
    }

    if (!best.feasible)
        throw Infeasible("minimum-rate constraints cannot be met for this trajectory");

    const bool refit_moves = K * NF * N <= std::size_t(opts.refit_cells);
    for (int round = 0; round < opts.search_rounds; ++round)
    {
        Fit jump;
        const Allocation moved = local_search(best.alloc, gt, rmin, best.nu, sigma2, p_max, opts.tdma,
                                              opts.search_passes, refit_moves, opts.polish_iters, jump);
        Fit f = jump.feasible ? std::move(jump)
                              : fit_schedule(moved, gt, rmin, sigma2, p_max, best.nu, opts.polish_iters);
        if (!f.feasible || f.objective <= best.objective * (1.0 + 1e-12))
            break;
        best = std::move(f);
    }

    RaResult res;
    res.alloc = std::move(best.alloc);
    res.dual = DualState(K, NF, N);
    res.dual.nu = best.nu;
    res.dual.varrho = best.varrho;
    res.objective = best.objective;
    res.objective_normalized = best.objective / double(NF);
    res.user_rates.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        res.user_rates[k] = best.user_raw[k] / double(NF);
    res.gap = best.objective > 0.0 ? std::max(0.0, (dual_best - best.objective) / best.objective) : 0.0;
    res.iterations = iterations;
    return res;
}

} // namespace irsuav
