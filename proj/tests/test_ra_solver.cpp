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

#include "irsuav/errors.hpp"
#include "irsuav/ra_solver.hpp"
#include "irsuav/trajectory_solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace irsuav;
using std::numbers::ln2;

namespace
{

Scenario small_scenario(std::size_t K, std::size_t NF, double r_min)
{
    Scenario sc = desk_scenario();
    sc.users.resize(K);
    for (auto &u : sc.users)
        u.r_min = r_min;
    sc.ofdm.n_f = NF;
    sc.uav.n_slots = 1;
    return sc;
}

// Random gains with SNR p_max g / sigma2 spread over two decades around `snr`.
GainTable random_table(std::mt19937_64 &rng, std::size_t K, std::size_t N, const ModePartition &part,
                       const Scenario &sc, double snr)
{
    GainTable gt = testing::manual_table(K, N, part);
    std::uniform_real_distribution<double> e(-1.0, 1.0);
    for (auto &g : gt.g)
        g = snr * std::pow(10.0, e(rng)) * sc.ofdm.sigma2() / sc.ofdm.p_max;
    return gt;
}

void check_constraints(const RaResult &r, const Scenario &sc, double scale = 1.0)
{
    const Allocation &a = r.alloc;
    for (std::size_t n = 0; n < a.n_slots; ++n)
    {
        int s_count = 0;
        for (std::size_t k = 0; k < a.n_users; ++k)
            s_count += a.s(k, n);
        CHECK(s_count <= 1);
        CHECK(a.slot_power(n) <= sc.ofdm.p_max * (1.0 + 1e-9));
        for (std::size_t i = 0; i < a.n_f; ++i)
        {
            int u_count = 0;
            for (std::size_t k = 0; k < a.n_users; ++k)
            {
                u_count += a.u(k, i, n);
                for (std::size_t kp = 0; kp < a.n_users; ++kp)
                {
                    CHECK(a.t(k, kp, i, n) == (a.u(k, i, n) & a.s(kp, n)));
                    if (!a.t(k, kp, i, n))
                        CHECK(a.p_tilde(k, kp, i, n) == 0.0);
                }
            }
            CHECK(u_count <= 1);
            CHECK(a.power[n * a.n_f + i] >= 0.0);
            if (a.user[n * a.n_f + i] < 0 || a.irs[n] < 0)
                CHECK(a.power[n * a.n_f + i] == 0.0);
        }
    }
    for (std::size_t k = 0; k < a.n_users; ++k)
        CHECK(r.user_rates[k] >= sc.users[k].r_min * scale - 1e-6);
}

} // namespace

TEST_CASE("water-filling level")
{
    CHECK(waterfill_power(0.0, 1.0 / ln2, 2.0, 1.0, 1) == doctest::Approx(0.5));
    CHECK(waterfill_power(0.0, 10.0, 0.01, 1.0, 1) == 0.0);
    CHECK(waterfill_power(3.0, 1.0 / ln2, 2.0, 1.0, 2) == doctest::Approx(2.0 - 0.5));
    CHECK_THROWS_AS(waterfill_power(0.0, 0.0, 1.0, 1.0, 1), ZeroDual);
}

TEST_CASE("marginal bracket is non-negative and increasing")
{
    double prev = 0.0;
    CHECK(marginal_bracket(0.0) == 0.0);
    for (double x = 1e-6; x < 1e4; x *= 1.1)
    {
        const double b = marginal_bracket(x);
        CHECK(b >= 0.0);
        CHECK(b >= prev);
        prev = b;
    }
}

TEST_CASE("marginals at zero duals")
{
    const auto part = mode_partition(0.125, 8);
    GainTable gt = testing::manual_table(1, 1, part);
    for (auto &g : gt.g)
        g = 1.0;
    DualState d(1, 8, 1);
    d.varrho[0] = 1.0 / (2.0 * ln2); // p* = 1 with g = sigma2 = 1
    const Marginals m = marginals(d, gt, 1.0);
    for (std::size_t i = 0; i < 8; ++i)
    {
        CHECK(m.p_star[d.idx4(0, 0, i, 0)] == doctest::Approx(1.0));
        CHECK(m.m_t[d.idx4(0, 0, i, 0)] == doctest::Approx(1.0 - 1.0 / (2.0 * ln2)));
    }
    d.varrho[0] = 1e6; // level below the floor
    const Marginals z = marginals(d, gt, 1.0);
    CHECK(z.p_star[0] == 0.0);
    CHECK(z.m_t[0] == 0.0);
}

TEST_CASE("binary update selects the dominant pair and breaks ties low")
{
    const std::size_t K = 3, NF = 5, N = 2;
    Marginals m;
    m.m_u.assign(K * NF * N, 0.0);
    m.m_t.assign(K * K * NF * N, 0.0);
    m.m_s.assign(K * N, 0.0);
    Allocation a = binary_update(m, K, NF, N);
    for (std::size_t n = 0; n < N; ++n)
    {
        CHECK(a.irs[n] == 0);
        for (std::size_t i = 0; i < NF; ++i)
            CHECK(a.user[n * NF + i] == 0);
    }
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < NF; ++i)
            m.m_t[((n * NF + i) * K + 2) * K + 1] = 1.0;
    a = binary_update(m, K, NF, N);
    for (std::size_t n = 0; n < N; ++n)
    {
        CHECK(a.irs[n] == 1);
        for (std::size_t i = 0; i < NF; ++i)
            CHECK(a.user[n * NF + i] == 2);
    }
    a = binary_update(m, K, NF, N, true);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < NF; ++i)
            CHECK(a.user[n * NF + i] == 2);
}

TEST_CASE("dual update signs")
{
    DualState d(2, 4, 1);
    d.nu = {1.0, 1.0};
    d.varrho = {2.0};
    Allocation a(2, 4, 1);
    a.irs[0] = 0;
    for (std::size_t i = 0; i < 4; ++i)
        a.user[i] = 0, a.power[i] = 0.1;
    StepSizes tau;
    tau.nu = 0.5;
    tau.varrho = 0.5;
    const DualState e = dual_update(d, a, {2.0, 0.25}, {1.0, 1.0}, 1.0, tau);
    CHECK(e.nu[0] == doctest::Approx(0.5));  // slack: decreases
    CHECK(e.nu[1] == doctest::Approx(1.375)); // deficit 0.75: increases by tau * 0.75
    CHECK(e.varrho[0] == doctest::Approx(2.0 - 0.5 * 0.6));
    CHECK(e.zeta == d.zeta);
    CHECK(e.gamma == d.gamma);
    for (double v : e.xi)
        CHECK(v >= 0.0);
}

TEST_CASE("single user reduces to classical water-filling")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial)
    {
        const std::size_t NF = 8, N = 3;
        Scenario sc = small_scenario(1, NF, 0.0);
        sc.uav.n_slots = N;
        const auto part = mode_partition(0.125, NF);
        const GainTable gt = random_table(rng, 1, N, part, sc, 50.0);
        const RaResult r = solve_subproblem1(gt, sc);
        double expect = 0.0;
        for (std::size_t n = 0; n < N; ++n)
        {
            std::vector<double> floor(NF), w(NF, 1.0);
            for (std::size_t i = 0; i < NF; ++i)
                floor[i] = sc.ofdm.sigma2() / gt.sub(n, 0, 0, i);
            const auto p = testing::waterfill(floor, w, sc.ofdm.p_max);
            for (std::size_t i = 0; i < NF; ++i)
                expect += std::log2(1.0 + p[i] / floor[i]);
        }
        expect /= double(N);
        CHECK(r.objective == doctest::Approx(expect).epsilon(1e-6));
        for (std::size_t n = 0; n < N; ++n)
            CHECK(r.alloc.irs[n] == 0);
        check_constraints(r, sc);
    }
}

TEST_CASE("zero power budget")
{
    std::mt19937_64 rng(43);
    Scenario sc = small_scenario(2, 4, 0.0);
    const GainTable gt = random_table(rng, 2, 1, mode_partition(0.125, 4), sc, 10.0);
    sc.ofdm.p_max = 0.0;
    CHECK(solve_subproblem1(gt, sc).objective == 0.0);
    sc.users[0].r_min = 0.1;
    CHECK_THROWS_AS(solve_subproblem1(gt, sc), Infeasible);
}

TEST_CASE("two users, two subcarriers: power-split grid oracle")
{
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 10; ++trial)
    {
        Scenario sc = small_scenario(2, 2, 0.0);
        const auto part = testing::singleton_modes(2);
        const GainTable gt = random_table(rng, 2, 1, part, sc, 30.0);
        const double s2 = sc.ofdm.sigma2(), P = sc.ofdm.p_max;
        double best = 0.0;
        for (std::size_t kp = 0; kp < 2; ++kp)
            for (std::size_t k0 = 0; k0 < 2; ++k0)
                for (std::size_t k1 = 0; k1 < 2; ++k1)
                    for (int s = 0; s <= 1000; ++s)
                    {
                        const double p0 = P * s / 1000.0, p1 = P - p0;
                        best = std::max(best, std::log2(1 + p0 * gt.sub(0, k0, kp, 0) / s2) +
                                                  std::log2(1 + p1 * gt.sub(0, k1, kp, 1) / s2));
                    }
        const RaResult r = solve_subproblem1(gt, sc);
        CHECK(std::abs(r.objective - best) <= 1e-2);
        CHECK(r.objective >= best - 1e-9);
    }
}

TEST_CASE("two users, four subcarriers: enumeration oracle with minimum rates")
{
    std::mt19937_64 rng(47);
    int feasible = 0;
    for (int trial = 0; trial < 20; ++trial)
    {
        Scenario sc = small_scenario(2, 4, 0.8);
        const auto part = testing::singleton_modes(4);
        const GainTable gt = random_table(rng, 2, 1, part, sc, 20.0);
        const std::vector<double> target = {0.8 * 4, 0.8 * 4};
        const auto oracle = testing::enumerate_slot(gt, sc.ofdm.sigma2(), sc.ofdm.p_max, target);
        if (oracle.objective < 0.0)
        {
            CHECK_THROWS_AS(solve_subproblem1(gt, sc), Infeasible);
            continue;
        }
        ++feasible;
        const RaResult r = solve_subproblem1(gt, sc);
        CHECK(r.objective >= 0.98 * oracle.objective);
        CHECK(r.objective <= oracle.objective * (1.0 + 1e-6));
        check_constraints(r, sc);
    }
    CHECK(feasible >= 10);
}

TEST_CASE("returned allocations meet every constraint and the water-filling KKT system")
{
    std::mt19937_64 rng(49);
    for (int trial = 0; trial < 8; ++trial)
    {
        Scenario sc = testing::random_scenario(rng, 3, 16, 32, 8);
        const Trajectory t = Trajectory::straight_line(sc.uav);
        const auto part = mode_partition(0.14, 32);
        for (bool tdma : {false, true})
        {
            RaOptions o;
            o.tdma = tdma;
            const GainTable gt = make_gain_table(t.positions, part, sc, Bound::Lower);
            RaResult r;
            try
            {
                r = solve_subproblem1(gt, sc, o);
            }
            catch (const Infeasible &)
            {
                continue;
            }
            check_constraints(r, sc);
            CHECK(waterfill_kkt_residual(r, gt, sc.ofdm.sigma2(), sc.ofdm.p_max) < 1e-9);
            if (tdma)
                for (std::size_t n = 0; n < r.alloc.n_slots; ++n)
                    for (std::size_t i = 1; i < r.alloc.n_f; ++i)
                        CHECK(r.alloc.user[n * r.alloc.n_f + i] == r.alloc.user[n * r.alloc.n_f]);
        }
    }
}

TEST_CASE("stationarity of returned powers")
{
    std::mt19937_64 rng(51);
    Scenario sc = testing::random_scenario(rng, 3, 16, 32, 6);
    const auto part = mode_partition(0.14, 32);
    const GainTable gt = make_gain_table(Trajectory::straight_line(sc.uav).positions, part, sc, Bound::Lower);
    const RaResult r = solve_subproblem1(gt, sc);
    const Allocation &a = r.alloc;
    for (std::size_t n = 0; n < a.n_slots; ++n)
        for (std::size_t i = 0; i < a.n_f; ++i)
        {
            const double p = a.power[n * a.n_f + i];
            if (p <= 0.0)
                continue;
            const auto k = std::size_t(a.user[n * a.n_f + i]);
            const double g = gt.sub(n, k, std::size_t(a.irs[n]), i);
            const double level = (r.dual.nu[k] + 1.0) / (r.dual.varrho[n] * ln2 * double(a.n_slots));
            CHECK(std::abs(level - sc.ofdm.sigma2() / g - p) < 1e-9);
            CHECK(waterfill_power(r.dual.nu[k], r.dual.varrho[n], g, sc.ofdm.sigma2(), a.n_slots) ==
                  doctest::Approx(p).epsilon(1e-9));
        }
}

TEST_CASE("minimum-rate infeasibility is reported")
{
    Scenario sc = small_scenario(2, 4, 50.0);
    std::mt19937_64 rng(53);
    const GainTable gt = random_table(rng, 2, 1, mode_partition(0.125, 4), sc, 10.0);
    CHECK_THROWS_AS(solve_subproblem1(gt, sc), Infeasible);
}
