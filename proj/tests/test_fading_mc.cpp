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

#include "irsuav/channel.hpp"
#include "irsuav/fading_mc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace irsuav;

namespace
{

Scenario fading_scenario()
{
    Scenario sc = desk_scenario();
    sc.irs.m_r = sc.irs.m_c = 8;
    sc.ofdm.n_f = 16;
    sc.uav.n_slots = 40;
    for (auto &u : sc.users)
        u.r_min = 0.1;
    return sc;
}

} // namespace

TEST_CASE("keyed generator depends only on its key")
{
    KeyedRng a(7, 1, 2, 3, 0), b(7, 1, 2, 3, 0), c(7, 1, 2, 4, 0), d(8, 1, 2, 3, 0);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
    const FadingDraw f = make_draw(11, 0), g = make_draw(11, 0), h = make_draw(11, 1);
    CHECK(f.scatter_ug(0, 5, 2) == g.scatter_ug(0, 5, 2));
    CHECK(f.scatter_ug(0, 5, 2) != h.scatter_ug(0, 5, 2));
    // order of queries is irrelevant
    const auto late = f.scatter_rg(1, 3, 4, 16);
    (void)f.scatter_ug(2, 0, 0);
    CHECK(late == f.scatter_rg(1, 3, 4, 16));
}

TEST_CASE("complex Gaussian draws have unit variance and zero mean")
{
    KeyedRng rng(3, 0, 0, 0, 9);
    const int n = 200000;
    std::complex<double> mean;
    double power = 0.0, re2 = 0.0;
    for (int t = 0; t < n; ++t)
    {
        const auto z = draw_cn(rng);
        mean += z;
        power += std::norm(z);
        re2 += z.real() * z.real();
    }
    CHECK(std::abs(mean / double(n)) < 0.01);
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("pure line-of-sight limit reproduces the deterministic channel")
{
    Scenario sc = fading_scenario();
    for (auto &u : sc.users)
        u.kappa_ug = u.kappa_rg = std::numeric_limits<double>::infinity();
    const FadingDraw d = make_draw(5, 0);
    const Vec3 q{150.0, 260.0, 110.0};
    for (std::size_t k = 0; k < sc.n_users(); ++k)
        for (std::size_t i = 0; i < sc.ofdm.n_f; ++i)
            CHECK(sample_composite_channel(d, k, 0, i, 0, q, sc) == los_composite_channel(k, 0, i, q, sc));
}

TEST_CASE("mean received power is LoS power plus scattering variance")
{
    Scenario sc = desk_scenario();
    sc.users[1].kappa_ug = std::pow(10.0, 0.3);
    sc.users[1].kappa_rg = std::pow(10.0, 0.2);
    const Vec3 q{240.0, 300.0, 100.0};
    for (ScatterPath path : {ScatterPath::Aggregate, ScatterPath::PerPru})
    {
        Scenario s = sc;
        if (path == ScatterPath::PerPru)
            s.irs.m_r = s.irs.m_c = 8;
        const std::size_t k = 1, i = 37;
        const double los = los_composite_gain(k, 0, i, q, s);
        const int draws = 100000;
        double acc = 0.0;
        for (int l = 0; l < draws; ++l)
            acc += std::norm(sample_composite_channel(make_draw(17, std::uint64_t(l)), k, 0, i, 0, q, s, path));
        const double expect = los + scattering_variance(k, q, s);
        CHECK(acc / draws == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("per-element and aggregated reflected scatter share one law")
{
    Scenario sc = fading_scenario();
    sc.irs.amplitude_a = 1.0;
    for (auto &u : sc.users)
        u.kappa_ug = std::numeric_limits<double>::infinity(), u.kappa_rg = 0.0;
    const Vec3 q{120.0, 330.0, 100.0};
    const std::size_t k = 2, i = 3;
    const auto los = los_composite_channel(k, 0, i, q, sc);
    const int draws = 40000;
    std::vector<double> a, b;
    for (int l = 0; l < draws; ++l)
    {
        const FadingDraw d = make_draw(23, std::uint64_t(l));
        a.push_back(std::norm(sample_composite_channel(d, k, 0, i, 0, q, sc, ScatterPath::PerPru) - los));
        b.push_back(std::norm(sample_composite_channel(d, k, 0, i, 0, q, sc, ScatterPath::Aggregate) - los));
    }
    const double var = scattering_variance(k, q, sc);
    double ma = 0.0, mb = 0.0;
    for (int l = 0; l < draws; ++l)
        ma += a[l], mb += b[l];
    CHECK(ma / draws == doctest::Approx(var).epsilon(0.03));
    CHECK(mb / draws == doctest::Approx(var).epsilon(0.03));
    // both are exponential with mean var: compare quartiles
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (double p : {0.25, 0.5, 0.75})
    {
        const double want = -std::log(1.0 - p) * var;
        CHECK(a[std::size_t(p * draws)] == doctest::Approx(want).epsilon(0.05));
        CHECK(b[std::size_t(p * draws)] == doctest::Approx(want).epsilon(0.05));
    }
}

TEST_CASE("Rayleigh limit passes a Kolmogorov-Smirnov test")
{
    Scenario sc = desk_scenario();
    sc.irs.amplitude_a = 0.0;
    sc.users[0].kappa_ug = 0.0;
    const Vec3 q{100.0, 100.0, 100.0};
    const double mean = sc.ofdm.beta0 / std::pow(dist(q, sc.users[0].location), sc.users[0].alpha_ug);
    const int n = 5000;
    std::vector<double> x;
    for (int l = 0; l < n; ++l)
        x.push_back(std::norm(sample_composite_channel(make_draw(29, std::uint64_t(l)), 0, 0, 4, 1, q, sc)));
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (int j = 0; j < n; ++j)
    {
        const double f = 1.0 - std::exp(-x[j] / mean);
        d = std::max({d, f - double(j) / n, double(j + 1) / n - f});
    }
    CHECK(d < 1.628 / std::sqrt(double(n)));
}

TEST_CASE("outage rate examples")
{
    const std::vector<double> los{1.0, 2.0, 3.0, 4.0};
    CHECK(individual_outage_rate(0.8, los, {1.0, 2.0, 3.0, 4.0}, 2) == doctest::Approx(0.8 * 10.0 / 2.0));
    CHECK(individual_outage_rate(0.8, los, {0.0, 0.0, 0.0, 0.0}, 2) == 0.0);
    // ratios 0.85, 0.9, 0.95, 0.97: all pass at 0.8, none at 0.99
    const std::vector<double> ric{0.85, 1.8, 2.85, 3.88};
    CHECK(individual_outage_rate(0.99, los, ric, 2) < individual_outage_rate(0.8, los, ric, 2));

    const std::vector<std::vector<double>> runs{{1.0, 2.0}, {3.0, 1.0}};
    CHECK(avg_system_outage_rate(runs, {0.5, 0.5}) == doctest::Approx(3.5));
    CHECK(avg_system_outage_rate(runs, {5.0, 5.0}) == 0.0);
    CHECK(avg_system_outage_rate(runs, {2.0, 0.0}) == doctest::Approx((2.0 + 3.0 + 1.0) / 2.0));
}

TEST_CASE("Monte Carlo outage on a planned solution")
{
    Scenario sc = fading_scenario();
    const Scenario cons = conservative_scenario(sc, 0.8);
    for (std::size_t k = 0; k < sc.n_users(); ++k)
        CHECK(cons.users[k].r_min == doctest::Approx(sc.users[k].r_min / 0.8));
    const Solution s = alternate(cons, 0.14);

    const OutageReport r = run_outage(s, sc, 0.8, 40, 3);
    CHECK(r.per_run_user_rates.size() == 40);
    CHECK(r.los_sum_rate >= s.lb_sum_rate_normalized * (1.0 - 1e-12));
    CHECK(r.avg_system_outage_rate <= 0.8 * r.los_sum_rate + 1e-12);
    for (const auto &run : r.per_run_user_rates)
    {
        double sum = 0.0;
        for (double v : run)
            sum += v;
        CHECK(sum <= 0.8 * r.los_sum_rate + 1e-12);
    }

    const OutageReport again = run_outage(s, sc, 0.8, 40, 3);
    CHECK(again.per_run_user_rates == r.per_run_user_rates);
    CHECK(again.avg_system_outage_rate == r.avg_system_outage_rate);

    Scenario los = sc;
    for (auto &u : los.users)
        u.kappa_ug = u.kappa_rg = 1e4;
    const OutageReport near = run_outage(s, los, 0.8, 20, 3);
    CHECK(near.avg_system_outage_rate / (0.8 * near.los_sum_rate) > 0.99);
}
