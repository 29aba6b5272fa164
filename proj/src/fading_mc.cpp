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

#include "irsuav/fading_mc.hpp"
#include "irsuav/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace irsuav
{

namespace
{
std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kStreamUg = 1, kStreamRg = 2, kStreamRgAgg = 3;
} // namespace

KeyedRng::KeyedRng(std::uint64_t seed, std::uint64_t k, std::uint64_t i, std::uint64_t n, std::uint64_t stream)
{
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ k);
    h = splitmix(h ^ i);
    h = splitmix(h ^ n);
    state_ = splitmix(h ^ stream);
}

KeyedRng::result_type KeyedRng::operator()()
{
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::complex<double> draw_cn(KeyedRng &rng, double variance)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

FadingDraw make_draw(std::uint64_t seed, std::uint64_t run)
{
    return FadingDraw{splitmix(seed ^ splitmix(run + 0x51ed2701ull))};
}

std::complex<double> FadingDraw::scatter_ug(std::size_t k, std::size_t i, std::size_t n) const
{
    KeyedRng rng(rng_seed, k, i, n, kStreamUg);
    return draw_cn(rng);
}

std::vector<std::complex<double>> FadingDraw::scatter_rg(std::size_t k, std::size_t i, std::size_t n,
                                                         std::size_t m) const
{
    KeyedRng rng(rng_seed, k, i, n, kStreamRg);
    std::vector<std::complex<double>> h(m);
    for (auto &v : h)
        v = draw_cn(rng);
    return h;
}

std::complex<double> FadingDraw::scatter_rg_aggregate(std::size_t k, std::size_t i, std::size_t n,
                                                      std::size_t m) const
{
    KeyedRng rng(rng_seed, k, i, n, kStreamRgAgg);
    return draw_cn(rng, double(m));
}

double scattering_variance(std::size_t k, const Vec3 &q, const Scenario &sc)
{
    const UserSpec &u = sc.users[k];
    const double d_ug = dist(q, u.location), d_ur = dist(q, sc.irs.location), d_rg = dist(sc.irs.location, u.location);
    const double b0 = sc.ofdm.beta0, a = sc.irs.amplitude_a;
    const double m = double(sc.irs.m_r) * double(sc.irs.m_c);
    return b0 / std::pow(d_ug, u.alpha_ug) * scatter_fraction(u.kappa_ug) +
           a * a * b0 * b0 * m / (d_ur * d_ur * std::pow(d_rg, u.alpha_rg)) * scatter_fraction(u.kappa_rg);
}

std::complex<double> sample_composite_channel(const FadingDraw &draw, std::size_t k, std::size_t irs_user,
                                              std::size_t i, std::size_t n, const Vec3 &q, const Scenario &sc,
                                              ScatterPath path)
{
    using std::numbers::pi;
    const UserSpec &u = sc.users[k];
    std::complex<double> g = los_composite_channel(k, irs_user, i, q, sc);
    const double b0 = sc.ofdm.beta0;
    const double d_ug = dist(q, u.location);
    const double w = 2.0 * pi * double(i) * sc.ofdm.delta_f / kSpeedOfLight;
    const double sf_ug = scatter_fraction(u.kappa_ug);
    if (sf_ug > 0.0)
        g += std::sqrt(b0 * sf_ug / std::pow(d_ug, u.alpha_ug)) * std::polar(1.0, -w * d_ug) *
             draw.scatter_ug(k, i, n);

    const double sf_rg = scatter_fraction(u.kappa_rg);
    const double a = sc.irs.amplitude_a;
    if (sf_rg == 0.0 || a == 0.0)
        return g;
    const double d_ur = dist(q, sc.irs.location), d_rg = dist(sc.irs.location, u.location);
    const double amp = a * b0 * std::sqrt(sf_rg) / (d_ur * std::pow(d_rg, 0.5 * u.alpha_rg));
    const std::size_t m = std::size_t(sc.irs.m_r) * std::size_t(sc.irs.m_c);
    const bool per_pru = path == ScatterPath::PerPru || (path == ScatterPath::Auto && m <= 10000);

    std::complex<double> s;
    if (per_pru)
    {
        // Phase rule of the assisted user, with the UAV-side steering removed (it cancels).
        const auto [cu, cv] = user_direction(sc.irs, sc.users[irs_user]);
        const double kw = 2.0 * pi * sc.ofdm.f_c / kSpeedOfLight;
        const auto h = draw.scatter_rg(k, i, n, m);
        for (int r = 0; r < sc.irs.m_r; ++r)
            for (int c = 0; c < sc.irs.m_c; ++c)
                s += h[std::size_t(r) * std::size_t(sc.irs.m_c) + std::size_t(c)] *
                     std::polar(1.0, kw * (sc.irs.d_r * r * cu + sc.irs.d_c * c * cv));
    }
    else
    {
        s = draw.scatter_rg_aggregate(k, i, n, m);
    }
    return g + amp * std::polar(1.0, -w * (d_ur + d_rg)) * s;
}

double individual_outage_rate(double eta, const std::vector<double> &los_rates,
                              const std::vector<double> &rician_rates, std::size_t n_slots)
{
    double s = 0.0;
    for (std::size_t a = 0; a < los_rates.size(); ++a)
        if (rician_rates[a] >= eta * los_rates[a])
            s += eta * los_rates[a];
    return s / double(n_slots);
}

double avg_system_outage_rate(const std::vector<std::vector<double>> &per_run_user_rates,
                              const std::vector<double> &r_min)
{
    if (per_run_user_rates.empty())
        return 0.0;
    double s = 0.0;
    for (const auto &run : per_run_user_rates)
        for (std::size_t k = 0; k < run.size(); ++k)
            if (run[k] >= r_min[k])
                s += run[k];
    return s / double(per_run_user_rates.size());
}

OutageReport run_outage(const Solution &sol, const Scenario &sc, double eta, std::size_t runs, std::uint64_t seed,
                        ScatterPath path)
{
    const Allocation &a = sol.allocation;
    const std::size_t K = sc.n_users(), NF = a.n_f, N = a.n_slots;
    const double sigma2 = sc.ofdm.sigma2();

    struct Slot
    {
        std::size_t k, i, n;
        double p, r_los;
    };
    std::vector<Slot> active;
    OutageReport rep;
    rep.eta = eta;
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < NF; ++i)
        {
            const int k = a.user[n * NF + i];
            const double p = a.power[n * NF + i];
            if (k < 0 || p <= 0.0 || a.irs[n] < 0)
                continue;
            const double g = los_composite_gain(std::size_t(k), std::size_t(a.irs[n]), i, sol.trajectory.positions[n], sc);
            const double r = std::log2(1.0 + p * g / sigma2);
            active.push_back({std::size_t(k), i, n, p, r});
            rep.los_sum_rate += r;
        }
    const double norm = 1.0 / (double(N) * double(NF));
    rep.los_sum_rate *= norm;

    rep.per_run_user_rates.assign(runs, std::vector<double>(K, 0.0));
    parallel_for(runs, [&](std::size_t l) {
        const FadingDraw draw = make_draw(seed, l);
        std::vector<std::vector<double>> los(K), ric(K);
        for (const auto &s : active)
        {
            const auto g = sample_composite_channel(draw, s.k, std::size_t(a.irs[s.n]), s.i, s.n,
                                                    sol.trajectory.positions[s.n], sc, path);
            los[s.k].push_back(s.r_los);
            ric[s.k].push_back(std::log2(1.0 + s.p * std::norm(g) / sigma2));
        }
        for (std::size_t k = 0; k < K; ++k)
            rep.per_run_user_rates[l][k] = individual_outage_rate(eta, los[k], ric[k], N) / double(NF);
    });
    rep.avg_system_outage_rate = avg_system_outage_rate(rep.per_run_user_rates, effective_rmin(sc, 1.0));
    return rep;
}

Scenario conservative_scenario(const Scenario &sc, double eta)
{
    Scenario s = sc;
    for (auto &u : s.users)
        u.r_min /= eta;
    return s;
}

} // namespace irsuav
