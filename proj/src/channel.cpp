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
#include "irsuav/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace irsuav
{

using std::numbers::pi;

double los_fraction(double kappa)
{
    return std::isinf(kappa) ? 1.0 : kappa / (kappa + 1.0);
}

double scatter_fraction(double kappa)
{
    return std::isinf(kappa) ? 0.0 : 1.0 / (kappa + 1.0);
}

double beam_pattern(int m, double x)
{
    const double s = std::sin(x);
    if (std::abs(s) < 1e-9)
        return double(m) * std::cos(double(m) * x) / std::cos(x);
    return std::sin(double(m) * x) / s;
}

static double wrap_phase(double phi)
{
    double w = std::fmod(phi + pi, 2.0 * pi);
    if (w < 0.0)
        w += 2.0 * pi;
    w -= pi;
    return w >= pi ? w - 2.0 * pi : w;
}

std::pair<double, double> user_direction(const IrsSpec &irs, const UserSpec &user)
{
    const auto a = angles_irs_user(irs.location, user.location);
    return {a.sin_theta * a.cos_xi, a.sin_theta * a.sin_xi};
}

std::vector<double> irs_phase_control(const Vec3 &q, const IrsSpec &irs, double f_c, const UserSpec &assisted)
{
    const auto ur = angles_uav_irs(q, irs.location);
    const auto [ru, rv] = user_direction(irs, assisted);
    const double cu = ru + ur.sin_theta * ur.cos_xi;
    const double cv = rv + ur.sin_theta * ur.sin_xi;
    const double w = 2.0 * pi * f_c / kSpeedOfLight;

    std::vector<double> phase(std::size_t(irs.m_r) * std::size_t(irs.m_c));
    for (int r = 0; r < irs.m_r; ++r)
        for (int c = 0; c < irs.m_c; ++c)
            phase[std::size_t(r) * std::size_t(irs.m_c) + std::size_t(c)] =
                wrap_phase(w * (irs.d_r * r * cu + irs.d_c * c * cv));
    return phase;
}

std::pair<double, double> psi_offsets(const IrsSpec &irs, double f_c, const UserSpec &assisted, const UserSpec &other)
{
    const auto [au, av] = user_direction(irs, assisted);
    const auto [ou, ov] = user_direction(irs, other);
    const double k = pi * f_c / kSpeedOfLight;
    return {k * irs.d_r * (au - ou), k * irs.d_c * (av - ov)};
}

double beam_product(std::size_t k, std::size_t irs_user, const Scenario &sc)
{
    if (k == irs_user)
        return double(sc.irs.m_r) * double(sc.irs.m_c);
    const auto [pr, pc] = psi_offsets(sc.irs, sc.ofdm.f_c, sc.users[irs_user], sc.users[k]);
    return beam_pattern(sc.irs.m_r, pr) * beam_pattern(sc.irs.m_c, pc);
}

LosTerms los_terms(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc)
{
    const UserSpec &u = sc.users[k];
    LosTerms t;
    t.d_ug = dist(q, u.location);
    t.d_ur = dist(q, sc.irs.location);
    t.d_rg = dist(sc.irs.location, u.location);
    const double beta0 = sc.ofdm.beta0;
    t.direct_power = beta0 * los_fraction(u.kappa_ug) / std::pow(t.d_ug, u.alpha_ug);
    if (sc.irs.amplitude_a == 0.0)
        return t;

    double psi_r = 0.0, psi_c = 0.0;
    if (k != irs_user)
        std::tie(psi_r, psi_c) = psi_offsets(sc.irs, sc.ofdm.f_c, sc.users[irs_user], u);
    const double bb = k == irs_user ? double(sc.irs.m_r) * double(sc.irs.m_c)
                                    : beam_pattern(sc.irs.m_r, psi_r) * beam_pattern(sc.irs.m_c, psi_c);
    t.reflected_amp = sc.irs.amplitude_a * beta0 * std::sqrt(los_fraction(u.kappa_rg)) * bb /
                      (t.d_ur * std::pow(t.d_rg, 0.5 * u.alpha_rg));
    t.array_phase = (sc.irs.m_r - 1) * psi_r + (sc.irs.m_c - 1) * psi_c;
    return t;
}

std::complex<double> los_composite_channel(std::size_t k, std::size_t irs_user, std::size_t i, const Vec3 &q,
                                           const Scenario &sc)
{
    const LosTerms t = los_terms(k, irs_user, q, sc);
    const double w = 2.0 * pi * double(i) * sc.ofdm.delta_f / kSpeedOfLight;
    return std::polar(std::sqrt(t.direct_power), -w * t.d_ug) +
           std::polar(1.0, -w * (t.d_ur + t.d_rg) + t.array_phase) * t.reflected_amp;
}

double los_composite_gain(std::size_t k, std::size_t irs_user, std::size_t i, const Vec3 &q, const Scenario &sc)
{
    const LosTerms t = los_terms(k, irs_user, q, sc);
    if (t.reflected_amp == 0.0)
        return t.direct_power;
    const double arg = 2.0 * pi * double(i) * sc.ofdm.delta_f * t.delta_d() / kSpeedOfLight - t.array_phase;
    return t.direct_power + t.reflected_amp * t.reflected_amp +
           2.0 * std::sqrt(t.direct_power) * t.reflected_amp * std::cos(arg);
}

GainLevels gain_levels(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc)
{
    const LosTerms t = los_terms(k, irs_user, q, sc);
    const double x = std::sqrt(t.direct_power);
    const double y = std::abs(t.reflected_amp);
    GainLevels g;
    g.peak = (x + y) * (x + y);
    g.trough = (x - y) * (x - y);
    g.dc = x * x + y * y;
    return g;
}

double fading_period(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc)
{
    (void)irs_user;
    const Vec3 &w = sc.users[k].location;
    const double dd = dist(q, sc.irs.location) + dist(sc.irs.location, w) - dist(q, w);
    if (dd <= 0.0)
        return std::numeric_limits<double>::infinity();
    return kSpeedOfLight / (sc.ofdm.delta_f * dd);
}

double reflected_power(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc)
{
    const double y = los_terms(k, irs_user, q, sc).reflected_amp;
    return y * y;
}

} // namespace irsuav
