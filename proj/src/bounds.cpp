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

#include "irsuav/bounds.hpp"
#include "irsuav/channel.hpp"
#include "irsuav/errors.hpp"

#include <cmath>
#include <numbers>

namespace irsuav
{

ModePartition mode_partition(double alpha, std::size_t n_f)
{
    if (!(alpha > 0.0 && alpha < 0.25))
        throw InvalidAlpha("approximation parameter must lie in (0, 0.25)");
    if (n_f < 4)
        throw InvalidAlpha("at least four subcarriers are required");
    ModePartition p;
    p.alpha = alpha;
    p.n_f = n_f;
    const std::size_t outer = std::size_t(std::llround(2.0 * alpha * double(n_f)));
    const std::size_t rest = n_f - 2 * outer;
    const std::size_t inner2 = (rest + 1) / 2;
    const std::size_t sizes[4] = {outer, inner2, rest - inner2, outer};
    std::size_t at = 0;
    for (int j = 0; j < 4; ++j)
    {
        p.begin[j] = at;
        at += sizes[j];
        p.end[j] = at;
    }
    return p;
}

LinkCoeffs link_coeffs(std::size_t k, std::size_t k_prime, double alpha, const Scenario &sc)
{
    const UserSpec &u = sc.users[k];
    const double beta0 = sc.ofdm.beta0;
    const double a = sc.irs.amplitude_a;
    LinkCoeffs c;
    c.a = beta0 * los_fraction(u.kappa_ug);
    if (a == 0.0)
        return c;

    const double bb = std::abs(beam_product(k, k_prime, sc));
    const double d_rg = dist(sc.irs.location, u.location);
    const double d_rg_half = std::pow(d_rg, 0.5 * u.alpha_rg);
    c.b = a * a * beta0 * beta0 * bb * bb * los_fraction(u.kappa_rg) / (d_rg_half * d_rg_half);
    const double e = 2.0 * a * std::pow(beta0, 1.5) * bb * std::sqrt(los_fraction(u.kappa_ug)) *
                     std::sqrt(los_fraction(u.kappa_rg)) / d_rg_half;
    c.d_peak = e;
    if (k == k_prime)
    {
        const double cs = std::cos(2.0 * std::numbers::pi * alpha);
        c.d = {e * cs, 0.0, -e * cs, -e};
    }
    else
    {
        c.d = {-e, -e, -e, -e};
    }
    return c;
}

double bound_gain(Bound bound, std::size_t k, std::size_t k_prime, std::size_t i, const Vec3 &q,
                  const ModePartition &part, const Scenario &sc)
{
    const LinkCoeffs c = link_coeffs(k, k_prime, part.alpha, sc);
    const double v_ug = std::pow(dist(q, sc.users[k].location), sc.users[k].alpha_ug);
    const double d_ur = dist(q, sc.irs.location);
    int j = part.mode_of(i);
    if (k != k_prime)
        j = bound == Bound::Lower ? 3 : 0;
    return closed_form_gain(c.a, c.b, c.cross(bound, j), v_ug, d_ur * d_ur);
}

double lb_gain(std::size_t k, std::size_t k_prime, std::size_t i, const Vec3 &q, const ModePartition &part,
               const Scenario &sc)
{
    return bound_gain(Bound::Lower, k, k_prime, i, q, part, sc);
}

double ub_gain(std::size_t k, std::size_t k_prime, std::size_t i, const Vec3 &q, const ModePartition &part,
               const Scenario &sc)
{
    return bound_gain(Bound::Upper, k, k_prime, i, q, part, sc);
}

double lb_rate(double t, double p_tilde, double gain, double sigma2)
{
    if (t == 0.0)
    {
        if (p_tilde > 0.0)
            throw InconsistentAllocation("power assigned to an inactive (user, IRS-user, subcarrier) triple");
        return 0.0;
    }
    return t * std::log2(1.0 + p_tilde * gain / (t * sigma2));
}

} // namespace irsuav
