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

#pragma once

#include "irsuav/geometry.hpp"
#include "irsuav/scenario.hpp"

#include <array>
#include <cstddef>

namespace irsuav
{

enum class Bound
{
    Lower,
    Upper
};

// Four contiguous subcarrier ranges [begin[j], end[j]), 0-based.
struct ModePartition
{
    double alpha = 0.14;
    std::size_t n_f = 0;
    std::array<std::size_t, 4> begin{};
    std::array<std::size_t, 4> end{};

    std::size_t size(int j) const { return end[j] - begin[j]; }
    int mode_of(std::size_t i) const
    {
        for (int j = 0; j < 3; ++j)
            if (i < end[j])
                return j;
        return 3;
    }
};

ModePartition mode_partition(double alpha, std::size_t n_f);

// Closed-form gain decomposition A/v_ug + B/v_ur + C/sqrt(v_ug v_ur), with
// v_ug = d_ug^alpha_ug and v_ur = d_ur^2.
struct LinkCoeffs
{
    double a = 0.0;
    double b = 0.0;
    std::array<double, 4> d{}; // lower-bound cross coefficient of modes 1..4
    double d_peak = 0.0;       // cross coefficient of the peak level

    // Cross coefficient on subcarriers of mode j (0-based) under the given bound.
    double cross(Bound bound, int j) const
    {
        if (bound == Bound::Lower)
            return d[j];
        return j == 0 ? d_peak : d[j - 1];
    }
};

LinkCoeffs link_coeffs(std::size_t k, std::size_t k_prime, double alpha, const Scenario &sc);

inline double closed_form_gain(double a, double b, double c, double v_ug, double v_ur)
{
    return a / v_ug + b / v_ur + c / std::sqrt(v_ug * v_ur);
}

double bound_gain(Bound bound, std::size_t k, std::size_t k_prime, std::size_t i, const Vec3 &q,
                  const ModePartition &part, const Scenario &sc);

double lb_gain(std::size_t k, std::size_t k_prime, std::size_t i, const Vec3 &q, const ModePartition &part,
               const Scenario &sc);
double ub_gain(std::size_t k, std::size_t k_prime, std::size_t i, const Vec3 &q, const ModePartition &part,
               const Scenario &sc);

// Time-shared rate t log2(1 + p g/(t sigma2)); 0 at t = 0.
double lb_rate(double t, double p_tilde, double gain, double sigma2);

} // namespace irsuav
