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

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace irsuav
{

struct GainLevels
{
    double peak = 0.0;
    double trough = 0.0;
    double dc = 0.0;
};

// LoS share kappa/(kappa+1), with kappa = inf mapped to 1.
double los_fraction(double kappa);
double scatter_fraction(double kappa);

// sin(M x)/sin(x); the analytic limit +-M where |sin x| < 1e-9.
double beam_pattern(int m, double x);

// Per-PRU phases aligning the IRS to the assisted user, row-major (m_r outer), wrapped to [-pi, pi).
std::vector<double> irs_phase_control(const Vec3 &q, const IrsSpec &irs, double f_c, const UserSpec &assisted);

// Effective user-side direction cosines (sin theta cos xi, sin theta sin xi) seen from the IRS.
std::pair<double, double> user_direction(const IrsSpec &irs, const UserSpec &user);

// Beam-pattern phase offsets between the assisted user and another user.
std::pair<double, double> psi_offsets(const IrsSpec &irs, double f_c, const UserSpec &assisted, const UserSpec &other);

// Product B_Mr(psi_r) B_Mc(psi_c) seen by user k when the IRS serves irs_user.
double beam_product(std::size_t k, std::size_t irs_user, const Scenario &sc);

// Everything needed to evaluate the composite LoS channel of user k at UAV position q.
struct LosTerms
{
    double direct_power = 0.0; // x^2
    double reflected_amp = 0.0; // y, signed by the beam-pattern product
    double array_phase = 0.0;  // (Mr-1) psi_r + (Mc-1) psi_c
    double d_ug = 0.0, d_ur = 0.0, d_rg = 0.0;

    double delta_d() const { return d_ur + d_rg - d_ug; }
};

LosTerms los_terms(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc);

// Subcarrier index i is 0-based.
std::complex<double> los_composite_channel(std::size_t k, std::size_t irs_user, std::size_t i, const Vec3 &q,
                                           const Scenario &sc);
double los_composite_gain(std::size_t k, std::size_t irs_user, std::size_t i, const Vec3 &q, const Scenario &sc);

GainLevels gain_levels(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc);

// Cosine period over subcarriers, c/(delta_f * delta_d); +inf when delta_d = 0.
double fading_period(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc);

// Reflected LoS power term y^2 of the composite gain.
double reflected_power(std::size_t k, std::size_t irs_user, const Vec3 &q, const Scenario &sc);

} // namespace irsuav
