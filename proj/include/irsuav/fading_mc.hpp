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

#include "irsuav/planner.hpp"
#include "irsuav/scenario.hpp"

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace irsuav
{

// Counter-based generator: the stream is a pure function of its key, so draws do not
// depend on evaluation order. Satisfies UniformRandomBitGenerator.
class KeyedRng
{
public:
    using result_type = std::uint64_t;
    KeyedRng(std::uint64_t seed, std::uint64_t k, std::uint64_t i, std::uint64_t n, std::uint64_t stream);
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t state_;
};

// Unit-variance circularly symmetric complex Gaussian.
std::complex<double> draw_cn(KeyedRng &rng, double variance = 1.0);

enum class ScatterPath
{
    Auto,     // per-PRU up to 1e4 PRUs, aggregated beyond
    PerPru,
    Aggregate
};

// Scattering components of one Monte Carlo realization, generated lazily from (seed, k, i, n).
struct FadingDraw
{
    std::uint64_t rng_seed = 0;

    std::complex<double> scatter_ug(std::size_t k, std::size_t i, std::size_t n) const;
    std::vector<std::complex<double>> scatter_rg(std::size_t k, std::size_t i, std::size_t n, std::size_t m) const;
    std::complex<double> scatter_rg_aggregate(std::size_t k, std::size_t i, std::size_t n, std::size_t m) const;
};

FadingDraw make_draw(std::uint64_t seed, std::uint64_t run);

// Total scattered power of the composite channel.
double scattering_variance(std::size_t k, const Vec3 &q, const Scenario &sc);

std::complex<double> sample_composite_channel(const FadingDraw &draw, std::size_t k, std::size_t irs_user,
                                              std::size_t i, std::size_t n, const Vec3 &q, const Scenario &sc,
                                              ScatterPath path = ScatterPath::Auto);

// (1/N) sum_n sum_i eta R_los 1{R_rician >= eta R_los}; arrays are aligned, any layout.
double individual_outage_rate(double eta, const std::vector<double> &los_rates,
                              const std::vector<double> &rician_rates, std::size_t n_slots);

// (1/L) sum_runs sum_k R_k 1{R_k >= r_min_k}
double avg_system_outage_rate(const std::vector<std::vector<double>> &per_run_user_rates,
                              const std::vector<double> &r_min);

struct OutageReport
{
    double eta = 0.8;
    std::vector<std::vector<double>> per_run_user_rates; // normalized
    double avg_system_outage_rate = 0.0;                 // normalized
    double los_sum_rate = 0.0;                           // normalized LoS rate of the same allocation
};

OutageReport run_outage(const Solution &sol, const Scenario &sc, double eta, std::size_t runs, std::uint64_t seed,
                        ScatterPath path = ScatterPath::Auto);

// Minimum rates inflated by 1/eta for the conservative design.
Scenario conservative_scenario(const Scenario &sc, double eta);

} // namespace irsuav
