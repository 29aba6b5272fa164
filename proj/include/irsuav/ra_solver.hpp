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

#include "irsuav/bounds.hpp"
#include "irsuav/geometry.hpp"
#include "irsuav/scenario.hpp"

#include <cstddef>
#include <vector>

namespace irsuav
{

// Mode-level gains per slot: gain of user k when the IRS serves kp, on subcarriers of mode j.
struct GainTable
{
    std::size_t n_users = 0;
    std::size_t n_slots = 0;
    ModePartition part;
    std::vector<double> g;

    double at(std::size_t n, std::size_t k, std::size_t kp, int j) const
    {
        return g[((n * n_users + k) * n_users + kp) * 4 + std::size_t(j)];
    }
    double &at(std::size_t n, std::size_t k, std::size_t kp, int j)
    {
        return g[((n * n_users + k) * n_users + kp) * 4 + std::size_t(j)];
    }
    double sub(std::size_t n, std::size_t k, std::size_t kp, std::size_t i) const
    {
        return at(n, k, kp, part.mode_of(i));
    }
};

GainTable make_gain_table(const std::vector<Vec3> &positions, const ModePartition &part, const Scenario &sc,
                          Bound bound);

// Binary schedule in compact form. u, s, t and p_tilde are exposed as tensor views; C2, C6
// and t = u s hold by construction.
struct Allocation
{
    std::size_t n_users = 0, n_f = 0, n_slots = 0;
    std::vector<int> user;     // [n * n_f + i], -1 when idle
    std::vector<int> irs;      // [n], -1 when the IRS serves nobody
    std::vector<double> power; // [n * n_f + i] Watts

    Allocation() = default;
    Allocation(std::size_t k, std::size_t nf, std::size_t n)
        : n_users(k), n_f(nf), n_slots(n), user(nf * n, -1), irs(n, -1), power(nf * n, 0.0) {}

    int u(std::size_t k, std::size_t i, std::size_t n) const { return user[n * n_f + i] == int(k); }
    int s(std::size_t k, std::size_t n) const { return irs[n] == int(k); }
    int t(std::size_t k, std::size_t kp, std::size_t i, std::size_t n) const { return u(k, i, n) && s(kp, n); }
    double p_tilde(std::size_t k, std::size_t kp, std::size_t i, std::size_t n) const
    {
        return t(k, kp, i, n) ? power[n * n_f + i] : 0.0;
    }
    double slot_power(std::size_t n) const;
};

struct DualState
{
    std::size_t n_users = 0, n_f = 0, n_slots = 0;
    std::vector<double> zeta;     // [n_f x N]
    std::vector<double> varrho;   // [N]
    std::vector<double> gamma;    // [N]
    std::vector<double> nu;       // [K]
    std::vector<double> varsigma; // [K x K x n_f x N]
    std::vector<double> varpi;
    std::vector<double> xi;

    DualState() = default;
    DualState(std::size_t k, std::size_t nf, std::size_t n);
    std::size_t idx4(std::size_t k, std::size_t kp, std::size_t i, std::size_t n) const
    {
        return ((n * n_f + i) * n_users + k) * n_users + kp;
    }
    bool coupling_active(std::size_t n) const; // any varsigma/varpi/xi nonzero in slot n
};

// p* = [(nu+1)/(varrho ln2 N) - sigma2/g]^+ . Throws ZeroDual when varrho == 0.
double waterfill_power(double nu_k, double varrho_n, double gain, double sigma2, std::size_t n_slots);

struct Marginals
{
    std::vector<double> m_u; // [n][i][k]
    std::vector<double> m_t; // same layout as DualState::idx4
    std::vector<double> m_s; // [n][k]
    std::vector<double> p_star;
};

double marginal_bracket(double x); // log2(1+x) - x/((1+x) ln2)

Marginals marginals(const DualState &dual, const GainTable &gains, double sigma2);

Allocation binary_update(const Marginals &m, std::size_t n_users, std::size_t n_f, std::size_t n_slots,
                         bool tdma = false);

struct StepSizes
{
    double nu = 1.0, varrho = 1.0, varsigma = 1.0, varpi = 1.0, xi = 1.0;
};

// user_rates are per-subcarrier normalized bit/s/Hz.
DualState dual_update(const DualState &state, const Allocation &primal, const std::vector<double> &user_rates,
                      const std::vector<double> &r_min, double p_max, const StepSizes &tau);

struct RaOptions
{
    int max_outer = 200;
    double tau0 = 1.0;
    double nu_cap = 1.0e6;
    double gap_tol = 1.0e-4;
    bool tdma = false;
    Bound bound = Bound::Lower;
    double rmin_scale = 1.0;
    int polish_iters = 300;
    int search_rounds = 20; // local-search refinements of the recovered schedule
    int search_passes = 20;
    int refit_cells = 512; // K * n_f * N up to which infeasible moves are re-fitted
};

struct RaResult
{
    Allocation alloc;
    DualState dual; // nu and varrho consistent with alloc.power
    double objective = 0.0;            // (1/N) sum_n sum_i rate
    double objective_normalized = 0.0; // objective / n_f
    std::vector<double> user_rates;    // normalized
    double gap = 0.0;
    int iterations = 0;
};

// Rates of an allocation under a gain table.
struct AllocationRates
{
    double objective = 0.0;
    std::vector<double> user_raw; // (1/N) sum_n sum_i
};
AllocationRates evaluate_allocation(const Allocation &a, const GainTable &gains, double sigma2);

std::vector<double> effective_rmin(const Scenario &sc, double scale);

// Residual of the water-filling KKT system (stationarity on active subcarriers,
// complementary slackness on idle ones, tightness of the slot budget).
double waterfill_kkt_residual(const RaResult &r, const GainTable &gains, double sigma2, double p_max);

RaResult solve_subproblem1(const std::vector<Vec3> &positions, const ModePartition &part, const Scenario &sc,
                           const RaOptions &opts = {});
RaResult solve_subproblem1(const GainTable &gains, const Scenario &sc, const RaOptions &opts = {});

} // namespace irsuav
