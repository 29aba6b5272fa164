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
#include "irsuav/ra_solver.hpp"
#include "irsuav/scenario.hpp"

#include <cstddef>
#include <vector>

namespace irsuav
{

// One UAV position per time slot; positions.front() and positions.back() are the fixed endpoints.
struct Trajectory
{
    std::vector<Vec3> positions;
    double dt = 1.0;
    double v_max = 20.0;
    double z_min = 100.0;
    double z_max = 120.0;

    double step_limit() const { return dt * v_max; }
    std::size_t size() const { return positions.size(); }

    static Trajectory straight_line(const UavLimits &lim);

    // Largest violation of the speed, endpoint and altitude constraints (0 when feasible).
    double max_violation(const UavLimits &lim) const;
};

struct SlackPoint
{
    std::size_t n_users = 0, n_slots = 0;
    std::vector<double> v_ug; // [k * N + n]
    std::vector<double> v_ur; // [n]

    double ug(std::size_t k, std::size_t n) const { return v_ug[k * n_slots + n]; }
    double &ug(std::size_t k, std::size_t n) { return v_ug[k * n_slots + n]; }
};

// Slacks at equality with the given trajectory.
SlackPoint slacks_at(const Trajectory &traj, const Scenario &sc);

// Log-rate term log2(1 + snr (a/v_ug + b/v_ur + c/sqrt(v_ug v_ur))) repeated `count` times.
struct RateTerm
{
    std::size_t k = 0;
    double a = 0.0, b = 0.0, c = 0.0;
    double snr = 0.0; // p / sigma2
    double count = 0.0;
};

// Rate terms of a fixed allocation, grouped per slot.
struct TrajectoryProblem
{
    std::size_t n_users = 0, n_f = 0, n_slots = 0;
    std::vector<std::vector<RateTerm>> slots;
    std::vector<double> r_min; // normalized bit/s/Hz
    std::vector<Vec3> user_pos;
    std::vector<double> alpha_ug;
    Vec3 irs_pos;
};

TrajectoryProblem make_trajectory_problem(const Allocation &alloc, const ModePartition &part, const Scenario &sc,
                                          Bound bound, double rmin_scale = 1.0);

double term_rate(const RateTerm &t, double v_ug, double v_ur);

// Raw lower-bound rate of user k in slot n (sum over its subcarriers).
double lb_slot_rate(const TrajectoryProblem &pb, std::size_t k, std::size_t n, const SlackPoint &v);

// First-order minorant of lb_slot_rate expanded at `anchor`; equal to it at the anchor and
// never above it. Terms whose tangent plane is not a global minorant are kept exact.
double surrogate_rate(const TrajectoryProblem &pb, std::size_t k, std::size_t n, const SlackPoint &v,
                      const SlackPoint &anchor);

struct TrajectoryValue
{
    double objective = 0.0;         // raw, (1/N) sum_n sum_i
    std::vector<double> user_rates; // normalized
};

TrajectoryValue evaluate_trajectory(const TrajectoryProblem &pb, const Trajectory &traj);

struct ScaOptions
{
    int max_iter = 30;
    double tol = 1e-4;
    int inner_iter = 200;
    double penalty_scale = 10.0;
    int penalty_doublings = 6;
};

struct ScaStep
{
    Trajectory trajectory;
    SlackPoint slacks;
    double surrogate_objective = 0.0;
};

// One surrogate maximization around the anchor trajectory.
ScaStep solve_sca_step(const Trajectory &anchor, const TrajectoryProblem &pb, const UavLimits &lim,
                       const ScaOptions &opts = {});

struct ScaResult
{
    Trajectory trajectory;
    std::vector<double> trace; // raw objective after each accepted iterate, starting at q_init
};

ScaResult solve_subproblem2(const TrajectoryProblem &pb, const Trajectory &q_init, const UavLimits &lim,
                            const ScaOptions &opts = {});

// Euclidean projection (Dykstra) onto the speed-chain and altitude box, then pulled back
// towards `feasible` until every constraint holds.
std::vector<Vec3> project_feasible(const std::vector<Vec3> &target, const std::vector<Vec3> &feasible,
                                   const UavLimits &lim);

} // namespace irsuav
