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

#include "irsuav/ra_solver.hpp"
#include "irsuav/scenario.hpp"
#include "irsuav/trajectory_solver.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace irsuav
{

struct PlannerOptions
{
    double epsilon = 1e-3; // +inf stops after the first resource-allocation pass
    int iter_max = 20;
    bool tdma = false;
    bool bootstrap = true;
    int bootstrap_rounds = 5;
    RaOptions ra;
    ScaOptions sca;
};

struct Solution
{
    Trajectory trajectory;
    Allocation allocation;
    double alpha = 0.0;
    Bound bound = Bound::Lower;
    double lb_sum_rate = 0.0;            // raw: (1/N) sum_n sum_k sum_i
    double lb_sum_rate_normalized = 0.0; // raw / n_f
    std::vector<double> per_user_rates;  // normalized
    std::vector<double> iteration_trace; // raw; odd entries after RA, even after trajectory (1-based)
    bool feasible = true;
    double rmin_scale = 1.0;
    int iterations = 0;
};

Solution alternate(const Scenario &sc, double alpha, const PlannerOptions &opts = {});
Solution solve_upper_bound(const Scenario &sc, double alpha, const PlannerOptions &opts = {});

struct AlphaPoint
{
    double alpha = 0.0;
    double lb = std::numeric_limits<double>::quiet_NaN(); // normalized
    double ub = std::numeric_limits<double>::quiet_NaN();
};

struct AlphaSweep
{
    double alpha_star = 0.0;
    std::vector<AlphaPoint> curve;
};

AlphaSweep sweep_alpha(const Scenario &sc, const std::vector<double> &grid, const PlannerOptions &opts = {});

Solution baseline_straight_line(const Scenario &sc, double alpha, const PlannerOptions &opts = {});
Solution baseline_no_irs(const Scenario &sc, double alpha, const PlannerOptions &opts = {});
Solution baseline_tdma(const Scenario &sc, double alpha, const PlannerOptions &opts = {});

struct PlacementResult
{
    Vec3 best_location;
    double best_rate = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<Vec3, double>> rate_map; // normalized sum-rate, NaN when infeasible
};

PlacementResult irs_placement_search(const Scenario &sc, const std::vector<Vec3> &candidates, double alpha,
                                     const PlannerOptions &opts = {});

// Points on the perimeter of [x0,x1] x [y0,y1] at the given spacing and height.
std::vector<Vec3> boundary_grid(double x0, double x1, double y0, double y1, double step, double height);

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

} // namespace irsuav
