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

#include <cmath>

namespace irsuav
{

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    bool operator==(const Vec3 &o) const = default;

    double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

struct DirectionCosines
{
    double sin_theta = 0.0;
    double sin_xi = 0.0;
    double cos_xi = 1.0;
};

double dist(const Vec3 &p, const Vec3 &q);

// Arrival angles at the IRS for the UAV->IRS link.
// Throws DegenerateGeometry when the UAV is horizontally co-located with the IRS.
DirectionCosines angles_uav_irs(const Vec3 &q, const Vec3 &irs);

// Departure angles from the IRS towards a ground user.
DirectionCosines angles_irs_user(const Vec3 &irs, const Vec3 &user);

} // namespace irsuav
