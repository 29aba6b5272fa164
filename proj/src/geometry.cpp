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

#include "irsuav/geometry.hpp"
#include "irsuav/errors.hpp"

namespace irsuav
{

double dist(const Vec3 &p, const Vec3 &q)
{
    return std::hypot(p.x - q.x, p.y - q.y, p.z - q.z);
}

DirectionCosines angles_uav_irs(const Vec3 &q, const Vec3 &irs)
{
    const double rho = std::hypot(irs.x - q.x, irs.y - q.y);
    if (rho == 0.0)
        throw DegenerateGeometry("UAV is horizontally co-located with the IRS");
    DirectionCosines dc;
    dc.sin_theta = (q.z - irs.z) / dist(q, irs);
    dc.sin_xi = (irs.x - q.x) / rho;
    dc.cos_xi = (q.y - irs.y) / rho;
    return dc;
}

DirectionCosines angles_irs_user(const Vec3 &irs, const Vec3 &user)
{
    const double rho = std::hypot(user.x - irs.x, user.y - irs.y);
    if (rho == 0.0)
        throw DegenerateGeometry("user is horizontally co-located with the IRS");
    DirectionCosines dc;
    dc.sin_theta = (irs.z - user.z) / dist(irs, user);
    dc.sin_xi = (user.x - irs.x) / rho;
    dc.cos_xi = (user.y - irs.y) / rho;
    return dc;
}

} // namespace irsuav
