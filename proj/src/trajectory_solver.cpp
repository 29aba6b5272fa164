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

#include "irsuav/trajectory_solver.hpp"
#include "irsuav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace irsuav
{

namespace
{
constexpr double kLn2 = std::numbers::ln2;

double zlo(const UavLimits &lim) { return lim.z_min; }
double zhi(const UavLimits &lim) { return lim.freeze_altitude ? lim.z_min : lim.z_max; }

double chain_violation(const std::vector<Vec3> &q, const UavLimits &lim)
{
    double v = 0.0;
    const double D = lim.step_limit();
    for (std::size_t n = 1; n < q.size(); ++n)
        v = std::max(v, (q[n] - q[n - 1]).norm() - D);
    for (std::size_t n = 1; n + 1 < q.size(); ++n)
        v = std::max({v, zlo(lim) - q[n].z, q[n].z - zhi(lim)});
    return v;
}

bool chain_ok(const std::vector<Vec3> &q, const UavLimits &lim)
{
    const double D = lim.step_limit();
    for (std::size_t n = 1; n < q.size(); ++n)
        if ((q[n] - q[n - 1]).norm() > D)
            return false;
    for (std::size_t n = 1; n + 1 < q.size(); ++n)
        if (q[n].z < zlo(lim) || q[n].z > zhi(lim))
            return false;
    return true;
}

void project_pair(Vec3 &a, Vec3 &b, bool a_fixed, bool b_fixed, double D)
{
    const Vec3 d = b - a;
    const double len = d.norm();
    if (len <= D || (a_fixed && b_fixed))
        return;
    if (a_fixed)
        b = a + d * (D / len);
    else if (b_fixed)
        a = b - d * (D / len);
    else
    {
        const Vec3 mid = (a + b) * 0.5;
        a = mid - d * (0.5 * D / len);
        b = mid + d * (0.5 * D / len);
    }
}

// Rate term value and partial derivatives in the slacks.
struct TermEval
{
    double f, fv, fw;
};

TermEval exact_term(const RateTerm &t, double v, double w)
{
    const double sv = std::sqrt(v), sw = std::sqrt(w);
    const double h = t.a / v + t.b / w + t.c / (sv * sw);
    const double hv = -t.a / (v * v) - 0.5 * t.c / (v * sv * sw);
    const double hw = -t.b / (w * w) - 0.5 * t.c / (sv * w * sw);
    const double den = (1.0 + t.snr * h) * kLn2;
    return {std::log2(1.0 + t.snr * h), t.snr * hv / den, t.snr * hw / den};
}

struct LinearTerm
{
    RateTerm base;
    bool exact = false;
    double f0 = 0.0, gv = 0.0, gw = 0.0, v0 = 0.0, w0 = 0.0;
};

LinearTerm linearize(const RateTerm &t, double v0, double w0)
{
    LinearTerm L;
    L.base = t;
    L.v0 = v0;
    L.w0 = w0;
    const TermEval e = exact_term(t, v0, w0);
    L.f0 = e.f;
    if (t.c >= 0.0)
    {
        L.gv = e.fv;
        L.gw = e.fw;
        return L;
    }
    // Split the negative cross term with the tangent AM-GM bound, exact at the anchor.
    const double r = std::sqrt(v0 / w0);
    const double a2 = t.a + 0.5 * t.c * r;
    const double b2 = t.b + 0.5 * t.c / r;
    if (a2 < 0.0 || b2 < 0.0)
    {
        L.exact = true;
        return L;
    }
    const double h0 = a2 / v0 + b2 / w0;
    const double den = (1.0 + t.snr * h0) * kLn2;
    L.gv = -t.snr * a2 / (v0 * v0) / den;
    L.gw = -t.snr * b2 / (w0 * w0) / den;
    return L;
}

TermEval linear_eval(const LinearTerm &L, double v, double w)
{
    if (L.exact)
        return exact_term(L.base, v, w);
    return {L.f0 + L.gv * (v - L.v0) + L.gw * (w - L.w0), L.gv, L.gw};
}

// Surrogate built once per anchor.
struct Model
{
    const TrajectoryProblem *pb = nullptr;
    std::vector<std::vector<LinearTerm>> slots;
};

Model build_model(const TrajectoryProblem &pb, const SlackPoint &anchor)
{
    Model m;
    m.pb = &pb;
    m.slots.resize(pb.n_slots);
    for (std::size_t n = 0; n < pb.n_slots; ++n)
        for (const auto &t : pb.slots[n])
            m.slots[n].push_back(linearize(t, anchor.ug(t.k, n), anchor.v_ur[n]));
    return m;
}

// Normalized per-user surrogate rates and their gradients with respect to the waypoints.
struct ModelEval
{
    std::vector<double> user; // normalized
    std::vector<std::vector<Vec3>> grad; // [k][n]
};

ModelEval eval_model(const Model &m, const std::vector<Vec3> &q, bool with_grad)
{
    const TrajectoryProblem &pb = *m.pb;
    const double scale = 1.0 / (double(pb.n_slots) * double(pb.n_f));
    ModelEval out;
    out.user.assign(pb.n_users, 0.0);
    if (with_grad)
        out.grad.assign(pb.n_users, std::vector<Vec3>(pb.n_slots));
    for (std::size_t n = 0; n < pb.n_slots; ++n)
    {
        const Vec3 dr = q[n] - pb.irs_pos;
        const double w = dr.dot(dr);
        for (const auto &L : m.slots[n])
        {
            const std::size_t k = L.base.k;
            const Vec3 du = q[n] - pb.user_pos[k];
            const double d = du.norm();
            const double al = pb.alpha_ug[k];
            const double v = std::pow(d, al);
            const TermEval e = linear_eval(L, v, w);
            out.user[k] += scale * L.base.count * e.f;
            if (with_grad)
            {
                const Vec3 g = du * (e.fv * al * std::pow(d, al - 2.0)) + dr * (2.0 * e.fw);
                out.grad[k][n] += g * (scale * L.base.count);
            }
        }
    }
    return out;
}

using Field = std::vector<Vec3>;

double dot(const Field &a, const Field &b)
{
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
        s += a[n].dot(b[n]);
    return s;
}

// Interior-waypoint part of a gradient, vertical component dropped when altitude is frozen.
Field free_part(const Field &g, bool freeze)
{
    Field out(g.size());
    for (std::size_t n = 1; n + 1 < g.size(); ++n)
    {
        out[n] = g[n];
        if (freeze)
            out[n].z = 0.0;
    }
    return out;
}

// Euclidean projection of g onto {d : <a_k, d> >= c_k} (Hildreth's row-action method).
Field project_halfspaces(const Field &g, const std::vector<Field> &rows, const std::vector<double> &rhs)
{
    Field d = g;
    std::vector<double> lambda(rows.size(), 0.0), norm2(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        norm2[k] = dot(rows[k], rows[k]);
    for (int sweep = 0; sweep < 500; ++sweep)
    {
        double change = 0.0;
        for (std::size_t k = 0; k < rows.size(); ++k)
        {
            if (norm2[k] == 0.0)
                continue;
            const double next = std::max(0.0, lambda[k] - (dot(rows[k], d) - rhs[k]) / norm2[k]);
            const double delta = next - lambda[k];
            if (delta == 0.0)
                continue;
            for (std::size_t n = 0; n < d.size(); ++n)
                d[n] += rows[k][n] * delta;
            lambda[k] = next;
            change = std::max(change, std::abs(delta) * std::sqrt(norm2[k]));
        }
        if (change <= 1e-14 * std::sqrt(dot(g, g)))
            break;
    }
    return d;
}

double penalized(const ModelEval &e, const std::vector<double> &rmin, double mu)
{
    double s = 0.0;
    for (std::size_t k = 0; k < e.user.size(); ++k)
        s += e.user[k] - mu * std::max(0.0, rmin[k] - e.user[k]);
    return s;
}

double total(const ModelEval &e)
{
    double s = 0.0;
    for (double v : e.user)
        s += v;
    return s;
}

bool meets(const std::vector<double> &rates, const std::vector<double> &rmin)
{
    for (std::size_t k = 0; k < rmin.size(); ++k)
        if (rates[k] < rmin[k] - 1e-9 * (1.0 + rmin[k]))
            return false;
    return true;
}

// Every rate at its floor, or at least where the anchor left it.
bool holds(const std::vector<double> &rates, const std::vector<double> &rmin, const std::vector<double> &anchor)
{
    for (std::size_t k = 0; k < rmin.size(); ++k)
        if (rates[k] < std::min(rmin[k], anchor[k]))
            return false;
    return true;
}

std::vector<Vec3> blend(const std::vector<Vec3> &a, const std::vector<Vec3> &b, double th)
{
    std::vector<Vec3> q(a.size());
    for (std::size_t n = 0; n < a.size(); ++n)
        q[n] = a[n] + (b[n] - a[n]) * th;
    return q;
}

} // namespace

Trajectory Trajectory::straight_line(const UavLimits &lim)
{
    Trajectory t;
    t.dt = lim.dt;
    t.v_max = lim.v_max;
    t.z_min = lim.z_min;
    t.z_max = lim.z_max;
    const std::size_t N = lim.n_slots;
    t.positions.resize(N);
    for (std::size_t n = 0; n < N; ++n)
    {
        const double s = N == 1 ? 0.0 : double(n) / double(N - 1);
        t.positions[n] = lim.q_initial + (lim.q_final - lim.q_initial) * s;
    }
    t.positions.front() = lim.q_initial;
    t.positions.back() = lim.q_final;
    return t;
}

double Trajectory::max_violation(const UavLimits &lim) const
{
    double v = chain_violation(positions, lim);
    v = std::max(v, (positions.front() - lim.q_initial).norm());
    v = std::max(v, (positions.back() - lim.q_final).norm());
    return v;
}

SlackPoint slacks_at(const Trajectory &traj, const Scenario &sc)
{
    SlackPoint s;
    s.n_users = sc.n_users();
    s.n_slots = traj.size();
    s.v_ug.resize(s.n_users * s.n_slots);
    s.v_ur.resize(s.n_slots);
    for (std::size_t n = 0; n < s.n_slots; ++n)
    {
        const double d = dist(traj.positions[n], sc.irs.location);
        s.v_ur[n] = d * d;
        for (std::size_t k = 0; k < s.n_users; ++k)
            s.ug(k, n) = std::pow(dist(traj.positions[n], sc.users[k].location), sc.users[k].alpha_ug);
    }
    return s;
}

TrajectoryProblem make_trajectory_problem(const Allocation &alloc, const ModePartition &part, const Scenario &sc,
                                          Bound bound, double rmin_scale)
{
    TrajectoryProblem pb;
    pb.n_users = sc.n_users();
    pb.n_f = alloc.n_f;
    pb.n_slots = alloc.n_slots;
    pb.slots.resize(pb.n_slots);
    pb.r_min = effective_rmin(sc, rmin_scale);
    pb.irs_pos = sc.irs.location;
    for (const auto &u : sc.users)
    {
        pb.user_pos.push_back(u.location);
        pb.alpha_ug.push_back(u.alpha_ug);
    }
    const std::size_t K = pb.n_users;
    std::vector<LinkCoeffs> coeffs(K * K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t kp = 0; kp < K; ++kp)
            coeffs[k * K + kp] = link_coeffs(k, kp, part.alpha, sc);
    const double sigma2 = sc.ofdm.sigma2();
    for (std::size_t n = 0; n < pb.n_slots; ++n)
    {
        const int kp = alloc.irs[n];
        if (kp < 0)
            continue;
        auto &terms = pb.slots[n];
        for (std::size_t i = 0; i < alloc.n_f; ++i)
        {
            const int k = alloc.user[n * alloc.n_f + i];
            const double p = alloc.power[n * alloc.n_f + i];
            if (k < 0 || p <= 0.0)
                continue;
            const LinkCoeffs &c = coeffs[std::size_t(k) * K + std::size_t(kp)];
            const int j = k == kp ? part.mode_of(i) : (bound == Bound::Lower ? 3 : 0);
            const double cross = c.cross(bound, j);
            const double snr = p / sigma2;
            auto it = std::find_if(terms.begin(), terms.end(), [&](const RateTerm &t) {
                return t.k == std::size_t(k) && t.c == cross && t.snr == snr;
            });
            if (it == terms.end())
                terms.push_back({std::size_t(k), c.a, c.b, cross, snr, 1.0});
            else
                it->count += 1.0;
        }
    }
    return pb;
}

double term_rate(const RateTerm &t, double v_ug, double v_ur)
{
    return exact_term(t, v_ug, v_ur).f;
}

double lb_slot_rate(const TrajectoryProblem &pb, std::size_t k, std::size_t n, const SlackPoint &v)
{
    double s = 0.0;
    for (const auto &t : pb.slots[n])
        if (t.k == k)
            s += t.count * term_rate(t, v.ug(k, n), v.v_ur[n]);
    return s;
}

double surrogate_rate(const TrajectoryProblem &pb, std::size_t k, std::size_t n, const SlackPoint &v,
                      const SlackPoint &anchor)
{
    double s = 0.0;
    for (const auto &t : pb.slots[n])
        if (t.k == k)
        {
            const LinearTerm L = linearize(t, anchor.ug(k, n), anchor.v_ur[n]);
            s += t.count * linear_eval(L, v.ug(k, n), v.v_ur[n]).f;
        }
    return s;
}

TrajectoryValue evaluate_trajectory(const TrajectoryProblem &pb, const Trajectory &traj)
{
    TrajectoryValue out;
    out.user_rates.assign(pb.n_users, 0.0);
    for (std::size_t n = 0; n < pb.n_slots; ++n)
    {
        const double dr = dist(traj.positions[n], pb.irs_pos);
        for (const auto &t : pb.slots[n])
        {
            const double v = std::pow(dist(traj.positions[n], pb.user_pos[t.k]), pb.alpha_ug[t.k]);
            out.user_rates[t.k] += t.count * term_rate(t, v, dr * dr);
        }
    }
    for (auto &r : out.user_rates)
    {
        r /= double(pb.n_slots);
        out.objective += r;
        r /= double(pb.n_f);
    }
    return out;
}

std::vector<Vec3> project_feasible(const std::vector<Vec3> &target, const std::vector<Vec3> &feasible,
                                   const UavLimits &lim)
{
    const std::size_t N = target.size();
    const double D = lim.step_limit();
    std::vector<Vec3> x = target;
    x.front() = lim.q_initial;
    x.back() = lim.q_final;
    std::vector<Vec3> inc_even(N), inc_odd(N), inc_box(N);

    auto apply = [&](std::vector<Vec3> &inc, auto &&proj) {
        std::vector<Vec3> z(N);
        for (std::size_t n = 0; n < N; ++n)
            z[n] = x[n] + inc[n];
        std::vector<Vec3> y = z;
        proj(y);
        for (std::size_t n = 0; n < N; ++n)
            inc[n] = z[n] - y[n];
        x = std::move(y);
    };
    auto pairs = [&](std::size_t first) {
        return [&, first](std::vector<Vec3> &y) {
            for (std::size_t n = first; n + 1 < N; n += 2)
                project_pair(y[n], y[n + 1], n == 0, n + 1 == N - 1, D);
        };
    };
    auto box = [&](std::vector<Vec3> &y) {
        for (std::size_t n = 1; n + 1 < N; ++n)
            y[n].z = std::clamp(y[n].z, zlo(lim), zhi(lim));
    };
    for (int pass = 0; pass < 3000; ++pass)
    {
        const std::vector<Vec3> prev = x;
        apply(inc_even, pairs(0));
        apply(inc_odd, pairs(1));
        apply(inc_box, box);
        double change = 0.0;
        for (std::size_t n = 0; n < N; ++n)
            change = std::max(change, (x[n] - prev[n]).norm());
        if (change < 1e-10 && chain_violation(x, lim) < 1e-10)
            break;
    }
    box(x);
    if (chain_ok(x, lim))
        return x;
    // Pull back along the segment towards the known-feasible point.
    double lo = 0.0, hi = 1.0;
    for (int t = 0; t < 60; ++t)
    {
        const double mid = 0.5 * (lo + hi);
        auto y = blend(feasible, x, mid);
        box(y);
        if (chain_ok(y, lim))
            lo = mid;
        else
            hi = mid;
    }
    auto y = blend(feasible, x, lo);
    box(y);
    return chain_ok(y, lim) ? y : feasible;
}

// Waypoints exactly above the IRS have no defined departure angle; shift them 1e-6 m.
static void nudge_off_irs(std::vector<Vec3> &q, const Vec3 &irs, const UavLimits &lim)
{
    constexpr double kNudge = 1e-6;
    const Vec3 shifts[] = {{kNudge, 0.0, 0.0}, {-kNudge, 0.0, 0.0}, {0.0, kNudge, 0.0}, {0.0, -kNudge, 0.0}};
    for (std::size_t n = 1; n + 1 < q.size(); ++n)
    {
        if (std::hypot(q[n].x - irs.x, q[n].y - irs.y) >= kNudge)
            continue;
        const Vec3 keep = q[n];
        for (const Vec3 &d : shifts)
        {
            q[n] = keep + d;
            if (chain_ok(q, lim))
                break;
            q[n] = keep;
        }
    }
}

ScaStep solve_sca_step(const Trajectory &anchor, const TrajectoryProblem &pb, const UavLimits &lim,
                       const ScaOptions &opts)
{
    SlackPoint a;
    a.n_users = pb.n_users;
    a.n_slots = pb.n_slots;
    a.v_ug.resize(a.n_users * a.n_slots);
    a.v_ur.resize(a.n_slots);
    for (std::size_t n = 0; n < pb.n_slots; ++n)
    {
        const double d = dist(anchor.positions[n], pb.irs_pos);
        a.v_ur[n] = d * d;
        for (std::size_t k = 0; k < pb.n_users; ++k)
            a.ug(k, n) = std::pow(dist(anchor.positions[n], pb.user_pos[k]), pb.alpha_ug[k]);
    }
    const Model model = build_model(pb, a);
    const std::vector<Vec3> &q0 = anchor.positions;
    const ModelEval e0 = eval_model(model, q0, false);
    const double j0 = total(e0);
    const bool anchor_ok = meets(e0.user, pb.r_min);

    std::vector<Vec3> best = q0;
    const std::size_t N = q0.size();
    if (anchor_ok && N > 2)
    {
        // Feasible ascent: the objective gradient is deflected so that rates close to their
        // floor increase to first order (the surrogate rates are concave, so tangent moves lose them).
        std::vector<Vec3> q = q0;
        ModelEval e = eval_model(model, q, true);
        double eta = std::max(1e-3, 0.25 * lim.step_limit());
        double window = 1e-3, push = 0.1;
        for (int it = 0; it < opts.inner_iter; ++it)
        {
            Field g(N);
            for (std::size_t k = 0; k < pb.n_users; ++k)
                for (std::size_t n = 0; n < N; ++n)
                    g[n] += e.grad[k][n];
            g = free_part(g, lim.freeze_altitude);
            const double gnorm = std::sqrt(dot(g, g));
            std::vector<Field> rows;
            std::vector<double> rhs;
            for (std::size_t k = 0; k < pb.n_users; ++k)
            {
                const double width = window * (1.0 + pb.r_min[k]);
                const double slack = e.user[k] - pb.r_min[k];
                if (pb.r_min[k] <= 0.0 || slack > width)
                    continue;
                rows.push_back(free_part(e.grad[k], lim.freeze_altitude));
                rhs.push_back(push * std::sqrt(dot(rows.back(), rows.back())) * gnorm * (1.0 - slack / width));
            }
            const Field d = rows.empty() ? g : project_halfspaces(g, rows, rhs);
            double dmax = 0.0;
            for (const auto &v : d)
                dmax = std::max(dmax, v.norm());
            bool accepted = false;
            if (dmax > 0.0)
            {
                const double now = total(e);
                for (double step = eta; step > 1e-6; step *= 0.5)
                {
                    std::vector<Vec3> target(N);
                    for (std::size_t n = 0; n < N; ++n)
                        target[n] = q[n] + d[n] * (step / dmax);
                    std::vector<Vec3> cand = project_feasible(target, q, lim);
                    double pred = 0.0;
                    for (std::size_t n = 1; n + 1 < N; ++n)
                        pred += g[n].dot(cand[n] - q[n]);
                    if (pred <= 0.0)
                        continue;
                    ModelEval ec = eval_model(model, cand, true);
                    if (holds(ec.user, pb.r_min, e0.user) && total(ec) > now && total(ec) - now >= 1e-4 * pred)
                    {
                        q = std::move(cand);
                        e = std::move(ec);
                        eta = std::min(2.0 * step, lim.step_limit());
                        accepted = true;
                        break;
                    }
                }
            }
            if (accepted)
                continue;
            // Protect more constraints, more firmly, before giving up.
            if (push < 1.0)
                push = std::min(1.0, push * 3.0);
            else if (window < 1e-1)
                window *= 10.0;
            else
                break;
            eta = std::max(1e-3, 0.25 * lim.step_limit());
        }
        best = q;
    }
    double mu = opts.penalty_scale * std::max(1.0, std::abs(j0));
    for (int attempt = 0; !(anchor_ok && N > 2) && attempt <= opts.penalty_doublings; ++attempt, mu *= 2.0)
    {
        std::vector<Vec3> q = q0;
        ModelEval e = eval_model(model, q, true);
        double phi = penalized(e, pb.r_min, mu);
        double eta = std::max(1e-3, 0.25 * lim.step_limit());
        for (int it = 0; it < opts.inner_iter && N > 2; ++it)
        {
            // Ascent direction: objective plus penalty on (nearly) active rate constraints.
            std::vector<Vec3> g(N);
            for (std::size_t k = 0; k < pb.n_users; ++k)
            {
                const double slack = e.user[k] - pb.r_min[k];
                const double wgt = 1.0 + (pb.r_min[k] > 0.0 && slack <= 1e-9 * (1.0 + pb.r_min[k]) ? mu : 0.0);
                for (std::size_t n = 1; n + 1 < N; ++n)
                    g[n] += e.grad[k][n] * wgt;
            }
            double gmax = 0.0;
            for (std::size_t n = 1; n + 1 < N; ++n)
            {
                if (lim.freeze_altitude)
                    g[n].z = 0.0;
                gmax = std::max(gmax, g[n].norm());
            }
            if (gmax == 0.0)
                break;
            bool accepted = false;
            while (eta > 1e-7)
            {
                std::vector<Vec3> target(N);
                for (std::size_t n = 0; n < N; ++n)
                    target[n] = q[n] + g[n] * (eta / gmax);
                std::vector<Vec3> cand = project_feasible(target, q, lim);
                double pred = 0.0, move = 0.0;
                for (std::size_t n = 1; n + 1 < N; ++n)
                {
                    pred += g[n].dot(cand[n] - q[n]);
                    move = std::max(move, (cand[n] - q[n]).norm());
                }
                if (move < 1e-9)
                {
                    eta *= 0.5;
                    if (move == 0.0)
                        break;
                    continue;
                }
                ModelEval ec = eval_model(model, cand, true);
                const double phic = penalized(ec, pb.r_min, mu);
                if (phic > phi && phic - phi >= 1e-4 * pred)
                {
                    q = std::move(cand);
                    e = std::move(ec);
                    phi = phic;
                    eta *= 1.5;
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted)
                break;
        }
        best = q;
        if (meets(e.user, pb.r_min) || !anchor_ok)
            break;
    }

    // Strict surrogate feasibility and no surrogate descent.
    ModelEval eb = eval_model(model, best, false);
    if (anchor_ok && !meets(eb.user, pb.r_min))
    {
        double lo = 0.0, hi = 1.0;
        for (int t = 0; t < 60; ++t)
        {
            const double mid = 0.5 * (lo + hi);
            if (meets(eval_model(model, blend(q0, best, mid), false).user, pb.r_min))
                lo = mid;
            else
                hi = mid;
        }
        best = blend(q0, best, lo);
        if (!chain_ok(best, lim))
            best = q0;
        eb = eval_model(model, best, false);
        if (!meets(eb.user, pb.r_min))
        {
            best = q0;
            eb = e0;
        }
    }
    if (!anchor_ok && !meets(eb.user, pb.r_min))
        throw SubproblemInfeasible("minimum-rate surrogate constraints cannot be met");
    if (total(eb) < j0)
    {
        best = q0;
        eb = e0;
    }

    nudge_off_irs(best, pb.irs_pos, lim);

    ScaStep out;
    out.trajectory = anchor;
    out.trajectory.positions = best;
    out.surrogate_objective = total(eb);
    out.slacks = a;
    for (std::size_t n = 0; n < N; ++n)
    {
        const double d = dist(best[n], pb.irs_pos);
        out.slacks.v_ur[n] = d * d;
        for (std::size_t k = 0; k < pb.n_users; ++k)
            out.slacks.ug(k, n) = std::pow(dist(best[n], pb.user_pos[k]), pb.alpha_ug[k]);
    }
    return out;
}

ScaResult solve_subproblem2(const TrajectoryProblem &pb, const Trajectory &q_init, const UavLimits &lim,
                            const ScaOptions &opts)
{
    ScaResult res;
    res.trajectory = q_init;
    TrajectoryValue cur = evaluate_trajectory(pb, q_init);
    res.trace.push_back(cur.objective);
    const bool start_ok = meets(cur.user_rates, pb.r_min);
    for (int l = 0; l < opts.max_iter; ++l)
    {
        ScaStep step = solve_sca_step(res.trajectory, pb, lim, opts);
        const TrajectoryValue nv = evaluate_trajectory(pb, step.trajectory);
        if (nv.objective < cur.objective || (start_ok && !meets(nv.user_rates, pb.r_min)))
            break;
        const double rel = (nv.objective - cur.objective) / std::max(std::abs(cur.objective), 1e-300);
        res.trajectory = std::move(step.trajectory);
        cur = nv;
        res.trace.push_back(cur.objective);
        if (rel < opts.tol)
            break;
    }
    return res;
}

} // namespace irsuav
