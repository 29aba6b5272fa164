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

#include "irsuav/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using irsuav::run;

namespace
{

const char *kSmall = R"(users:
  - location: [60, 150, 0]
    r_min: 0.2
  - location: [170, 40, 0]
    r_min: 0.2
irs:
  location: [100, 200, 30]
  m_r: 8
  m_c: 8
  amplitude: AMP
ofdm:
  n_f: 16
uav:
  q_initial: [0, 0, 100]
  q_final: [200, 200, 100]
  n_slots: 16
experiment:
  seed: 4
  mc_runs: 6
  kappa_sweep_db: [2, 14]
)";

struct Sandbox
{
    fs::path root;
    Sandbox()
    {
        root = fs::temp_directory_path() / ("irsuav_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(root);
    }
    ~Sandbox() { fs::remove_all(root); }

    std::string scenario(const std::string &name, const std::string &text) const
    {
        const fs::path p = root / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

std::string small(double amp = 0.9, const std::string &rmin = "0.2")
{
    std::string s = kSmall;
    s.replace(s.find("AMP"), 3, std::to_string(amp));
    for (std::size_t at = s.find("r_min: 0.2"); at != std::string::npos; at = s.find("r_min: 0.2", at + 1))
        s.replace(at + 7, 3, rmin);
    return s;
}

int invoke(std::vector<std::string> args, std::string *err_text = nullptr)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    if (err_text)
        *err_text = err.str();
    return code;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> rows(const fs::path &p)
{
    std::vector<std::vector<std::string>> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line))
    {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

} // namespace

TEST_CASE("solve writes a self-describing, reproducible bundle")
{
    Sandbox box;
    const std::string sc = box.scenario("s.yaml", small());
    const fs::path a = box.root / "a", b = box.root / "b";
    REQUIRE(invoke({"solve", "--scenario", sc, "--out", a.string()}) == 0);
    REQUIRE(invoke({"solve", "--scenario", sc, "--out", b.string()}) == 0);
    for (const char *name : {"trajectory.csv", "allocation.csv", "users.csv", "rates.csv"})
    {
        REQUIRE(fs::exists(a / name));
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(rows(a / "trajectory.csv")[0] == std::vector<std::string>{"n", "x", "y", "z"});
    CHECK(rows(a / "trajectory.csv").size() == 17);
    CHECK(rows(a / "allocation.csv")[0] == std::vector<std::string>{"n", "i", "k", "k_irs", "p"});
    const auto trace = rows(a / "rates.csv");
    CHECK(trace[0] == std::vector<std::string>{"iteration", "step", "lb_raw", "lb"});
    for (std::size_t r = 2; r < trace.size(); ++r)
        CHECK(std::stod(trace[r][2]) >= std::stod(trace[r - 1][2]) * (1.0 - 1e-8));
    const std::string meta = slurp(a / "metadata.json");
    CHECK(meta.find("\"git_describe\"") != std::string::npos);
    CHECK(meta.find("\"seed\": 4") != std::string::npos);
}

TEST_CASE("exit codes")
{
    Sandbox box;
    std::string err;
    const std::string missing = box.scenario("m.yaml", "users:\n  - r_min: 0.2\nirs:\n  location: [0, 0, 30]\n");
    CHECK(invoke({"solve", "--scenario", missing, "--out", (box.root / "m").string()}, &err) == 1);
    CHECK(err.find("users[0].location") != std::string::npos);

    const std::string sc = box.scenario("s.yaml", small());
    CHECK(invoke({"solve", "--scenario", sc, "--alpha", "0.3", "--out", (box.root / "x").string()}, &err) == 1);
    CHECK(err.find("alpha") != std::string::npos);
    CHECK(invoke({"launch", "--scenario", sc}) == 1);
    CHECK(invoke({"solve"}) == 1);
    CHECK(invoke({"baselines", "--scenario", sc, "--baseline", "7"}) == 1);
    CHECK(invoke({"solve", "--scenario", (box.root / "absent.yaml").string()}) == 1);

    const std::string hard = box.scenario("h.yaml", small(0.9, "9.0"));
    CHECK(invoke({"solve", "--scenario", hard, "--out", (box.root / "h").string()}, &err) == 2);
    CHECK(err.find("infeasible") != std::string::npos);
}

TEST_CASE("channel probe without reflection is flat across subcarriers")
{
    Sandbox box;
    const fs::path out = box.root / "p";
    REQUIRE(invoke({"channel-probe", "--scenario", box.scenario("z.yaml", small(0.0)), "--out", out.string()}) == 0);
    const auto t = rows(out / "channel_probe.csv");
    CHECK(t[0] == std::vector<std::string>{"n", "k", "i", "gain", "peak", "trough", "dc", "period_subcarriers"});
    std::map<std::pair<std::string, std::string>, std::string> first;
    for (std::size_t r = 1; r < t.size(); ++r)
    {
        const auto key = std::make_pair(t[r][0], t[r][1]);
        auto [it, fresh] = first.emplace(key, t[r][3]);
        if (!fresh)
            CHECK(t[r][3] == it->second);
    }
    CHECK(t.size() == 1 + 16 * 2 * 16);

    const fs::path lit = box.root / "q";
    REQUIRE(invoke({"channel-probe", "--scenario", box.scenario("l.yaml", small()), "--irs-user", "2", "--out",
                    lit.string()}) == 0);
    const auto u = rows(lit / "channel_probe.csv");
    bool varies = false;
    for (std::size_t r = 2; r < u.size(); ++r)
        if (u[r][0] == u[r - 1][0] && u[r][1] == u[r - 1][1] && u[r][3] != u[r - 1][3])
            varies = true;
    CHECK(varies);
}

TEST_CASE("other subcommands run on a small scenario")
{
    Sandbox box;
    const std::string sc = box.scenario("s.yaml", small());
    const fs::path base = box.root / "b", out = box.root / "o", sw = box.root / "w";
    CHECK(invoke({"baselines", "--scenario", sc, "--baseline", "1", "--out", base.string()}) == 0);
    const auto b = rows(base / "baselines.csv");
    CHECK(b[0] == std::vector<std::string>{"scheme", "lb_raw", "lb", "feasible", "iterations"});
    CHECK(b.size() == 2);

    CHECK(invoke({"outage", "--scenario", sc, "--mc-runs", "4", "--out", out.string()}) == 0);
    const auto o = rows(out / "outage.csv");
    REQUIRE(o.size() == 3);
    for (std::size_t r = 1; r < o.size(); ++r)
        CHECK(std::stod(o[r][2]) <= std::stod(o[r][4]) * (1.0 + 1e-8));
    const std::string first = slurp(out / "outage.csv");
    CHECK(invoke({"outage", "--scenario", sc, "--mc-runs", "4", "--out", out.string()}) == 0);
    CHECK(slurp(out / "outage.csv") == first);

    std::string grid = small();
    grid.replace(grid.find("experiment:\n"), 12, "experiment:\n  alpha_grid: [0.1, 0.14]\n");
    CHECK(invoke({"sweep-alpha", "--scenario", box.scenario("g.yaml", grid), "--out", sw.string()}) == 0);
    const auto a = rows(sw / "alpha_sweep.csv");
    CHECK(a[0] == std::vector<std::string>{"alpha", "lb", "ub"});
    CHECK(a.size() == 3);
}
