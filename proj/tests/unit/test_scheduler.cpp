// SPDX-License-Identifier: Apache-2.0
//
// tfpsp: tensor channel estimation library and simulator
// Copyright (C) 2026 The tfpsp authors
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

#include "common.hpp"
#include "doctest.h"

#include "tfpsp/scheduler.hpp"

#include <set>

using namespace tfpsp;

namespace
{

SystemConfig sched_cfg()
{
    SystemConfig c;
    c.M = 4;
    c.K = 12;
    c.N_c = 48;
    c.N_g = 8; // N_f = 2
    c.N_b = 2;
    c.N_p = 4;
    return c;
}

RealTensor random_power(const Shape &s, double density, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealTensor W(s);
    for (auto &x : W.values())
        x = u(rng) < density ? u(rng) : 0.0;
    if (W.norm2() == 0.0)
        W[0] = 1.0;
    return W;
}

OverlapGraph random_graph(std::size_t n, double p, std::mt19937_64 &rng)
{
    std::bernoulli_distribution e(p);
    OverlapGraph g = empty_graph(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (e(rng))
                g.add_edge(u, v);
    return g;
}

// Pairwise eta of shifted powers, written directly from the definition.
double objective_oracle(const std::vector<RealTensor> &W, const PilotAssignment &a, const TBGrid &g)
{
    std::vector<RealTensor> s;
    for (std::size_t u = 0; u < W.size(); ++u)
    {
        RealTensor t(W[u].shape());
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            auto x = t.index(i);
            const long long Lt = -(long long)a.pairs[u].phi * (long long)g.F_tau;
            const long long Ln = (long long)a.pairs[u].varphi * (long long)g.F_nu;
            x[1] = std::size_t(((long long)x[1] + Lt) % (long long)g.N_tau + (long long)g.N_tau) % g.N_tau;
            x[2] = std::size_t(((long long)x[2] + Ln) % (long long)g.N_nu + (long long)g.N_nu) % g.N_nu;
            t[i] = W[u][W[u].offset(x)];
        }
        s.push_back(std::move(t));
    }
    double obj = 0.0;
    for (std::size_t u = 0; u < s.size(); ++u)
        for (std::size_t v = 0; v < s.size(); ++v)
        {
            if (u == v)
                continue;
            double ab = 0.0, aa = 0.0, bb = 0.0;
            for (std::size_t i = 0; i < s[u].size(); ++i)
            {
                ab += s[u][i] * s[v][i];
                aa += s[u][i] * s[u][i];
                bb += s[v][i] * s[v][i];
            }
            obj += ab / std::sqrt(aa * bb);
        }
    return obj;
}

} // namespace

TEST_SUITE("scheduler")
{

TEST_CASE("overlap graph")
{
    const Shape s{4, 1, 1};
    SUBCASE("disjoint supports")
    {
        std::vector<RealTensor> W;
        for (std::size_t u = 0; u < 4; ++u)
            W.push_back(testutil::cell_power(s, u, 0, 0));
        const OverlapGraph g = build_overlap_graph(W, 0.05);
        CHECK(g.edge_count() == 0);
    }
    SUBCASE("identical powers give a complete graph")
    {
        std::vector<RealTensor> W(5, testutil::cell_power(s, 2, 0, 0));
        const OverlapGraph g = build_overlap_graph(W, 0.05);
        CHECK(g.edge_count() == 10);
        for (std::size_t u = 0; u < 5; ++u)
            CHECK(g.weight[u][u] == 0.0);
    }
    SUBCASE("three UTs with overlaps 0.6, 0.05, 0.3")
    {
        // Non-negative vectors whose pairwise cosines are 0.6 (a,b), 0.05 (a,c), 0.3 (b,c).
        const RealTensor a(s, {1.0, 0.47554357, 0.0, 0.05335524});
        const RealTensor b(s, {0.26406306, 1.0, 0.40822634, 0.0});
        const RealTensor c(s, {0.02940103, 0.0, 1.0, 0.7445032});
        CHECK(overlap_eta(a, b) == doctest::Approx(0.6).epsilon(1e-7));
        CHECK(overlap_eta(a, c) == doctest::Approx(0.05).epsilon(1e-6));
        CHECK(overlap_eta(b, c) == doctest::Approx(0.3).epsilon(1e-7));
        const OverlapGraph g = build_overlap_graph({a, b, c}, 0.1);
        CHECK(g.edge_count() == 2);
        CHECK(g.adj[0] == std::vector<std::size_t>{1});
        CHECK(g.adj[2] == std::vector<std::size_t>{1});
        CHECK(g.weight[0][1] == doctest::Approx(0.6).epsilon(1e-7));
    }
    SUBCASE("random instances: edges exactly where eta exceeds the threshold")
    {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 20; ++trial)
        {
            std::vector<RealTensor> W;
            for (int u = 0; u < 6; ++u)
                W.push_back(random_power({4, 3, 2}, 0.3, rng));
            const OverlapGraph g = build_overlap_graph(W, 0.2);
            for (std::size_t u = 0; u < 6; ++u)
            {
                CHECK(std::find(g.adj[u].begin(), g.adj[u].end(), u) == g.adj[u].end());
                for (std::size_t v = 0; v < 6; ++v)
                {
                    if (u == v)
                        continue;
                    const bool edge = std::find(g.adj[u].begin(), g.adj[u].end(), v) != g.adj[u].end();
                    CHECK(edge == (overlap_eta(W[u], W[v]) > 0.2));
                    CHECK(g.weight[u][v] == g.weight[v][u]);
                }
            }
        }
    }
    CHECK_THROWS_AS(build_overlap_graph({}, 1.0), std::invalid_argument);
}

TEST_CASE("DSatur")
{
    SUBCASE("empty graph")
    {
        const UTGroups r = dsatur_group(empty_graph(5));
        CHECK(r.C == 1);
        for (std::size_t c : r.color)
            CHECK(c == 1);
    }
    SUBCASE("K4")
    {
        OverlapGraph g = empty_graph(4);
        for (std::size_t u = 0; u < 4; ++u)
            for (std::size_t v = u + 1; v < 4; ++v)
                g.add_edge(u, v);
        const UTGroups r = dsatur_group(g);
        CHECK(r.C == 4);
        CHECK(is_proper_coloring(g, r.color));
    }
    SUBCASE("C5")
    {
        OverlapGraph g = empty_graph(5);
        for (std::size_t u = 0; u < 5; ++u)
            g.add_edge(u, (u + 1) % 5);
        const UTGroups r = dsatur_group(g);
        CHECK(r.C == 3);
        CHECK(is_proper_coloring(g, r.color));
        CHECK(chromatic_number_bruteforce(g) == 3);
    }
    SUBCASE("starts at the maximum-degree vertex")
    {
        OverlapGraph g = empty_graph(5);
        g.add_edge(3, 0);
        g.add_edge(3, 1);
        g.add_edge(3, 4);
        g.add_edge(1, 2);
        const UTGroups r = dsatur_group(g);
        CHECK(r.color[3] == 1);
    }
    SUBCASE("random graphs: proper, colours 1..C all used, C <= max degree + 1")
    {
        std::mt19937_64 rng(42);
        std::size_t optimal = 0, small = 0;
        for (int trial = 0; trial < 200; ++trial)
        {
            const std::size_t n = 2 + trial % 12;
            const OverlapGraph g = random_graph(n, 0.1 + 0.8 * double(trial % 7) / 6.0, rng);
            const UTGroups r = dsatur_group(g);
            CHECK(is_proper_coloring(g, r.color));
            CHECK(r.C <= g.max_degree() + 1);
            std::set<std::size_t> used(r.color.begin(), r.color.end());
            CHECK(used.size() == r.C);
            CHECK(*used.begin() == 1);
            CHECK(*used.rbegin() == r.C);
            if (n <= 8)
            {
                const std::size_t chi = chromatic_number_bruteforce(g);
                CHECK(r.C >= chi);
                ++small;
                optimal += r.C == chi;
            }
            CHECK(dsatur_group(g).color == r.color);
        }
        MESSAGE("DSatur optimal on " << optimal << " of " << small << " graphs with n <= 8");
    }
}

TEST_CASE("phase assignment")
{
    const SystemConfig c = sched_cfg();
    REQUIRE(c.N_f() == 2);

    SUBCASE("a single group gets (0, 0)")
    {
        const TBGrid g = make_grid(c, 1, 1, 1);
        std::vector<RealTensor> W(3, testutil::cell_power(g.shape(), 0, 0, 0));
        UTGroups grp;
        grp.color = {1, 1, 1};
        grp.C = 1;
        const PilotAssignment a = assign_tfpsp(grp, W, g, c, {});
        for (const auto &p : a.pairs)
            CHECK(p == PhasePair{0, 0});
    }
    SUBCASE("two groups on the same cell separate with a time shift")
    {
        const TBGrid g = make_grid(c, 1, 1, 1);
        std::vector<RealTensor> W(2, testutil::cell_power(g.shape(), 1, 0, 2));
        ScheduleReport rep;
        const PilotAssignment a = schedule(W, g, c, {}, &rep);
        CHECK(rep.groups == 2);
        CHECK(a.pairs[0] == PhasePair{0, 0});
        CHECK(a.pairs[1] == PhasePair{0, 1});
        CHECK(rep.max_residual_eta == 0.0);
        CHECK(rep.objective == 0.0);
        CHECK(theorem1_condition(W, a, g).satisfied);

        ScheduleOptions f;
        f.scheme = PilotScheme::fpsp;
        const PilotAssignment b = schedule(W, g, c, f, &rep);
        CHECK(b.pairs[1].varphi == 0);
        CHECK(b.pairs[1].phi == c.N_f());
    }
    SUBCASE("inseparable supports fall back to the argmin pair")
    {
        const TBGrid g = make_grid(c, 1, 1, 1);
        RealTensor full(g.shape());
        for (auto &x : full.values())
            x = 1.0;
        ScheduleReport rep;
        const PilotAssignment a = schedule({full, full}, g, c, {}, &rep);
        CHECK(rep.groups == 2);
        CHECK(rep.max_residual_eta == doctest::Approx(1.0));
        CHECK(a.pairs[1] == PhasePair{0, 0});
    }
}

TEST_CASE("schedule objective")
{
    const SystemConfig c = sched_cfg();
    const TBGrid g = make_grid(c, 2, 2, 2);
    std::vector<RealTensor> same(4, testutil::cell_power(g.shape(), 1, 1, 1));
    PilotAssignment zero;
    zero.pairs.assign(4, {});
    CHECK(schedule_objective(same, zero, g) == doctest::Approx(12.0));

    PilotAssignment sep;
    sep.pairs = {{0, 0}, {0, 1}, {0, 2}, {0, 3}};
    CHECK(schedule_objective(same, sep, g) == 0.0);

    std::mt19937_64 rng(43);
    std::uniform_int_distribution<std::size_t> phi(0, c.K - 1), vp(0, c.N_p - 1);
    for (int trial = 0; trial < 30; ++trial)
    {
        std::vector<RealTensor> W;
        PilotAssignment a;
        for (int u = 0; u < 4; ++u)
        {
            W.push_back(random_power(g.shape(), 0.05, rng));
            a.pairs.push_back({phi(rng), vp(rng)});
        }
        CHECK(schedule_objective(W, a, g) == doctest::Approx(objective_oracle(W, a, g)).epsilon(1e-12));
    }
}

TEST_CASE("scheduler properties on random instances")
{
    const SystemConfig c = sched_cfg();
    const TBGrid g = make_grid(c, 1, 1, 1);
    std::mt19937_64 rng(44);

    SUBCASE("never worse than the all-zero assignment, deterministic")
    {
        std::size_t worse = 0;
        for (int trial = 0; trial < 100; ++trial)
        {
            std::vector<RealTensor> W;
            for (int u = 0; u < 6; ++u)
                W.push_back(random_power(g.shape(), 0.08, rng));
            ScheduleReport rep;
            const PilotAssignment a = schedule(W, g, c, {}, &rep);
            PilotAssignment zero;
            zero.pairs.assign(W.size(), {});
            const double obj = schedule_objective(W, a, g);
            CHECK(obj == doctest::Approx(rep.objective));
            worse += obj > schedule_objective(W, zero, g) + 1e-12;
            CHECK(schedule(W, g, c, {}).pairs == a.pairs);
        }
        CHECK(worse == 0);
    }
    SUBCASE("within twice the exhaustive optimum (regression statistic)")
    {
        std::size_t within = 0, total = 0;
        for (int trial = 0; trial < 30; ++trial)
        {
            std::vector<RealTensor> W;
            for (int u = 0; u < 3; ++u)
                W.push_back(random_power(g.shape(), 0.1, rng));
            const PilotAssignment alg = schedule(W, g, c, {});
            const double got = schedule_objective(W, alg, g);

            // The objective only depends on relative shifts, so UT 0 stays at (0, 0).
            std::vector<PhasePair> space;
            for (std::size_t v = 0; v < c.N_p; ++v)
                for (std::size_t p = 0; p < c.K; p += c.N_f())
                    space.push_back({p, v});
            double best = 1e300;
            PilotAssignment t;
            t.pairs.assign(3, {});
            for (const auto &p1 : space)
                for (const auto &p2 : space)
                {
                    t.pairs[1] = p1;
                    t.pairs[2] = p2;
                    best = std::min(best, schedule_objective(W, t, g));
                }
            CHECK(got >= best - 1e-12);
            ++total;
            within += got <= 2.0 * best + 1e-12;
        }
        MESSAGE("greedy within 2x of the optimum on " << within << " of " << total << " instances");
    }
}

} // TEST_SUITE
