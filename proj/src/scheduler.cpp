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

#include "tfpsp/scheduler.hpp"

#include "phase.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace tfpsp
{

std::size_t OverlapGraph::edge_count() const
{
    std::size_t e = 0;
    for (const auto &a : adj)
        e += a.size();
    return e / 2;
}

std::size_t OverlapGraph::max_degree() const
{
    std::size_t d = 0;
    for (const auto &a : adj)
        d = std::max(d, a.size());
    return d;
}

void OverlapGraph::add_edge(std::size_t u, std::size_t v, double w)
{
    if (u == v || u >= n || v >= n)
        throw std::invalid_argument("add_edge: invalid vertex pair");
    if (std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end())
        return;
    adj[u].insert(std::upper_bound(adj[u].begin(), adj[u].end(), v), v);
    adj[v].insert(std::upper_bound(adj[v].begin(), adj[v].end(), u), u);
    weight[u][v] = weight[v][u] = w;
}

OverlapGraph empty_graph(std::size_t n)
{
    OverlapGraph g;
    g.n = n;
    g.adj.assign(n, {});
    g.weight.assign(n, std::vector<double>(n, 0.0));
    return g;
}

std::vector<std::vector<std::size_t>> UTGroups::members() const
{
    std::vector<std::vector<std::size_t>> m(C);
    for (std::size_t u = 0; u < color.size(); ++u)
        m[color[u] - 1].push_back(u);
    return m;
}

double shifted_eta(const RealTensor &A, const std::vector<std::size_t> &SA, long long d_tau, long long d_nu,
                   const RealTensor &B)
{
    const double na = A.norm2(), nb = B.norm2();
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    const std::size_t N0 = A.dim(0), N1 = A.dim(1), N2 = A.dim(2);
    double dot = 0.0;
    for (std::size_t j : SA)
    {
        const std::size_t i0 = j % N0, i1 = (j / N0) % N1, i2 = j / (N0 * N1);
        // Cyclic shift by L moves entry j to position j - L.
        const std::size_t p1 = (std::size_t)detail::pmod((long long)i1 - d_tau, (long long)N1);
        const std::size_t p2 = (std::size_t)detail::pmod((long long)i2 - d_nu, (long long)N2);
        dot += A[j] * B[i0 + N0 * (p1 + N1 * p2)];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

OverlapGraph build_overlap_graph(const std::vector<RealTensor> &W, double gamma)
{
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("build_overlap_graph: gamma must lie in [0, 1)");
    OverlapGraph g = empty_graph(W.size());
    g.gamma = gamma;
    std::vector<std::vector<std::size_t>> S;
    for (const auto &w : W)
        S.push_back(support_of(w));
    for (std::size_t u = 0; u < W.size(); ++u)
        for (std::size_t v = u + 1; v < W.size(); ++v)
        {
            const double eta = shifted_eta(W[u], S[u], 0, 0, W[v]);
            if (eta > gamma)
                g.add_edge(u, v, eta);
        }
    return g;
}

UTGroups dsatur_group(const OverlapGraph &g)
{
    UTGroups r;
    r.color.assign(g.n, 0);
    if (g.n == 0)
        return r;
    std::vector<std::vector<bool>> seen(g.n); // seen[v][c]: colour c present around v
    std::vector<std::size_t> sat(g.n, 0);

    auto pick = [&]() {
        std::size_t best = g.n;
        for (std::size_t v = 0; v < g.n; ++v)
        {
            if (r.color[v])
                continue;
            if (best == g.n || sat[v] > sat[best] || (sat[v] == sat[best] && g.degree(v) > g.degree(best)))
                best = v;
        }
        return best;
    };

    for (std::size_t step = 0; step < g.n; ++step)
    {
        const std::size_t v = pick(); // first step: all saturations are 0, so this is the max-degree vertex
        std::size_t c = 1;
        while (c < seen[v].size() && seen[v][c])
            ++c;
        r.color[v] = c;
        r.C = std::max(r.C, c);
        for (std::size_t w : g.adj[v])
        {
            if (seen[w].size() <= c)
                seen[w].resize(c + 1, false);
            if (!seen[w][c])
            {
                seen[w][c] = true;
                ++sat[w];
            }
        }
    }
    return r;
}

bool is_proper_coloring(const OverlapGraph &g, const std::vector<std::size_t> &color)
{
    if (color.size() != g.n)
        return false;
    for (std::size_t u = 0; u < g.n; ++u)
    {
        if (color[u] == 0)
            return false;
        for (std::size_t v : g.adj[u])
            if (color[u] == color[v])
                return false;
    }
    return true;
}

std::size_t chromatic_number_bruteforce(const OverlapGraph &g)
{
    if (g.n == 0)
        return 0;
    std::vector<std::size_t> col(g.n, 0);
    std::function<bool(std::size_t, std::size_t)> fill = [&](std::size_t v, std::size_t k) {
        if (v == g.n)
            return true;
        for (std::size_t c = 1; c <= k; ++c)
        {
            bool ok = true;
            for (std::size_t w : g.adj[v])
                if (w < v && col[w] == c)
                {
                    ok = false;
                    break;
                }
            if (!ok)
                continue;
            col[v] = c;
            if (fill(v + 1, k))
                return true;
        }
        col[v] = 0;
        return false;
    };
    for (std::size_t k = 1; k <= g.n; ++k)
        if (fill(0, k))
            return k;
    return g.n;
}

PilotAssignment assign_tfpsp(const UTGroups &groups, const std::vector<RealTensor> &W, const TBGrid &grid,
                             const SystemConfig &cfg, const ScheduleOptions &opt, ScheduleReport *report)
{
    PilotAssignment a;
    a.pairs.assign(W.size(), PhasePair{});
    ScheduleReport rep;
    rep.groups = groups.C;
    if (W.empty())
    {
        if (report)
            *report = rep;
        return a;
    }

    const std::size_t stride = opt.full_phi_scan ? 1 : (opt.phi_stride ? opt.phi_stride : cfg.N_f());
    const std::size_t n_varphi = opt.scheme == PilotScheme::fpsp ? 1 : cfg.N_p;
    const auto members = groups.members();

    RealTensor sched(grid.shape());
    for (std::size_t gi = 0; gi < members.size(); ++gi)
    {
        RealTensor agg(grid.shape());
        for (std::size_t u : members[gi])
            for (std::size_t i = 0; i < agg.size(); ++i)
                agg[i] += W[u][i];
        const auto S = support_of(agg);

        PhasePair chosen{};
        if (gi > 0)
        {
            double best = std::numeric_limits<double>::infinity();
            bool found = false;
            // Time shifts first: every varphi is tried before phi advances.
            for (std::size_t phi = 0; phi < cfg.K && !found; phi += stride)
                for (std::size_t vp = 0; vp < n_varphi; ++vp)
                {
                    const PhasePair p{phi, vp};
                    const double eta = shifted_eta(agg, S, PilotAssignment::L_phi(p, grid),
                                                   PilotAssignment::L_varphi(p, grid), sched);
                    if (eta < best)
                    {
                        best = eta;
                        chosen = p;
                    }
                    if (eta <= opt.gamma)
                    {
                        chosen = p;
                        best = eta;
                        found = true;
                        break;
                    }
                }
            rep.max_residual_eta = std::max(rep.max_residual_eta, best);
        }
        for (std::size_t u : members[gi])
            a.pairs[u] = chosen;
        const RealTensor shifted = equivalent_shift(agg, chosen, grid);
        for (std::size_t i = 0; i < sched.size(); ++i)
            sched[i] += shifted[i];
    }
    rep.objective = schedule_objective(W, a, grid);
    if (report)
        *report = rep;
    return a;
}

double schedule_objective(const std::vector<RealTensor> &W, const PilotAssignment &a, const TBGrid &grid)
{
    std::vector<RealTensor> s;
    std::vector<std::vector<std::size_t>> S;
    for (std::size_t u = 0; u < W.size(); ++u)
    {
        s.push_back(equivalent_shift(W[u], a.pairs[u], grid));
        S.push_back(support_of(s.back()));
    }
    double obj = 0.0;
    for (std::size_t u = 0; u < s.size(); ++u)
        for (std::size_t v = u + 1; v < s.size(); ++v)
            obj += 2.0 * shifted_eta(s[u], S[u], 0, 0, s[v]);
    return obj;
}

PilotAssignment schedule(const std::vector<RealTensor> &W, const TBGrid &grid, const SystemConfig &cfg,
                         const ScheduleOptions &opt, ScheduleReport *report)
{
    const OverlapGraph g = build_overlap_graph(W, opt.gamma);
    const UTGroups groups = dsatur_group(g);
    return assign_tfpsp(groups, W, grid, cfg, opt, report);
}

} // namespace tfpsp
