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

#pragma once

#include "tfpsp/pilot.hpp"

#include <vector>

namespace tfpsp
{

struct OverlapGraph
{
    std::size_t n = 0;
    double gamma = 0.0;
    std::vector<std::vector<std::size_t>> adj; // sorted neighbour lists
    std::vector<std::vector<double>> weight;   // dense n x n eta values (0 off edges)

    std::size_t degree(std::size_t v) const { return adj[v].size(); }
    std::size_t edge_count() const;
    std::size_t max_degree() const;
    void add_edge(std::size_t u, std::size_t v, double w = 1.0);
};

OverlapGraph empty_graph(std::size_t n);

struct UTGroups
{
    std::vector<std::size_t> color; // 1..C per UT
    std::size_t C = 0;
    std::vector<std::vector<std::size_t>> members() const; // members()[c-1]
};

// Overlap of A shifted by (d_tau, d_nu) cells against B, both sparse on their supports.
// Zero when either operand is all-zero.
double shifted_eta(const RealTensor &A, const std::vector<std::size_t> &SA, long long d_tau, long long d_nu,
                   const RealTensor &B);

OverlapGraph build_overlap_graph(const std::vector<RealTensor> &W, double gamma);

UTGroups dsatur_group(const OverlapGraph &g);

bool is_proper_coloring(const OverlapGraph &g, const std::vector<std::size_t> &color);

// Exhaustive chromatic number (small graphs only).
std::size_t chromatic_number_bruteforce(const OverlapGraph &g);

enum class PilotScheme
{
    tfpsp,
    fpsp // frequency-only shifts, varphi = 0 for every UT
};

struct ScheduleOptions
{
    double gamma = 0.05;
    std::size_t phi_stride = 0; // 0 selects N_f
    bool full_phi_scan = false;
    PilotScheme scheme = PilotScheme::tfpsp;
};

struct ScheduleReport
{
    std::size_t groups = 0;
    double max_residual_eta = 0.0; // largest eta accepted for a group against the scheduled union
    double objective = 0.0;
};

PilotAssignment assign_tfpsp(const UTGroups &groups, const std::vector<RealTensor> &W, const TBGrid &grid,
                             const SystemConfig &cfg, const ScheduleOptions &opt, ScheduleReport *report = nullptr);

double schedule_objective(const std::vector<RealTensor> &W, const PilotAssignment &a, const TBGrid &grid);

// Graph, grouping and assignment in one call.
PilotAssignment schedule(const std::vector<RealTensor> &W, const TBGrid &grid, const SystemConfig &cfg,
                         const ScheduleOptions &opt, ScheduleReport *report = nullptr);

} // namespace tfpsp
