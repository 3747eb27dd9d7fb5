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

#include "tfpsp/estimator.hpp"
#include "tfpsp/scheduler.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tfpsp
{

enum class EstimatorKind
{
    iga,
    mmse
};

const char *to_string(PilotScheme s);
const char *to_string(EstimatorKind e);

constexpr int spec_schema_version = 1;

struct ScenarioSpec
{
    SystemConfig cfg; // sigma_z is replaced per SNR point
    std::size_t F_theta = 2, F_tau = 2, F_nu = 2;
    GeneratorSettings gen;
    std::vector<PilotScheme> schemes{PilotScheme::tfpsp};
    std::vector<EstimatorKind> estimators{EstimatorKind::iga};
    EstimatorConfig est;
    ScheduleOptions sched;
    std::vector<double> snr_db{20.0}; // SNR = sigma_p / sigma_z
    std::size_t trials = 10;
    std::uint64_t master_seed = 1;
    bool predict = false;
    std::size_t threads = 1; // 0 selects the hardware concurrency
    std::size_t mmse_cap = 4096;

    void validate() const;
    TBGrid grid() const { return make_grid(cfg, F_theta, F_tau, F_nu); }
};

// Desk-scale defaults: M=16, K=48, N_c=256, N_g=16, N_p=4, N_b=4, F=2, 4 paths per UT.
ScenarioSpec desk_profile(std::size_t U = 24);
// Full-size parameter set; long-running.
ScenarioSpec full_profile(std::size_t U = 48);

double sigma_z_for_snr(double sigma_p, double snr_db);

// Mean over UTs of ||est - truth||^2 / ||truth||^2; zero-energy truths are skipped and counted.
double nmse(const std::vector<DenseTensor> &estimates, const std::vector<DenseTensor> &truths,
            std::size_t *skipped = nullptr);
double nmse_db(double nmse_linear); // floored at -200 dB

struct TrialOutcome
{
    double snr_db = 0.0;
    PilotScheme scheme = PilotScheme::tfpsp;
    EstimatorKind estimator = EstimatorKind::iga;
    std::uint64_t seed = 0;
    bool ok = true;
    bool diverged = false;
    std::string error;
    double nmse = 0.0;       // pilot segment
    double nmse_pred = -1.0; // data segment, predicted (negative when not computed)
    double nmse_stale = -1.0; // data segment, last pilot estimate held
    std::size_t iterations = 0;
    bool converged = true;
    double final_change = 0.0;
    std::size_t groups = 0;
    double max_residual_eta = 0.0;
    double objective = 0.0;
    double wall_s = 0.0;
};

struct Scenario
{
    SystemConfig cfg;
    std::size_t F_theta = 2, F_tau = 2, F_nu = 2;
    std::vector<PathSet> paths; // per UT

    TBGrid grid() const { return make_grid(cfg, F_theta, F_tau, F_nu); }
    std::vector<UserChannel> channels() const;
};

Scenario make_scenario(const ScenarioSpec &spec, std::uint64_t trial_seed);

// One trial for every (SNR, scheme, estimator) combination with shared channel and noise draws.
std::vector<TrialOutcome> run_trial(const ScenarioSpec &spec, std::uint64_t trial_seed);

struct SweepRow
{
    double snr_db = 0.0;
    std::string scheme;
    std::string estimator;
    double mean_nmse_db = 0.0; // 10 log10 of the mean linear NMSE
    double std_nmse_db = 0.0;  // standard deviation of per-trial NMSE in dB
    double mean_iters = 0.0;
    std::size_t trials = 0;    // successful trials
};

struct SweepResult
{
    std::vector<TrialOutcome> outcomes; // sorted by (snr, scheme, estimator, trial)
    std::vector<SweepRow> rows;         // sorted by (snr, scheme, estimator)
    std::size_t failed = 0;
};

SweepResult sweep(const ScenarioSpec &spec);
std::vector<SweepRow> aggregate(const std::vector<TrialOutcome> &outcomes, std::size_t trials_per_cell);

struct EstimateOutput
{
    std::string estimator;
    DenseTensor aggregate;          // TB domain
    std::vector<DenseTensor> per_ut; // TB domain
    std::size_t support_size = 0;
    std::size_t iterations = 0;
    bool converged = true;
    double final_residual = 0.0;
    double nmse = 0.0;               // pilot segment vs the scenario's true channel
    Shape sft_shape;
};

// Transmit with the given assignment, estimate, and recover per-UT channels.
EstimateOutput estimate_scenario(const Scenario &sc, const PilotAssignment &a, EstimatorKind kind,
                                 const EstimatorConfig &est, std::uint64_t noise_seed, std::size_t mmse_cap = 4096);

struct SimulateSummary
{
    ScheduleReport schedule;
    EstimateOutput estimate;
};

// Scenario, assignment, estimate dump and summary for the first trial, written into out_dir.
SimulateSummary simulate(const ScenarioSpec &spec, const std::string &out_dir);

} // namespace tfpsp
