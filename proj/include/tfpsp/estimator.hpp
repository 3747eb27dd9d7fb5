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

#include <stdexcept>
#include <vector>

namespace tfpsp
{

class DivergenceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class FastPath
{
    fft,
    naive
};

enum class SonpVariant
{
    squared, // inner term P - gamma sigma_p P^2
    literal  // inner term P - gamma
};

struct EstimatorConfig
{
    double alpha = 0.3; // damping, 0 < alpha <= 1
    std::size_t t_max = 500;
    double tol = 1e-6;  // relative change of D
    SonpVariant sonp = SonpVariant::squared;
    FastPath path = FastPath::fft;

    void validate() const;
};

struct AggregateModel
{
    SystemConfig cfg;
    TBGrid grid;
    BeamOperators ops;
    DenseTensor X_T;            // (K, N_p) common pilot x_f[k] * (Gamma x_t)[n]
    RealTensor W;               // aggregate of shifted per-UT powers
    std::vector<std::size_t> S; // support of W

    std::size_t A() const { return cfg.M * cfg.K * cfg.N_p; }
};

AggregateModel make_model(const SystemConfig &cfg, const TBGrid &grid, const BeamOperators &ops,
                          const BasicSequences &basic, const RealTensor &W);

AggregateModel make_aggregate_model(const SystemConfig &cfg, const TBGrid &grid, const BeamOperators &ops,
                                    const BasicSequences &basic, const std::vector<RealTensor> &W_u,
                                    const PilotAssignment &a);

// sqrt(sigma_p) X_T (.) (V_t x_3 (V_f x_2 (V_s x_1 B))).
DenseTensor forward_operator(const DenseTensor &B, const AggregateModel &model, FastPath mode);
DenseTensor adjoint_operator(const DenseTensor &C, const AggregateModel &model, FastPath mode);

// W (.) A^H (A diag(W) A^H + sigma_z I)^{-1} Y on the support; solved in the smaller of the
// A x A and |S| x |S| forms. Throws CapError when that dimension exceeds cap.
DenseTensor mmse_oracle(const DenseTensor &Y, const AggregateModel &model, std::size_t cap = 4096);

struct IGAState
{
    std::vector<cplx> D;   // first-order parameter on S
    std::vector<double> F; // second-order parameter on S
    std::size_t t = 0;
    double change = 0.0;   // relative change of D in the last step
};

IGAState iga_init(const AggregateModel &model);
IGAState iga_step(const IGAState &state, const DenseTensor &Y, const AggregateModel &model, const EstimatorConfig &cfg);

// Mean estimate read from the current parameters.
DenseTensor iga_estimate(const IGAState &state, const AggregateModel &model);

struct IGAResult
{
    DenseTensor H;
    std::size_t iterations = 0;
    bool converged = false;
    double final_change = 0.0;
    std::vector<double> history; // relative change per iteration
};

IGAResult iga_run(const DenseTensor &Y, const AggregateModel &model, const EstimatorConfig &cfg);

// Per-UT estimates W_u (.) unshift_u(W^+ (.) H).
std::vector<DenseTensor> recover_per_ut(const DenseTensor &H, const AggregateModel &model,
                                        const std::vector<RealTensor> &W_u, const PilotAssignment &a);

// Channel over the last N_b symbols of the frame.
DenseTensor predict_data_segment(const DenseTensor &H_u, const BeamOperators &ops, const SystemConfig &cfg);

} // namespace tfpsp
