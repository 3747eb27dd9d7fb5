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

#include "tfpsp/channel.hpp"

#include <cstdint>
#include <vector>

namespace tfpsp
{

// exp(j 2 pi root n (n + <N>_2) / N), n = 0..N-1. Throws SpecError unless gcd(root, N) = 1.
std::vector<cplx> zc_sequence(std::size_t N, long long root);

// 1 when coprime to N, otherwise the smallest coprime root above 1.
long long default_zc_root(std::size_t N);

struct BasicSequences
{
    std::vector<cplx> x_f; // length K
    std::vector<cplx> x_t; // length N_p
    long long root_f = 1, root_t = 1;
};

BasicSequences make_basic_sequences(const SystemConfig &cfg);
BasicSequences make_basic_sequences(const SystemConfig &cfg, long long root_f, long long root_t);

struct PhasePair
{
    std::size_t phi = 0;    // frequency phase shift, 0..K-1
    std::size_t varphi = 0; // time phase shift, 0..N_p-1
    bool operator==(const PhasePair &o) const = default;
};

struct PilotAssignment
{
    std::vector<PhasePair> pairs; // indexed by UT id

    // Cyclic shift lengths on the delay and Doppler axes.
    static long long L_phi(const PhasePair &p, const TBGrid &g) { return -(long long)p.phi * (long long)g.F_tau; }
    static long long L_varphi(const PhasePair &p, const TBGrid &g) { return (long long)p.varphi * (long long)g.F_nu; }
    void validate(const SystemConfig &cfg) const;
};

std::vector<cplx> freq_pilot(std::size_t phi, const BasicSequences &basic, const SystemConfig &cfg);
std::vector<cplx> time_pilot_window(std::size_t varphi, const BasicSequences &basic, const SystemConfig &cfg,
                                    std::size_t n_T);

// Pilot of one UT on the (K, N_p) pilot grid: x_f[k] * x_t[n].
DenseTensor pilot_pattern(const PhasePair &p, const BasicSequences &basic, const SystemConfig &cfg);

struct PsopCheck
{
    double max_trace = 0.0;  // max |tr{X_u Diag{f_phi} X_u'^H}| over pairs and 0 <= |phi| < N_f
    bool orthogonal = false; // max_trace <= K * 1e-9
    bool spacing_ok = false; // circular |phi_u' - phi_u| >= N_f for all pairs
};
PsopCheck psop_orthogonality_check(const PilotAssignment &a, const BasicSequences &basic, const SystemConfig &cfg);

struct ReceivedPilot
{
    DenseTensor Y; // (M, K, N_p)
    double sigma_p = 1.0, sigma_z = 0.0;
    std::size_t n_T = 0;
};

// Y = sqrt(sigma_p) sum_u pilot_u (.) H_u + Z for given pilot-segment SFT channels.
ReceivedPilot received_signal(const std::vector<DenseTensor> &H_sft_pilot, const PilotAssignment &a,
                              const BasicSequences &basic, const SystemConfig &cfg, std::uint64_t noise_seed);

ReceivedPilot tfpsp_received_signal(const std::vector<UserChannel> &channels, const PilotAssignment &a,
                                    const BasicSequences &basic, const SystemConfig &cfg, std::uint64_t noise_seed);

// Cyclic shifts L_phi on the delay axis and L_varphi on the Doppler axis.
template <typename T>
Tensor<T> equivalent_shift(const Tensor<T> &X, const PhasePair &p, const TBGrid &g)
{
    return cyclic_shift(cyclic_shift(X, {1, PilotAssignment::L_phi(p, g)}), {2, PilotAssignment::L_varphi(p, g)});
}

template <typename T>
Tensor<T> inverse_shift(const Tensor<T> &X, const PhasePair &p, const TBGrid &g)
{
    return cyclic_shift(cyclic_shift(X, {1, -PilotAssignment::L_phi(p, g)}), {2, -PilotAssignment::L_varphi(p, g)});
}

// sum(A .* B) / (||A|| ||B||). Throws std::domain_error on an all-zero operand.
double overlap_eta(const RealTensor &A, const RealTensor &B);

struct Theorem1Result
{
    bool satisfied = true;
    double max_eta = 0.0;
};
Theorem1Result theorem1_condition(const std::vector<RealTensor> &W, const PilotAssignment &a, const TBGrid &g);

struct MseResult
{
    double eps = 0.0;
    double eps_min = 0.0;
};

// Closed-form MSE of the per-UT MMSE estimate with and without pilot interference.
MseResult mse_theoretical(const std::vector<RealTensor> &W, const PilotAssignment &a, const BasicSequences &basic,
                          const SystemConfig &cfg, const BeamOperators &ops, std::size_t cap = 1024);

} // namespace tfpsp
