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

#include "tfpsp/tensor.hpp"

#include <cstdint>
#include <vector>

namespace tfpsp
{

class SpecError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class CapError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

constexpr double speed_of_light = 299792458.0;

struct SystemConfig
{
    std::size_t M = 16;         // BS antennas
    std::size_t U = 1;          // UTs
    double f_c = 5.8e9;         // carrier [Hz]
    std::size_t N_c = 256;      // subcarriers
    std::size_t N_g = 16;       // CP length [samples]
    std::size_t K = 48;         // valid subcarriers
    std::size_t k0 = 0;         // first valid subcarrier
    double delta_f = 15e3;      // subcarrier spacing [Hz]
    std::size_t N_b = 4;        // symbols per slot
    std::size_t N_p = 4;        // slots per frame
    double v_speed = 3.0 / 3.6; // max UT speed [m/s]
    double sigma_p = 1.0;
    double sigma_z = 0.01;
    std::size_t n_T = 0;

    double T_s() const { return 1.0 / (double(N_c) * delta_f); }
    double T_sym() const { return double(N_c + N_g) * T_s(); }
    std::size_t N_s() const { return N_b * N_p; }
    double lambda_c() const { return speed_of_light / f_c; }
    double nu_max() const { return 2.0 * v_speed / lambda_c(); }
    std::size_t N_f() const;
    std::size_t N_d() const;

    // Throws SpecError when a constraint is violated.
    void validate() const;
};

struct TBGrid
{
    std::size_t F_theta = 2, F_tau = 2, F_nu = 2;
    std::size_t N_theta = 0, N_tau = 0, N_nu = 0;
    double delta_f = 0.0, T_slot = 0.0; // T_slot = N_b * T_sym

    double theta(std::size_t n) const { return (double(n) - double(N_theta) / 2.0) / double(N_theta); }
    double tau(std::size_t n) const { return double(n) / (double(N_tau) * delta_f); }
    double nu(std::size_t n) const { return (double(n) - double(N_nu) / 2.0) / (double(N_nu) * T_slot); }
    Shape shape() const { return {N_theta, N_tau, N_nu}; }
    std::size_t cells() const { return N_theta * N_tau * N_nu; }
};

TBGrid make_grid(const SystemConfig &cfg, std::size_t F_theta, std::size_t F_tau, std::size_t F_nu);

struct Path
{
    cplx gain;
    double theta = 0.0; // directional cosine
    double tau = 0.0;   // delay [s]
    double nu = 0.0;    // Doppler [Hz]
    double power = 0.0; // expected |gain|^2
};

using PathSet = std::vector<Path>;

struct GridIndex
{
    std::size_t n_theta = 0, n_tau = 0, n_nu = 0;
    bool operator==(const GridIndex &o) const = default;
};

struct UserChannel
{
    PathSet paths;
    DenseTensor H_tb;               // (N_theta, N_tau, N_nu)
    RealTensor W;                   // per-cell power
    std::vector<std::size_t> S;     // sorted flat support of W
};

struct BeamOperators
{
    DenseTensor V_s;       // M x N_theta
    DenseTensor V_f;       // K x N_tau
    DenseTensor V_t_full;  // N_s x N_nu
    DenseTensor V_t_pilot; // N_p x N_nu
};

enum class Segment
{
    full,
    pilot
};

BeamOperators build_beam_operators(const SystemConfig &cfg, const TBGrid &grid);

// Beam matrices from the closed-form steering vectors, used to cross-check the DFT construction.
BeamOperators build_beam_operators_steering(const SystemConfig &cfg, const TBGrid &grid);

// Nearest grid point per coordinate; ties go to the lower index.
// The angle axis is periodic (theta = +0.5 coincides with -0.5).
GridIndex snap_path_to_grid(const Path &p, const TBGrid &grid);

UserChannel build_tb_channel(const PathSet &paths, const TBGrid &grid);

// V_t x_3 (V_f x_2 (V_s x_1 H_tb)).
DenseTensor beam_synthesis(const DenseTensor &H_tb, const DenseTensor &V_s, const DenseTensor &V_f, const DenseTensor &V_t);

DenseTensor tb_to_sft(const DenseTensor &H_tb, const BeamOperators &ops, Segment which);

DenseTensor sft_direct_offgrid(const PathSet &paths, const SystemConfig &cfg, Segment which);

struct GeneratorSettings
{
    std::size_t paths_per_ut = 4;
    bool on_grid = false;
    double decay = 1.0; // power ~ exp(-decay * tau / (N_g T_s)) before normalization
};

// Sampling ranges that keep snapped supports inside the delay/Doppler bounds.
struct DrawRanges
{
    double tau_hi = 0.0;
    double nu_lo = 0.0, nu_hi = 0.0;
};
DrawRanges draw_ranges(const SystemConfig &cfg, const TBGrid &grid);

std::vector<UserChannel> synthesize_scenario(const SystemConfig &cfg, const TBGrid &grid, const GeneratorSettings &gen,
                                             std::uint64_t seed);

// Empirical W over n_draws re-draws of the gains of fixed geometry.
RealTensor empirical_power(const PathSet &paths, const TBGrid &grid, std::size_t n_draws, std::uint64_t seed);

struct SupportBounds
{
    std::size_t tau_end;           // exclusive
    long long nu_begin, nu_end;    // [begin, end)
};
SupportBounds support_bounds(const SystemConfig &cfg, const TBGrid &grid);
bool support_within_bounds(const UserChannel &ch, const SystemConfig &cfg, const TBGrid &grid);

// Pilot-segment SFT covariance (M,K,N_p,M,K,N_p) from a TB power tensor.
DenseTensor covariance_from_power(const RealTensor &W, const BeamOperators &ops, Segment which,
                                  std::size_t cap = 512);

std::vector<std::size_t> support_of(const RealTensor &W);

} // namespace tfpsp
