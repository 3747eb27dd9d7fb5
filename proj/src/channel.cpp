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

#include "tfpsp/channel.hpp"
#include "tfpsp/rng.hpp"

#include "phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tfpsp
{

using detail::unit_phase;

std::size_t SystemConfig::N_f() const
{
    return (N_g * K + N_c - 1) / N_c;
}

std::size_t SystemConfig::N_d() const
{
    const double x = nu_max() * T_sym() * double(N_s());
    // Small slack so that an exact integer product is not bumped by rounding; at least one cell.
    const double c = std::ceil(x - 1e-9);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(c, 0.0)));
}

void SystemConfig::validate() const
{
    auto fail = [](const std::string &m) { throw SpecError(m); };
    if (M == 0 || K == 0 || N_c == 0 || N_b == 0 || N_p == 0 || U == 0)
        fail("M, K, N_c, N_b, N_p and U must be positive");
    if (k0 + K > N_c)
        fail("k0 + K must not exceed N_c");
    if (N_g >= N_c)
        fail("N_g must be smaller than N_c");
    if (!(delta_f > 0.0) || !(f_c > 0.0))
        fail("delta_f and f_c must be positive");
    if (!(v_speed >= 0.0))
        fail("v_speed must be non-negative");
    if (!(sigma_p > 0.0) || !(sigma_z >= 0.0))
        fail("sigma_p must be positive and sigma_z non-negative");
    if (nu_max() > 0.0 && !(double(N_b) < 1.0 / (T_sym() * nu_max())))
        fail("N_b must be smaller than 1/(T_sym * nu_max)");
}

TBGrid make_grid(const SystemConfig &cfg, std::size_t F_theta, std::size_t F_tau, std::size_t F_nu)
{
    if (F_theta == 0 || F_tau == 0 || F_nu == 0)
        throw SpecError("fine factors must be >= 1");
    TBGrid g;
    g.F_theta = F_theta;
    g.F_tau = F_tau;
    g.F_nu = F_nu;
    g.N_theta = F_theta * cfg.M;
    g.N_tau = F_tau * cfg.K;
    g.N_nu = F_nu * cfg.N_p;
    g.delta_f = cfg.delta_f;
    g.T_slot = double(cfg.N_b) * cfg.T_sym();
    if (g.N_theta % 2 || g.N_nu % 2)
        throw SpecError("N_theta and N_nu must be even");
    return g;
}

BeamOperators build_beam_operators(const SystemConfig &cfg, const TBGrid &grid)
{
    if (grid.N_theta % 2 || grid.N_nu % 2)
        throw SpecError("N_theta and N_nu must be even");
    const long long Nth = (long long)grid.N_theta, Nta = (long long)grid.N_tau, Nnu = (long long)grid.N_nu;
    const long long Nb = (long long)cfg.N_b;
    BeamOperators ops;

    // V_s = rows 0..M-1 of F_{N_theta} Gamma_{N_theta, N_theta/2}: column n holds DFT column n - N_theta/2.
    ops.V_s = DenseTensor({cfg.M, grid.N_theta});
    for (long long n = 0; n < Nth; ++n)
        for (long long m = 0; m < (long long)cfg.M; ++m)
            ops.V_s(m, n) = unit_phase(-m * detail::pmod(n - Nth / 2, Nth), Nth);

    // V_f = rows k0..k0+K-1 of F_{N_tau}.
    ops.V_f = DenseTensor({cfg.K, grid.N_tau});
    for (long long n = 0; n < Nta; ++n)
        for (long long k = 0; k < (long long)cfg.K; ++k)
            ops.V_f(k, n) = unit_phase(-((long long)cfg.k0 + k) * n, Nta);

    // V_t_pilot = rows 0..N_p-1 of Gamma_{N_nu, n_T} F*_{N_nu} Gamma_{N_nu, N_nu/2}.
    ops.V_t_pilot = DenseTensor({cfg.N_p, grid.N_nu});
    for (long long n = 0; n < Nnu; ++n)
        for (long long p = 0; p < (long long)cfg.N_p; ++p)
        {
            const long long row = detail::pmod(p + (long long)cfg.n_T, Nnu);
            ops.V_t_pilot(p, n) = unit_phase(row * detail::pmod(n - Nnu / 2, Nnu), Nnu);
        }

    // Full frame: symbol n sits at time (n_T N_b + n) T_sym and nu_k T_sym = (k - N_nu/2) / (N_nu N_b).
    ops.V_t_full = DenseTensor({cfg.N_s(), grid.N_nu});
    for (long long n = 0; n < Nnu; ++n)
        for (long long s = 0; s < (long long)cfg.N_s(); ++s)
            ops.V_t_full(s, n) = unit_phase(((long long)cfg.n_T * Nb + s) * (n - Nnu / 2), Nnu * Nb);
    return ops;
}

BeamOperators build_beam_operators_steering(const SystemConfig &cfg, const TBGrid &grid)
{
    const double tp = 2.0 * std::numbers::pi;
    BeamOperators ops;
    ops.V_s = DenseTensor({cfg.M, grid.N_theta});
    for (std::size_t n = 0; n < grid.N_theta; ++n)
        for (std::size_t m = 0; m < cfg.M; ++m)
            ops.V_s(m, n) = std::polar(1.0, -tp * double(m) * grid.theta(n));
    ops.V_f = DenseTensor({cfg.K, grid.N_tau});
    for (std::size_t n = 0; n < grid.N_tau; ++n)
        for (std::size_t k = 0; k < cfg.K; ++k)
            ops.V_f(k, n) = std::polar(1.0, -tp * double(cfg.k0 + k) * cfg.delta_f * grid.tau(n));
    ops.V_t_full = DenseTensor({cfg.N_s(), grid.N_nu});
    ops.V_t_pilot = DenseTensor({cfg.N_p, grid.N_nu});
    const double T = cfg.T_sym();
    for (std::size_t n = 0; n < grid.N_nu; ++n)
    {
        const double nu = grid.nu(n);
        const cplx lead = std::polar(1.0, tp * double(cfg.n_T * cfg.N_b) * nu * T);
        for (std::size_t s = 0; s < cfg.N_s(); ++s)
            ops.V_t_full(s, n) = lead * std::polar(1.0, tp * nu * double(s) * T);
        for (std::size_t p = 0; p < cfg.N_p; ++p)
            ops.V_t_pilot(p, n) = ops.V_t_full(p * cfg.N_b, n);
    }
    return ops;
}

namespace
{
// Nearest integer with halves going down.
long long round_half_down(double x)
{
    return static_cast<long long>(std::ceil(x - 0.5));
}
} // namespace

GridIndex snap_path_to_grid(const Path &p, const TBGrid &grid)
{
    GridIndex g;
    const long long Nth = (long long)grid.N_theta;
    g.n_theta = (std::size_t)detail::pmod(round_half_down((p.theta + 0.5) * double(Nth)), Nth);
    const long long nt = round_half_down(p.tau * double(grid.N_tau) * grid.delta_f);
    g.n_tau = (std::size_t)std::clamp<long long>(nt, 0, (long long)grid.N_tau - 1);
    const long long nn = round_half_down(p.nu * double(grid.N_nu) * grid.T_slot + double(grid.N_nu) / 2.0);
    g.n_nu = (std::size_t)std::clamp<long long>(nn, 0, (long long)grid.N_nu - 1);
    return g;
}

std::vector<std::size_t> support_of(const RealTensor &W)
{
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < W.size(); ++i)
        if (W[i] != 0.0)
            s.push_back(i);
    return s;
}

UserChannel build_tb_channel(const PathSet &paths, const TBGrid &grid)
{
    UserChannel ch;
    ch.paths = paths;
    ch.H_tb = DenseTensor(grid.shape());
    ch.W = RealTensor(grid.shape());
    for (const auto &p : paths)
    {
        const GridIndex g = snap_path_to_grid(p, grid);
        ch.H_tb(g.n_theta, g.n_tau, g.n_nu) += p.gain;
        ch.W(g.n_theta, g.n_tau, g.n_nu) += p.power;
    }
    ch.S = support_of(ch.W);
    return ch;
}

namespace
{
const DenseTensor &time_matrix(const BeamOperators &ops, Segment which)
{
    return which == Segment::full ? ops.V_t_full : ops.V_t_pilot;
}
} // namespace

DenseTensor beam_synthesis(const DenseTensor &H_tb, const DenseTensor &V_s, const DenseTensor &V_f, const DenseTensor &V_t)
{
    if (H_tb.rank() != 3 || H_tb.dim(0) != V_s.dim(1) || H_tb.dim(1) != V_f.dim(1) || H_tb.dim(2) != V_t.dim(1))
        throw ShapeError("beam_synthesis: TB tensor " + shape_str(H_tb.shape()) + " does not match the beam matrices");

    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < H_tb.size(); ++i)
        if (H_tb[i] != 0.0)
            nz.push_back(i);

    const std::size_t M = V_s.dim(0), K = V_f.dim(0), N = V_t.dim(0);
    // A handful of non-zero cells is cheaper as a sum of rank-1 beams.
    if (nz.size() * 4 < H_tb.dim(1) * H_tb.dim(2))
    {
        DenseTensor out({M, K, N});
        std::vector<cplx> mk(M * K);
        for (std::size_t i : nz)
        {
            const auto idx = H_tb.index(i);
            const cplx h = H_tb[i];
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t m = 0; m < M; ++m)
                    mk[m + M * k] = h * V_s(m, idx[0]) * V_f(k, idx[1]);
            for (std::size_t n = 0; n < N; ++n)
            {
                const cplx t = V_t(n, idx[2]);
                cplx *o = out.data() + M * K * n;
                for (std::size_t j = 0; j < M * K; ++j)
                    o[j] += mk[j] * t;
            }
        }
        return out;
    }
    return m_mode_product(m_mode_product(m_mode_product(H_tb, V_s, 0), V_f, 1), V_t, 2);
}

DenseTensor tb_to_sft(const DenseTensor &H_tb, const BeamOperators &ops, Segment which)
{
    return beam_synthesis(H_tb, ops.V_s, ops.V_f, time_matrix(ops, which));
}

DenseTensor sft_direct_offgrid(const PathSet &paths, const SystemConfig &cfg, Segment which)
{
    const double tp = 2.0 * std::numbers::pi;
    const std::size_t N = which == Segment::full ? cfg.N_s() : cfg.N_p;
    const std::size_t step = which == Segment::full ? 1 : cfg.N_b;
    const std::size_t M = cfg.M, K = cfg.K;
    DenseTensor out({M, K, N});
    std::vector<cplx> a(M), b(K), c(N);
    for (const auto &p : paths)
    {
        for (std::size_t m = 0; m < M; ++m)
            a[m] = std::polar(1.0, -tp * double(m) * p.theta);
        for (std::size_t k = 0; k < K; ++k)
            b[k] = std::polar(1.0, -tp * double(cfg.k0 + k) * cfg.delta_f * p.tau);
        for (std::size_t n = 0; n < N; ++n)
            c[n] = std::polar(1.0, tp * p.nu * double(cfg.n_T * cfg.N_b + n * step) * cfg.T_sym());
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t k = 0; k < K; ++k)
            {
                const cplx bc = p.gain * b[k] * c[n];
                cplx *o = out.data() + M * (k + K * n);
                for (std::size_t m = 0; m < M; ++m)
                    o[m] += a[m] * bc;
            }
    }
    return out;
}

SupportBounds support_bounds(const SystemConfig &cfg, const TBGrid &grid)
{
    SupportBounds b;
    b.tau_end = grid.F_tau * cfg.N_f();
    const long long w = (long long)(cfg.N_d() * grid.F_nu);
    const long long Nn = (long long)grid.N_nu;
    // Integers in [(N_nu - w)/2, (N_nu + w)/2); N_nu is even.
    b.nu_begin = Nn / 2 - w / 2;
    b.nu_end = Nn / 2 + (w + 1) / 2;
    b.nu_begin = std::max<long long>(b.nu_begin, 0);
    b.nu_end = std::min<long long>(b.nu_end, Nn);
    return b;
}

bool support_within_bounds(const UserChannel &ch, const SystemConfig &cfg, const TBGrid &grid)
{
    const SupportBounds b = support_bounds(cfg, grid);
    for (std::size_t i : ch.S)
    {
        const auto idx = ch.W.index(i);
        if (idx[1] >= b.tau_end)
            return false;
        if ((long long)idx[2] < b.nu_begin || (long long)idx[2] >= b.nu_end)
            return false;
    }
    return true;
}

DrawRanges draw_ranges(const SystemConfig &cfg, const TBGrid &grid)
{
    DrawRanges r;
    // Snapped delay index stays below F_tau N_f for every F_tau >= 1.
    r.tau_hi = std::min(double(cfg.N_g) * cfg.T_s(), (double(cfg.N_f()) - 0.5) / (double(cfg.K) * cfg.delta_f));

    const SupportBounds b = support_bounds(cfg, grid);
    const double cell = 1.0 / (double(grid.N_nu) * grid.T_slot);
    const long long half = (long long)grid.N_nu / 2;
    // Offsets o = n - N_nu/2 snap from (o - 0.5, o + 0.5].
    const double lo = (double(b.nu_begin - half) - 0.5) * cell;
    const double hi = (double(b.nu_end - 1 - half) + 0.5) * cell;
    r.nu_lo = std::max(-cfg.nu_max() / 2.0, std::nextafter(lo, 0.0));
    r.nu_hi = std::min(cfg.nu_max() / 2.0, hi);
    return r;
}

std::vector<UserChannel> synthesize_scenario(const SystemConfig &cfg, const TBGrid &grid, const GeneratorSettings &gen,
                                             std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const DrawRanges r = draw_ranges(cfg, grid);
    const double tp = 2.0 * std::numbers::pi;
    const double cp = double(cfg.N_g) * cfg.T_s();

    std::vector<UserChannel> out;
    out.reserve(cfg.U);
    for (std::size_t u = 0; u < cfg.U; ++u)
    {
        PathSet ps(gen.paths_per_ut);
        double total = 0.0;
        for (auto &p : ps)
        {
            p.theta = unit(rng) - 0.5;
            p.tau = unit(rng) * r.tau_hi;
            p.nu = std::clamp(cfg.nu_max() / 2.0 * std::cos(tp * unit(rng)), r.nu_lo, r.nu_hi);
            p.power = std::exp(-gen.decay * p.tau / cp);
            total += p.power;
        }
        for (auto &p : ps)
        {
            p.power /= total;
            p.gain = cgauss(rng, p.power);
            if (gen.on_grid)
            {
                const GridIndex g = snap_path_to_grid(p, grid);
                p.theta = grid.theta(g.n_theta);
                p.tau = grid.tau(g.n_tau);
                p.nu = grid.nu(g.n_nu);
            }
        }
        out.push_back(build_tb_channel(ps, grid));
    }
    return out;
}

RealTensor empirical_power(const PathSet &paths, const TBGrid &grid, std::size_t n_draws, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    RealTensor acc(grid.shape());
    for (std::size_t d = 0; d < n_draws; ++d)
    {
        PathSet ps = paths;
        for (auto &p : ps)
            p.gain = cgauss(rng, p.power);
        const UserChannel ch = build_tb_channel(ps, grid);
        for (std::size_t i : ch.S)
            acc[i] += std::norm(ch.H_tb[i]);
    }
    for (auto &v : acc.values())
        v /= double(n_draws);
    return acc;
}

DenseTensor covariance_from_power(const RealTensor &W, const BeamOperators &ops, Segment which, std::size_t cap)
{
    const DenseTensor &Vt = time_matrix(ops, which);
    const std::size_t M = ops.V_s.dim(0), K = ops.V_f.dim(0), N = Vt.dim(0);
    const std::size_t A = M * K * N;
    if (A > cap)
        throw CapError("covariance_from_power: M*K*N = " + std::to_string(A) + " exceeds cap " + std::to_string(cap));
    if (W.shape() != Shape{ops.V_s.dim(1), ops.V_f.dim(1), Vt.dim(1)})
        throw ShapeError("covariance_from_power: power tensor " + shape_str(W.shape()) + " does not match the beam operators");
    DenseTensor R({M, K, N, M, K, N});
    std::vector<cplx> v(A);
    for (std::size_t i = 0; i < W.size(); ++i)
    {
        if (W[i] == 0.0)
            continue;
        const auto idx = W.index(i);
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t m = 0; m < M; ++m)
                    v[m + M * (k + K * n)] = ops.V_s(m, idx[0]) * ops.V_f(k, idx[1]) * Vt(n, idx[2]);
        for (std::size_t b = 0; b < A; ++b)
        {
            const cplx s = W[i] * std::conj(v[b]);
            cplx *r = R.data() + A * b;
            for (std::size_t a = 0; a < A; ++a)
                r[a] += v[a] * s;
        }
    }
    return R;
}

} // namespace tfpsp
