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

#include "tfpsp/pilot.hpp"
#include "tfpsp/rng.hpp"

#include "phase.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tfpsp
{

using detail::unit_phase;

std::vector<cplx> zc_sequence(std::size_t N, long long root)
{
    if (N == 0 || std::gcd(root, (long long)N) != 1)
        throw SpecError("zc_sequence: root " + std::to_string(root) + " is not coprime to " + std::to_string(N));
    const long long n_ = (long long)N, c = n_ % 2;
    std::vector<cplx> x(N);
    for (long long n = 0; n < n_; ++n)
        x[n] = unit_phase(detail::pmod(root, n_) * detail::pmod(n * (n + c), n_), n_);
    return x;
}

long long default_zc_root(std::size_t N)
{
    if (std::gcd(1LL, (long long)N) == 1)
        return 1;
    for (long long r = 2;; ++r)
        if (std::gcd(r, (long long)N) == 1)
            return r;
}

BasicSequences make_basic_sequences(const SystemConfig &cfg)
{
    return make_basic_sequences(cfg, default_zc_root(cfg.K), default_zc_root(cfg.N_p));
}

BasicSequences make_basic_sequences(const SystemConfig &cfg, long long root_f, long long root_t)
{
    BasicSequences b;
    b.root_f = root_f;
    b.root_t = root_t;
    b.x_f = zc_sequence(cfg.K, root_f);
    b.x_t = zc_sequence(cfg.N_p, root_t);
    return b;
}

void PilotAssignment::validate(const SystemConfig &cfg) const
{
    if (pairs.size() != cfg.U)
        throw SpecError("assignment has " + std::to_string(pairs.size()) + " entries for " + std::to_string(cfg.U) + " UTs");
    for (const auto &p : pairs)
        if (p.phi >= cfg.K || p.varphi >= cfg.N_p)
            throw SpecError("phase pair out of range");
}

std::vector<cplx> freq_pilot(std::size_t phi, const BasicSequences &basic, const SystemConfig &cfg)
{
    if (phi >= cfg.K)
        throw std::out_of_range("freq_pilot: phi out of range");
    std::vector<cplx> x(cfg.K);
    for (std::size_t k = 0; k < cfg.K; ++k)
        x[k] = unit_phase(-(long long)((cfg.k0 + k) * phi), (long long)cfg.K) * basic.x_f[k];
    return x;
}

std::vector<cplx> time_pilot_window(std::size_t varphi, const BasicSequences &basic, const SystemConfig &cfg,
                                    std::size_t n_T)
{
    if (varphi >= cfg.N_p)
        throw std::out_of_range("time_pilot_window: varphi out of range");
    const long long Np = (long long)cfg.N_p;
    std::vector<cplx> x(cfg.N_p);
    for (long long n = 0; n < Np; ++n)
    {
        const long long i = detail::pmod(n + (long long)n_T, Np);
        x[n] = unit_phase(-i * (long long)varphi, Np) * basic.x_t[i];
    }
    return x;
}

DenseTensor pilot_pattern(const PhasePair &p, const BasicSequences &basic, const SystemConfig &cfg)
{
    const auto xf = freq_pilot(p.phi, basic, cfg);
    const auto xt = time_pilot_window(p.varphi, basic, cfg, cfg.n_T);
    DenseTensor out({cfg.K, cfg.N_p});
    for (std::size_t n = 0; n < cfg.N_p; ++n)
        for (std::size_t k = 0; k < cfg.K; ++k)
            out(k, n) = xf[k] * xt[n];
    return out;
}

PsopCheck psop_orthogonality_check(const PilotAssignment &a, const BasicSequences &basic, const SystemConfig &cfg)
{
    PsopCheck r;
    const long long Nf = (long long)cfg.N_f(), K = (long long)cfg.K;
    r.spacing_ok = true;
    std::vector<std::vector<cplx>> x;
    for (const auto &p : a.pairs)
        x.push_back(freq_pilot(p.phi, basic, cfg));
    for (std::size_t u = 0; u < x.size(); ++u)
        for (std::size_t v = 0; v < x.size(); ++v)
        {
            if (u == v)
                continue;
            const long long d = detail::pmod((long long)a.pairs[v].phi - (long long)a.pairs[u].phi, K);
            if (std::min(d, K - d) < Nf)
                r.spacing_ok = false;
            for (long long phi = -(Nf - 1); phi <= Nf - 1; ++phi)
            {
                cplx t = 0.0;
                for (long long k = 0; k < K; ++k)
                    t += x[u][k] * unit_phase(-((long long)cfg.k0 + k) * phi, K) * std::conj(x[v][k]);
                r.max_trace = std::max(r.max_trace, std::abs(t));
            }
        }
    r.orthogonal = r.max_trace <= double(K) * 1e-9;
    return r;
}

ReceivedPilot received_signal(const std::vector<DenseTensor> &H_sft_pilot, const PilotAssignment &a,
                              const BasicSequences &basic, const SystemConfig &cfg, std::uint64_t noise_seed)
{
    if (H_sft_pilot.size() != a.pairs.size())
        throw ShapeError("received_signal: channel and assignment counts differ");
    const Shape ys{cfg.M, cfg.K, cfg.N_p};
    ReceivedPilot r{DenseTensor(ys), cfg.sigma_p, cfg.sigma_z, cfg.n_T};
    const double sp = std::sqrt(cfg.sigma_p);
    const std::size_t M = cfg.M;
    for (std::size_t u = 0; u < H_sft_pilot.size(); ++u)
    {
        if (H_sft_pilot[u].shape() != ys)
            throw ShapeError("received_signal: channel shape " + shape_str(H_sft_pilot[u].shape()) + " is not " + shape_str(ys));
        const DenseTensor x = pilot_pattern(a.pairs[u], basic, cfg);
        for (std::size_t kn = 0; kn < cfg.K * cfg.N_p; ++kn)
        {
            const cplx s = sp * x[kn];
            const cplx *h = H_sft_pilot[u].data() + M * kn;
            cplx *y = r.Y.data() + M * kn;
            for (std::size_t m = 0; m < M; ++m)
                y[m] += s * h[m];
        }
    }
    std::mt19937_64 rng(noise_seed);
    for (auto &y : r.Y.values())
        y += cgauss(rng, cfg.sigma_z);
    return r;
}

ReceivedPilot tfpsp_received_signal(const std::vector<UserChannel> &channels, const PilotAssignment &a,
                                    const BasicSequences &basic, const SystemConfig &cfg, std::uint64_t noise_seed)
{
    std::vector<DenseTensor> H;
    H.reserve(channels.size());
    for (const auto &ch : channels)
        H.push_back(sft_direct_offgrid(ch.paths, cfg, Segment::pilot));
    return received_signal(H, a, basic, cfg, noise_seed);
}

double overlap_eta(const RealTensor &A, const RealTensor &B)
{
    if (A.shape() != B.shape())
        throw ShapeError("overlap_eta: shapes differ");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
    {
        ab += A[i] * B[i];
        aa += A[i] * A[i];
        bb += B[i] * B[i];
    }
    if (aa == 0.0 || bb == 0.0)
        throw std::domain_error("overlap_eta: all-zero operand");
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

Theorem1Result theorem1_condition(const std::vector<RealTensor> &W, const PilotAssignment &a, const TBGrid &g)
{
    Theorem1Result r;
    std::vector<RealTensor> s;
    for (std::size_t u = 0; u < W.size(); ++u)
        s.push_back(equivalent_shift(W[u], a.pairs[u], g));
    for (std::size_t u = 0; u < s.size(); ++u)
        for (std::size_t v = u + 1; v < s.size(); ++v)
        {
            double dot = 0.0;
            for (std::size_t i = 0; i < s[u].size(); ++i)
                dot += s[u][i] * s[v][i];
            if (dot > 0.0)
            {
                r.satisfied = false;
                r.max_eta = std::max(r.max_eta, overlap_eta(s[u], s[v]));
            }
        }
    return r;
}

MseResult mse_theoretical(const std::vector<RealTensor> &W, const PilotAssignment &a, const BasicSequences &basic,
                          const SystemConfig &cfg, const BeamOperators &ops, std::size_t cap)
{
    using Mat = Eigen::MatrixXcd;
    const std::size_t A = cfg.M * cfg.K * cfg.N_p;
    if (A > cap)
        throw CapError("mse_theoretical: A = " + std::to_string(A) + " exceeds cap " + std::to_string(cap));
    const std::size_t U = W.size();
    const double reg = cfg.sigma_z / cfg.sigma_p;

    std::vector<Mat> R(U);
    std::vector<Eigen::VectorXcd> p(U);
    for (std::size_t u = 0; u < U; ++u)
    {
        const DenseTensor Rt = covariance_from_power(W[u], ops, Segment::pilot, cap);
        R[u] = Eigen::Map<const Mat>(Rt.data(), (Eigen::Index)A, (Eigen::Index)A);
        const DenseTensor x = pilot_pattern(a.pairs[u], basic, cfg);
        p[u].resize((Eigen::Index)A);
        for (std::size_t i = 0; i < A; ++i)
            p[u][(Eigen::Index)i] = x[i / cfg.M];
    }

    auto trace_term = [&](const Mat &C, const Mat &Ru) {
        Mat Cr = C;
        Cr.diagonal().array() += 1e-12;
        Eigen::LDLT<Mat> ldlt(Cr);
        const Mat X = ldlt.solve(Ru);
        return (Ru.trace() - (Ru * X).trace()).real();
    };

    MseResult r;
    for (std::size_t u = 0; u < U; ++u)
    {
        Mat Cu = R[u];
        Cu.diagonal().array() += reg;
        r.eps_min += trace_term(Cu, R[u]);

        Mat C = Cu;
        for (std::size_t v = 0; v < U; ++v)
        {
            if (v == u)
                continue;
            const Eigen::VectorXcd d = p[u].conjugate().cwiseProduct(p[v]);
            C += d.asDiagonal() * R[v] * d.conjugate().asDiagonal();
        }
        r.eps += trace_term(C, R[u]);
    }
    return r;
}

} // namespace tfpsp
