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

#include "tfpsp/estimator.hpp"

#include "fft.hpp"
#include "phase.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace tfpsp
{

void EstimatorConfig::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw SpecError("estimator alpha must lie in (0, 1]");
    if (t_max == 0)
        throw SpecError("estimator t_max must be positive");
    if (!(tol > 0.0))
        throw SpecError("estimator tol must be positive");
}

AggregateModel make_model(const SystemConfig &cfg, const TBGrid &grid, const BeamOperators &ops,
                          const BasicSequences &basic, const RealTensor &W)
{
    if (W.shape() != grid.shape())
        throw ShapeError("make_model: power tensor " + shape_str(W.shape()) + " does not match grid " + shape_str(grid.shape()));
    AggregateModel m{cfg, grid, ops, pilot_pattern(PhasePair{}, basic, cfg), W, support_of(W)};
    return m;
}

AggregateModel make_aggregate_model(const SystemConfig &cfg, const TBGrid &grid, const BeamOperators &ops,
                                    const BasicSequences &basic, const std::vector<RealTensor> &W_u,
                                    const PilotAssignment &a)
{
    if (W_u.size() != a.pairs.size())
        throw ShapeError("make_aggregate_model: power and assignment counts differ");
    RealTensor W(grid.shape());
    for (std::size_t u = 0; u < W_u.size(); ++u)
    {
        const RealTensor s = equivalent_shift(W_u[u], a.pairs[u], grid);
        for (std::size_t i = 0; i < W.size(); ++i)
            W[i] += s[i];
    }
    return make_model(cfg, grid, ops, basic, W);
}

namespace
{
void check_tb(const DenseTensor &B, const AggregateModel &m)
{
    if (B.shape() != m.grid.shape())
        throw ShapeError("TB tensor " + shape_str(B.shape()) + " does not match grid " + shape_str(m.grid.shape()));
}

void check_sft(const DenseTensor &C, const AggregateModel &m)
{
    if (C.shape() != Shape{m.cfg.M, m.cfg.K, m.cfg.N_p})
        throw ShapeError("pilot tensor " + shape_str(C.shape()) + " does not match (M, K, N_p)");
}

void modulate(DenseTensor &Y, const AggregateModel &m, bool conjugate)
{
    const double sp = std::sqrt(m.cfg.sigma_p);
    const std::size_t M = m.cfg.M;
    for (std::size_t kn = 0; kn < m.cfg.K * m.cfg.N_p; ++kn)
    {
        const cplx s = sp * (conjugate ? std::conj(m.X_T[kn]) : m.X_T[kn]);
        cplx *y = Y.data() + M * kn;
        for (std::size_t i = 0; i < M; ++i)
            y[i] *= s;
    }
}

double sign_of(long long n) { return (n % 2) ? -1.0 : 1.0; }

DenseTensor forward_fft(const DenseTensor &B, const AggregateModel &m)
{
    const std::size_t M = m.cfg.M, K = m.cfg.K, Np = m.cfg.N_p;
    const std::size_t N0 = m.grid.N_theta, N1 = m.grid.N_tau, N2 = m.grid.N_nu;

    // Angle: V_s[m, n] = (-1)^m e^{-j 2 pi m n / N0}; keep rows 0..M-1.
    DenseTensor a = B;
    detail::fft_axis(a.data(), {N0, N1, N2}, 0, -1);
    DenseTensor b({M, N1, N2});
    for (std::size_t j = 0; j < N1 * N2; ++j)
        for (std::size_t i = 0; i < M; ++i)
            b[i + M * j] = sign_of((long long)i) * a[i + N0 * j];

    // Delay: V_f[k, n] = e^{-j 2 pi (k0 + k) n / N1}; rows (k0 + k) mod N1.
    detail::fft_axis(b.data(), {M, N1, N2}, 1, -1);
    DenseTensor c({M, K, N2});
    for (std::size_t q = 0; q < N2; ++q)
        for (std::size_t k = 0; k < K; ++k)
        {
            const std::size_t r = (m.cfg.k0 + k) % N1;
            for (std::size_t i = 0; i < M; ++i)
                c[i + M * (k + K * q)] = b[i + M * (r + N1 * q)];
        }

    // Doppler: V_t[p, n] = (-1)^(n_T + p) e^{+j 2 pi ((n_T + p) mod N2) n / N2}.
    detail::fft_axis(c.data(), {M, K, N2}, 2, +1);
    DenseTensor out({M, K, Np});
    for (std::size_t p = 0; p < Np; ++p)
    {
        const long long row = (long long)(m.cfg.n_T + p);
        const std::size_t r = (std::size_t)detail::pmod(row, (long long)N2);
        const double s = sign_of(row);
        for (std::size_t j = 0; j < M * K; ++j)
            out[j + M * K * p] = s * c[j + M * K * r];
    }
    modulate(out, m, false);
    return out;
}

DenseTensor adjoint_fft(const DenseTensor &C, const AggregateModel &m)
{
    const std::size_t M = m.cfg.M, K = m.cfg.K, Np = m.cfg.N_p;
    const std::size_t N0 = m.grid.N_theta, N1 = m.grid.N_tau, N2 = m.grid.N_nu;

    DenseTensor x = C;
    modulate(x, m, true);

    DenseTensor c({M, K, N2});
    for (std::size_t p = 0; p < Np; ++p)
    {
        const long long row = (long long)(m.cfg.n_T + p);
        const std::size_t r = (std::size_t)detail::pmod(row, (long long)N2);
        const double s = sign_of(row);
        for (std::size_t j = 0; j < M * K; ++j)
            c[j + M * K * r] += s * x[j + M * K * p];
    }
    detail::fft_axis(c.data(), {M, K, N2}, 2, -1);

    DenseTensor b({M, N1, N2});
    for (std::size_t q = 0; q < N2; ++q)
        for (std::size_t k = 0; k < K; ++k)
        {
            const std::size_t r = (m.cfg.k0 + k) % N1;
            for (std::size_t i = 0; i < M; ++i)
                b[i + M * (r + N1 * q)] = c[i + M * (k + K * q)];
        }
    detail::fft_axis(b.data(), {M, N1, N2}, 1, +1);

    DenseTensor a({N0, N1, N2});
    for (std::size_t j = 0; j < N1 * N2; ++j)
        for (std::size_t i = 0; i < M; ++i)
            a[i + N0 * j] = sign_of((long long)i) * b[i + M * j];
    detail::fft_axis(a.data(), {N0, N1, N2}, 0, +1);
    return a;
}
} // namespace

DenseTensor forward_operator(const DenseTensor &B, const AggregateModel &model, FastPath mode)
{
    check_tb(B, model);
    if (mode == FastPath::fft)
        return forward_fft(B, model);
    DenseTensor out = m_mode_product(m_mode_product(m_mode_product(B, model.ops.V_s, 0), model.ops.V_f, 1),
                                     model.ops.V_t_pilot, 2);
    modulate(out, model, false);
    return out;
}

DenseTensor adjoint_operator(const DenseTensor &C, const AggregateModel &model, FastPath mode)
{
    check_sft(C, model);
    if (mode == FastPath::fft)
        return adjoint_fft(C, model);
    DenseTensor x = C;
    modulate(x, model, true);
    return m_mode_product(m_mode_product(m_mode_product(x, m_hermitian(model.ops.V_t_pilot, 1), 2),
                                         m_hermitian(model.ops.V_f, 1), 1),
                          m_hermitian(model.ops.V_s, 1), 0);
}

DenseTensor mmse_oracle(const DenseTensor &Y, const AggregateModel &model, std::size_t cap)
{
    using Mat = Eigen::MatrixXcd;
    check_sft(Y, model);
    const std::size_t A = model.A(), s = model.S.size();
    DenseTensor out(model.grid.shape());
    if (s == 0)
        return out;
    if (std::min(A, s) > cap)
        throw CapError("mmse_oracle: dense system of size " + std::to_string(std::min(A, s)) + " exceeds cap " +
                       std::to_string(cap));

    // Columns of the operator restricted to the support.
    Mat Phi((Eigen::Index)A, (Eigen::Index)s);
    const double sp = std::sqrt(model.cfg.sigma_p);
    const std::size_t M = model.cfg.M, K = model.cfg.K, Np = model.cfg.N_p;
    for (std::size_t j = 0; j < s; ++j)
    {
        const auto idx = model.W.index(model.S[j]);
        for (std::size_t n = 0; n < Np; ++n)
            for (std::size_t k = 0; k < K; ++k)
            {
                const cplx kn = sp * model.X_T(k, n) * model.ops.V_f(k, idx[1]) * model.ops.V_t_pilot(n, idx[2]);
                for (std::size_t m = 0; m < M; ++m)
                    Phi((Eigen::Index)(m + M * (k + K * n)), (Eigen::Index)j) = kn * model.ops.V_s(m, idx[0]);
            }
    }
    Eigen::VectorXd w((Eigen::Index)s);
    for (std::size_t j = 0; j < s; ++j)
        w[(Eigen::Index)j] = model.W[model.S[j]];
    const Eigen::Map<const Eigen::VectorXcd> y(Y.data(), (Eigen::Index)A);
    const double sz = model.cfg.sigma_z;

    Eigen::VectorXcd h;
    if (s <= A)
    {
        // (Phi^H Phi + sigma_z W^{-1}) h = Phi^H y
        Mat G = Phi.adjoint() * Phi;
        G.diagonal() += (sz / w.array()).matrix().cast<cplx>();
        const Eigen::VectorXcd rhs = Phi.adjoint() * y;
        Eigen::LLT<Mat> llt(G);
        h = llt.info() == Eigen::Success ? Eigen::VectorXcd(llt.solve(rhs)) : Eigen::VectorXcd(G.ldlt().solve(rhs));
    }
    else
    {
        Mat G = Phi * w.cast<cplx>().asDiagonal() * Phi.adjoint();
        G.diagonal().array() += sz;
        Eigen::LLT<Mat> llt(G);
        const Eigen::VectorXcd v = llt.info() == Eigen::Success ? Eigen::VectorXcd(llt.solve(y)) : Eigen::VectorXcd(G.ldlt().solve(y));
        h = w.cast<cplx>().asDiagonal() * (Phi.adjoint() * v);
    }
    for (std::size_t j = 0; j < s; ++j)
        out[model.S[j]] = h[(Eigen::Index)j];
    return out;
}

IGAState iga_init(const AggregateModel &model)
{
    IGAState st;
    st.D.assign(model.S.size(), 0.0);
    st.F.assign(model.S.size(), 0.0);
    return st;
}

namespace
{
void diverged(const IGAState &st, const std::string &what)
{
    throw DivergenceError("IGA diverged at iteration " + std::to_string(st.t) + ": " + what);
}
} // namespace

IGAState iga_step(const IGAState &st, const DenseTensor &Y, const AggregateModel &model, const EstimatorConfig &cfg)
{
    check_sft(Y, model);
    const std::size_t s = model.S.size();
    if (st.D.size() != s || st.F.size() != s)
        throw ShapeError("iga_step: state does not match the model support");
    const double A = double(model.A());
    const double sp = model.cfg.sigma_p, sz = model.cfg.sigma_z;
    const double alpha = cfg.alpha;

    std::vector<double> P(s);
    double sumP = 0.0;
    for (std::size_t j = 0; j < s; ++j)
    {
        const double d = 1.0 / model.W[model.S[j]] - st.F[j];
        if (!(d > 0.0) || !std::isfinite(d))
            diverged(st, "non-positive variance");
        P[j] = 1.0 / d;
        sumP += P[j];
    }
    const double gamma = 1.0 / (sz + sp * sumP);

    DenseTensor mean(model.grid.shape());
    for (std::size_t j = 0; j < s; ++j)
        mean[model.S[j]] = P[j] * st.D[j];
    DenseTensor r = forward_operator(mean, model, cfg.path);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = Y[i] - r[i];
    const DenseTensor g = adjoint_operator(r, model, cfg.path);

    IGAState nx;
    nx.t = st.t + 1;
    nx.D.resize(s);
    nx.F.resize(s);
    double dn = 0.0, d0 = 0.0;
    for (std::size_t j = 0; j < s; ++j)
    {
        const double shrink = 1.0 - gamma * sp * P[j];
        if (!(shrink > 0.0))
            diverged(st, "non-positive first-order divisor");
        nx.D[j] = alpha * (A - 1.0) / A / shrink * (A * st.D[j] + gamma * g[model.S[j]]) + (1.0 - alpha * A) * st.D[j];

        const double inner = cfg.sonp == SonpVariant::squared ? P[j] - gamma * sp * P[j] * P[j] : P[j] - gamma;
        if (!(inner > 0.0))
            diverged(st, "non-positive second-order term");
        nx.F[j] = alpha * (A - 1.0) * (1.0 / model.W[model.S[j]] - 1.0 / inner) + (1.0 - alpha * A) * st.F[j];

        if (!std::isfinite(nx.D[j].real()) || !std::isfinite(nx.D[j].imag()) || !std::isfinite(nx.F[j]))
            diverged(st, "non-finite parameters");
        dn += std::norm(nx.D[j] - st.D[j]);
        d0 += std::norm(st.D[j]);
    }
    nx.change = std::sqrt(dn) / std::max(std::sqrt(d0), 1e-30);
    return nx;
}

DenseTensor iga_estimate(const IGAState &st, const AggregateModel &model)
{
    const double A = double(model.A());
    const double c = A / (A - 1.0);
    DenseTensor out(model.grid.shape());
    for (std::size_t j = 0; j < model.S.size(); ++j)
    {
        const double d = 1.0 / model.W[model.S[j]] - c * st.F[j];
        if (!(d > 0.0))
            diverged(st, "non-positive variance in the read-out");
        out[model.S[j]] = c * st.D[j] / d;
    }
    return out;
}

IGAResult iga_run(const DenseTensor &Y, const AggregateModel &model, const EstimatorConfig &cfg)
{
    cfg.validate();
    IGAResult res;
    IGAState st = iga_init(model);
    if (model.S.empty())
    {
        res.H = DenseTensor(model.grid.shape());
        res.converged = true;
        return res;
    }
    while (st.t < cfg.t_max)
    {
        st = iga_step(st, Y, model, cfg);
        res.history.push_back(st.change);
        if (st.change < cfg.tol)
        {
            res.converged = true;
            break;
        }
    }
    res.iterations = st.t;
    res.final_change = st.change;
    res.H = iga_estimate(st, model);
    return res;
}

std::vector<DenseTensor> recover_per_ut(const DenseTensor &H, const AggregateModel &model,
                                        const std::vector<RealTensor> &W_u, const PilotAssignment &a)
{
    check_tb(H, model);
    if (W_u.size() != a.pairs.size())
        throw ShapeError("recover_per_ut: power and assignment counts differ");
    DenseTensor norm(model.grid.shape());
    for (std::size_t i : model.S)
        norm[i] = H[i] / model.W[i];
    std::vector<DenseTensor> out;
    out.reserve(W_u.size());
    for (std::size_t u = 0; u < W_u.size(); ++u)
    {
        DenseTensor h = inverse_shift(norm, a.pairs[u], model.grid);
        for (std::size_t i = 0; i < h.size(); ++i)
            h[i] *= W_u[u][i];
        out.push_back(std::move(h));
    }
    return out;
}

DenseTensor predict_data_segment(const DenseTensor &H_u, const BeamOperators &ops, const SystemConfig &cfg)
{
    const std::size_t Ns = cfg.N_s(), Nb = cfg.N_b, Nn = ops.V_t_full.dim(1);
    DenseTensor Vd({Nb, Nn});
    for (std::size_t n = 0; n < Nn; ++n)
        for (std::size_t i = 0; i < Nb; ++i)
            Vd(i, n) = ops.V_t_full(Ns - Nb + i, n);
    return beam_synthesis(H_u, ops.V_s, ops.V_f, Vd);
}

} // namespace tfpsp
