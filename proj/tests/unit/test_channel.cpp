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

#include "tfpsp/channel.hpp"

#include <numbers>

using namespace tfpsp;
using testutil::expj;
using testutil::random_tensor;

namespace
{

constexpr double tp = 2.0 * std::numbers::pi;

SystemConfig tiny_cfg()
{
    SystemConfig c;
    c.M = 4;
    c.K = 8;
    c.N_c = 32;
    c.N_g = 8;
    c.k0 = 3;
    c.N_b = 2;
    c.N_p = 4;
    c.delta_f = 15e3;
    c.n_T = 3;
    c.v_speed = 30.0 / 3.6;
    return c;
}

// Closed-form SFT response of one path.
cplx path_response(const Path &p, const SystemConfig &cfg, std::size_t m, std::size_t k, std::size_t t_index)
{
    const double t = double(cfg.n_T * cfg.N_b + t_index) * cfg.T_sym();
    return p.gain * expj(-tp * double(m) * p.theta) * expj(-tp * double(cfg.k0 + k) * cfg.delta_f * p.tau) *
           expj(tp * p.nu * t);
}

} // namespace

TEST_SUITE("channel")
{

TEST_CASE("derived quantities and config validation")
{
    SystemConfig table;
    table.M = 128;
    table.K = 360;
    table.N_c = 2048;
    table.N_g = 144;
    CHECK(table.N_f() == 26);

    SystemConfig c = tiny_cfg();
    CHECK(c.N_s() == 8);
    CHECK(c.T_sym() == doctest::Approx(40.0 / (32.0 * 15e3)).epsilon(1e-15));
    const double x = c.nu_max() * c.T_sym() * 8.0;
    CHECK(c.N_d() == std::max<std::size_t>(1, std::size_t(std::ceil(x))));
    c.validate();

    SystemConfig bad = c;
    bad.k0 = 25;
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = c;
    bad.v_speed = 2000.0; // N_b * T_sym * nu_max > 1
    CHECK_THROWS_AS(bad.validate(), SpecError);
    bad = c;
    bad.K = 0;
    CHECK_THROWS_AS(bad.validate(), SpecError);
}

TEST_CASE("grid construction")
{
    const SystemConfig c = tiny_cfg();
    const TBGrid g = make_grid(c, 2, 2, 2);
    CHECK(g.shape() == Shape{8, 16, 8});
    CHECK(g.theta(0) == -0.5);
    CHECK(g.theta(4) == 0.0);
    CHECK(g.tau(3) == doctest::Approx(3.0 / (16.0 * 15e3)));
    CHECK(g.nu(4) == 0.0);
    CHECK(g.nu(0) == doctest::Approx(-0.5 / (2.0 * c.T_sym())));
    SystemConfig odd = c;
    odd.M = 3;
    CHECK_THROWS_AS(make_grid(odd, 1, 1, 1), SpecError);
    CHECK_NOTHROW(make_grid(odd, 2, 1, 1));
    CHECK_THROWS_AS(make_grid(c, 0, 1, 1), SpecError);
}

TEST_CASE("beam operators")
{
    SUBCASE("M=2, F=1 angle columns")
    {
        SystemConfig c = tiny_cfg();
        c.M = 2;
        const TBGrid g = make_grid(c, 1, 1, 1);
        const BeamOperators ops = build_beam_operators(c, g);
        CHECK(std::abs(ops.V_s(0, 0) - 1.0) <= 1e-12);
        CHECK(std::abs(ops.V_s(1, 0) + 1.0) <= 1e-12);
        CHECK(std::abs(ops.V_s(0, 1) - 1.0) <= 1e-12);
        CHECK(std::abs(ops.V_s(1, 1) - 1.0) <= 1e-12);
    }
    SUBCASE("DFT construction equals sampled steering vectors")
    {
        const SystemConfig c = tiny_cfg();
        for (std::size_t F : {1, 2})
        {
            const TBGrid g = make_grid(c, F, F, F);
            const BeamOperators ops = build_beam_operators(c, g);
            for (std::size_t m = 0; m < c.M; ++m)
                for (std::size_t n = 0; n < g.N_theta; ++n)
                    CHECK(std::abs(ops.V_s(m, n) - expj(-tp * double(m) * g.theta(n))) <= 1e-12);
            for (std::size_t k = 0; k < c.K; ++k)
                for (std::size_t n = 0; n < g.N_tau; ++n)
                    CHECK(std::abs(ops.V_f(k, n) - expj(-tp * double(c.k0 + k) * c.delta_f * g.tau(n))) <= 1e-10);
            for (std::size_t s = 0; s < c.N_s(); ++s)
                for (std::size_t n = 0; n < g.N_nu; ++n)
                {
                    const double t = double(c.n_T * c.N_b + s) * c.T_sym();
                    CHECK(std::abs(ops.V_t_full(s, n) - expj(tp * g.nu(n) * t)) <= 1e-10);
                }
            const BeamOperators st = build_beam_operators_steering(c, g);
            CHECK(max_abs_diff(ops.V_s, st.V_s) <= 1e-10);
            CHECK(max_abs_diff(ops.V_f, st.V_f) <= 1e-10);
            CHECK(max_abs_diff(ops.V_t_full, st.V_t_full) <= 1e-10);
            CHECK(max_abs_diff(ops.V_t_pilot, st.V_t_pilot) <= 1e-10);
        }
    }
    SUBCASE("unit modulus, Gram diagonal and pilot rows")
    {
        const SystemConfig c = tiny_cfg();
        const TBGrid g = make_grid(c, 2, 2, 2);
        const BeamOperators ops = build_beam_operators(c, g);
        for (const DenseTensor *V : {&ops.V_s, &ops.V_f, &ops.V_t_full, &ops.V_t_pilot})
            for (const cplx &v : V->values())
                CHECK(std::abs(std::abs(v) - 1.0) <= 1e-12);
        for (std::size_t n = 0; n < g.N_theta; ++n)
        {
            cplx d = 0.0;
            for (std::size_t m = 0; m < c.M; ++m)
                d += std::norm(ops.V_s(m, n));
            CHECK(std::abs(d - double(c.M)) <= 1e-12);
        }
        for (std::size_t n = 0; n < c.N_p; ++n)
            for (std::size_t col = 0; col < g.N_nu; ++col)
                CHECK(std::abs(ops.V_t_pilot(n, col) - ops.V_t_full(n * c.N_b, col)) <= 1e-12);
    }
}

TEST_CASE("snap_path_to_grid")
{
    const SystemConfig c = tiny_cfg();
    const TBGrid g = make_grid(c, 2, 2, 2);
    SUBCASE("grid point maps to itself")
    {
        Path p;
        p.theta = g.theta(5);
        p.tau = g.tau(3);
        p.nu = g.nu(2);
        CHECK(snap_path_to_grid(p, g) == GridIndex{5, 3, 2});
    }
    SUBCASE("ties go to the lower index")
    {
        Path p;
        p.theta = 0.5 * (g.theta(2) + g.theta(3));
        p.tau = 0.5 * (g.tau(1) + g.tau(2));
        p.nu = 0.5 * (g.nu(4) + g.nu(5));
        const GridIndex i = snap_path_to_grid(p, g);
        CHECK(i.n_theta == 2);
        CHECK(i.n_tau == 1);
        CHECK(i.n_nu == 4);
    }
    SUBCASE("angle axis wraps at +0.5")
    {
        Path p;
        p.theta = 0.5;
        CHECK(snap_path_to_grid(p, g).n_theta == 0);
        p.theta = 0.5 - 0.2 / double(g.N_theta);
        CHECK(snap_path_to_grid(p, g).n_theta == 0);
    }
    SUBCASE("random paths match an exhaustive scan")
    {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 500; ++trial)
        {
            Path p;
            p.theta = u(rng) - 0.5;
            p.tau = u(rng) * double(c.N_g) * c.T_s();
            p.nu = (u(rng) - 0.5) * c.nu_max();
            const GridIndex got = snap_path_to_grid(p, g);
            auto circ = [](double a, double b) {
                const double d = std::abs(a - b);
                return std::min(d, 1.0 - d);
            };
            double best = 1e300;
            for (std::size_t n = 0; n < g.N_theta; ++n)
                best = std::min(best, circ(g.theta(n), p.theta));
            CHECK(circ(g.theta(got.n_theta), p.theta) <= best + 1e-15);
            CHECK(circ(g.theta(got.n_theta), p.theta) <= 0.5 / double(g.N_theta) + 1e-15);
            best = 1e300;
            for (std::size_t n = 0; n < g.N_tau; ++n)
                best = std::min(best, std::abs(g.tau(n) - p.tau));
            CHECK(std::abs(g.tau(got.n_tau) - p.tau) <= best * (1.0 + 1e-12));
            best = 1e300;
            for (std::size_t n = 0; n < g.N_nu; ++n)
                best = std::min(best, std::abs(g.nu(n) - p.nu));
            CHECK(std::abs(g.nu(got.n_nu) - p.nu) <= best * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("build_tb_channel")
{
    const SystemConfig c = tiny_cfg();
    const TBGrid g = make_grid(c, 2, 2, 2);
    Path a;
    a.gain = {0.3, -0.4};
    a.theta = g.theta(1);
    a.tau = g.tau(2);
    a.nu = g.nu(3);
    a.power = 0.25;

    const UserChannel one = build_tb_channel({a}, g);
    std::size_t nz = 0;
    for (std::size_t i = 0; i < one.H_tb.size(); ++i)
        nz += one.H_tb[i] != cplx(0.0);
    CHECK(nz == 1);
    CHECK(one.H_tb(1, 2, 3) == a.gain);
    CHECK(one.W(1, 2, 3) == 0.25);
    CHECK(one.S == std::vector<std::size_t>{one.W.offset({1, 2, 3})});

    Path b = a;
    b.gain = {-1.0, 2.0};
    b.power = 0.5;
    b.theta += 0.1 / double(g.N_theta);
    const UserChannel two = build_tb_channel({a, b}, g);
    CHECK(two.H_tb(1, 2, 3) == a.gain + b.gain);
    CHECK(two.W(1, 2, 3) == 0.75);

    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        PathSet ps(5);
        for (auto &p : ps)
        {
            p.gain = {u(rng), u(rng)};
            p.theta = u(rng) - 0.5;
            p.tau = u(rng) * 1e-5;
            p.nu = (u(rng) - 0.5) * 100.0;
            p.power = u(rng) + 0.1;
        }
        const UserChannel ch = build_tb_channel(ps, g);
        std::size_t nnz = 0;
        for (std::size_t i = 0; i < ch.H_tb.size(); ++i)
        {
            nnz += ch.H_tb[i] != cplx(0.0);
            // H only where W is.
            if (ch.H_tb[i] != cplx(0.0))
                CHECK(ch.W[i] > 0.0);
        }
        CHECK(nnz <= 5);
        CHECK(ch.S == support_of(ch.W));
    }
}

TEST_CASE("tb_to_sft")
{
    const SystemConfig c = tiny_cfg();
    const TBGrid g = make_grid(c, 2, 2, 2);
    const BeamOperators ops = build_beam_operators(c, g);

    CHECK(tb_to_sft(DenseTensor(g.shape()), ops, Segment::pilot).norm2() == 0.0);

    SUBCASE("single on-grid path matches the closed form")
    {
        Path p;
        p.gain = {0.7, 0.2};
        p.theta = g.theta(6);
        p.tau = g.tau(5);
        p.nu = g.nu(2);
        const DenseTensor H = tb_to_sft(build_tb_channel({p}, g).H_tb, ops, Segment::full);
        REQUIRE(H.shape() == Shape{c.M, c.K, c.N_s()});
        for (std::size_t m = 0; m < c.M; ++m)
            for (std::size_t k = 0; k < c.K; ++k)
                for (std::size_t n = 0; n < c.N_s(); ++n)
                    CHECK(std::abs(H(m, k, n) - path_response(p, c, m, k, n)) <= 1e-12);
        const DenseTensor Hp = tb_to_sft(build_tb_channel({p}, g).H_tb, ops, Segment::pilot);
        for (std::size_t n = 0; n < c.N_p; ++n)
            CHECK(std::abs(Hp(1, 2, n) - path_response(p, c, 1, 2, n * c.N_b)) <= 1e-12);
    }
    SUBCASE("mode products commute and equal the materialized triple-beam tensor")
    {
        std::mt19937_64 rng(23);
        SystemConfig s = c;
        s.M = 2;
        s.K = 3;
        s.N_c = 8;
        s.N_g = 2;
        s.k0 = 1;
        s.N_p = 2;
        const TBGrid sg = make_grid(s, 1, 2, 1);
        const BeamOperators so = build_beam_operators(s, sg);
        const DenseTensor H = random_tensor(sg.shape(), rng);
        const DenseTensor out = tb_to_sft(H, so, Segment::pilot);

        DenseTensor V({s.M, s.K, s.N_p, sg.N_theta, sg.N_tau, sg.N_nu});
        for (std::size_t i = 0; i < V.size(); ++i)
        {
            const auto x = V.index(i);
            V[i] = so.V_s(x[0], x[3]) * so.V_f(x[1], x[4]) * so.V_t_pilot(x[2], x[5]);
        }
        CHECK(max_abs_diff(out, einstein_product(V, H, 3)) <= 1e-12);

        const DenseTensor alt =
            m_mode_product(m_mode_product(m_mode_product(H, so.V_t_pilot, 2), so.V_s, 0), so.V_f, 1);
        CHECK(max_abs_diff(out, alt) <= 1e-12);
    }
    SUBCASE("shape mismatch")
    {
        CHECK_THROWS_AS(tb_to_sft(DenseTensor({3, 3, 3}), ops, Segment::full), ShapeError);
    }
}

TEST_CASE("sft_direct_offgrid")
{
    const SystemConfig c = tiny_cfg();
    const TBGrid g = make_grid(c, 2, 2, 2);
    const BeamOperators ops = build_beam_operators(c, g);

    CHECK(sft_direct_offgrid({}, c, Segment::full).norm2() == 0.0);

    std::mt19937_64 rng(24);
    std::uniform_int_distribution<std::size_t> ia(0, g.N_theta - 1), ib(0, g.N_tau - 1), ic(0, g.N_nu - 1);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial)
    {
        PathSet ps(3);
        for (auto &p : ps)
        {
            p.gain = {nd(rng), nd(rng)};
            p.theta = g.theta(ia(rng));
            p.tau = g.tau(ib(rng));
            p.nu = g.nu(ic(rng));
            p.power = 1.0;
        }
        const UserChannel ch = build_tb_channel(ps, g);
        for (Segment s : {Segment::full, Segment::pilot})
            CHECK(max_abs_diff(sft_direct_offgrid(ps, c, s), tb_to_sft(ch.H_tb, ops, s)) <= 1e-10);
    }

    // Negating the Doppler only conjugates the time factor.
    Path p;
    p.gain = {0.4, 0.9};
    p.theta = 0.123;
    p.tau = 1.7e-6;
    p.nu = 211.0;
    Path q = p;
    q.nu = -p.nu;
    const DenseTensor Hp = sft_direct_offgrid({p}, c, Segment::full);
    const DenseTensor Hq = sft_direct_offgrid({q}, c, Segment::full);
    for (std::size_t n = 0; n < c.N_s(); ++n)
    {
        const double t = double(c.n_T * c.N_b + n) * c.T_sym();
        for (std::size_t m = 0; m < c.M; ++m)
            for (std::size_t k = 0; k < c.K; ++k)
                CHECK(std::abs(Hq(m, k, n) - Hp(m, k, n) * expj(-2.0 * tp * p.nu * t)) <= 1e-12);
    }
}

TEST_CASE("synthesize_scenario")
{
    SystemConfig c = tiny_cfg();
    c.U = 6;
    const TBGrid g = make_grid(c, 2, 2, 2);
    GeneratorSettings gen;
    gen.paths_per_ut = 5;

    const auto a = synthesize_scenario(c, g, gen, 99);
    const auto b = synthesize_scenario(c, g, gen, 99);
    REQUIRE(a.size() == 6);
    for (std::size_t u = 0; u < a.size(); ++u)
    {
        CHECK(max_abs_diff(a[u].H_tb, b[u].H_tb) == 0.0);
        double total = 0.0;
        for (const Path &p : a[u].paths)
        {
            total += p.power;
            CHECK(p.theta >= -0.5);
            CHECK(p.theta <= 0.5);
            CHECK(p.tau >= 0.0);
            CHECK(p.tau <= double(c.N_g) * c.T_s());
            CHECK(std::abs(p.nu) <= c.nu_max() / 2.0);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("support bounds hold across seeds and fine factors")
    {
        for (std::size_t F : {1, 2, 3})
        {
            SystemConfig cf = c;
            const TBGrid gf = make_grid(cf, 2 * F, F, 2 * F);
            for (std::uint64_t seed = 0; seed < 20; ++seed)
                for (const auto &ch : synthesize_scenario(cf, gf, gen, seed))
                {
                    CHECK(support_within_bounds(ch, cf, gf));
                    const long long w = (long long)(cf.N_d() * gf.F_nu), Nn = (long long)gf.N_nu;
                    for (std::size_t i : ch.S)
                    {
                        const auto x = ch.W.index(i);
                        CHECK(x[1] < gf.F_tau * cf.N_f());
                        CHECK(2 * (long long)x[2] >= Nn - w);
                        CHECK(2 * (long long)x[2] < Nn + w);
                    }
                }
        }
    }
    SUBCASE("on-grid draws sit on grid points")
    {
        gen.on_grid = true;
        for (const auto &ch : synthesize_scenario(c, g, gen, 5))
            for (const Path &p : ch.paths)
            {
                const GridIndex i = snap_path_to_grid(p, g);
                CHECK(g.theta(i.n_theta) == p.theta);
                CHECK(g.tau(i.n_tau) == p.tau);
                CHECK(g.nu(i.n_nu) == p.nu);
            }
    }
    SUBCASE("empirical per-cell power matches the configured power")
    {
        Path p;
        p.theta = 0.1;
        p.tau = 1e-6;
        p.nu = 5.0;
        p.power = 0.8;
        const RealTensor emp = empirical_power({p}, g, 10000, 7);
        const UserChannel ch = build_tb_channel({p}, g);
        REQUIRE(ch.S.size() == 1);
        CHECK(std::abs(emp[ch.S[0]] - 0.8) <= 0.05 * 0.8);
        CHECK(support_of(emp) == ch.S);
    }
}

TEST_CASE("covariance_from_power")
{
    SystemConfig c = tiny_cfg();
    c.M = 2;
    c.K = 4;
    c.N_c = 16;
    c.N_g = 4;
    c.k0 = 1;
    c.N_p = 2;
    const TBGrid g = make_grid(c, 2, 2, 2);
    const BeamOperators ops = build_beam_operators(c, g);

    CHECK(covariance_from_power(RealTensor(g.shape()), ops, Segment::pilot).norm2() == 0.0);

    DenseTensor cell(g.shape());
    cell(3, 5, 1) = 1.0;
    const DenseTensor v = tb_to_sft(cell, ops, Segment::pilot);
    const DenseTensor R = covariance_from_power(testutil::cell_power(g.shape(), 3, 5, 1), ops, Segment::pilot);
    CHECK(max_abs_diff(R, outer_product(v, conj(v))) <= 1e-12);

    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealTensor W(g.shape());
    for (auto &x : W.values())
        x = u(rng) < 0.2 ? u(rng) : 0.0;
    const DenseTensor Rw = covariance_from_power(W, ops, Segment::pilot);
    const std::size_t A = c.M * c.K * c.N_p;
    for (std::size_t i = 0; i < A; ++i)
    {
        CHECK(std::abs(Rw[i + A * i].imag()) <= 1e-12);
        CHECK(Rw[i + A * i].real() >= 0.0);
    }
    CHECK_THROWS_AS(covariance_from_power(W, ops, Segment::pilot, A - 1), CapError);
}

} // TEST_SUITE
