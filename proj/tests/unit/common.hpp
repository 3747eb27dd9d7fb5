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

#include "tfpsp/harness.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace testutil
{

using tfpsp::cplx;
using tfpsp::DenseTensor;
using tfpsp::RealTensor;
using tfpsp::Shape;

inline DenseTensor random_tensor(const Shape &s, std::mt19937_64 &rng)
{
    std::normal_distribution<double> nd;
    DenseTensor t(s);
    for (auto &v : t.values())
        v = {nd(rng), nd(rng)};
    return t;
}

inline double rel_diff(const DenseTensor &a, const DenseTensor &b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline cplx expj(double x)
{
    return {std::cos(x), std::sin(x)};
}

// Small system used across the estimator and pilot tests.
inline tfpsp::SystemConfig small_cfg(std::size_t M, std::size_t K, std::size_t Np, std::size_t U = 1)
{
    tfpsp::SystemConfig c;
    c.M = M;
    c.K = K;
    c.N_p = Np;
    c.N_b = 2;
    c.N_c = 4 * K;
    c.N_g = K / 4;
    c.delta_f = 15e3;
    c.U = U;
    c.v_speed = 3.0 / 3.6;
    return c;
}

// Single-cell on-grid power tensor.
inline RealTensor cell_power(const Shape &s, std::size_t a, std::size_t b, std::size_t c, double p = 1.0)
{
    RealTensor W(s);
    W(a, b, c) = p;
    return W;
}

} // namespace testutil
