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

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace tfpsp::detail
{

namespace
{
using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>;

struct PlanCache
{
    std::mutex mu;
    std::map<Key, fftw_plan> plans;

    ~PlanCache()
    {
        for (auto &kv : plans)
            fftw_destroy_plan(kv.second);
    }
};

PlanCache &cache()
{
    static PlanCache c;
    return c;
}

// Plans are created once per (shape, axis, direction) under a lock; the planner is not
// re-entrant, but executing an existing plan on new arrays is.
fftw_plan get_plan(const std::array<std::size_t, 3> &d, std::size_t axis, int sign)
{
    PlanCache &c = cache();
    const Key key{d[0], d[1], d[2], axis, sign};
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.plans.find(key);
    if (it != c.plans.end())
        return it->second;

    const int n0 = (int)d[0], n1 = (int)d[1], n2 = (int)d[2];
    fftw_iodim dim{}, loops[2]{};
    if (axis == 0)
    {
        dim = {n0, 1, 1};
        loops[0] = {n1, n0, n0};
        loops[1] = {n2, n0 * n1, n0 * n1};
    }
    else if (axis == 1)
    {
        dim = {n1, n0, n0};
        loops[0] = {n0, 1, 1};
        loops[1] = {n2, n0 * n1, n0 * n1};
    }
    else
    {
        dim = {n2, n0 * n1, n0 * n1};
        loops[0] = {n0, 1, 1};
        loops[1] = {n1, n0, n0};
    }
    std::vector<fftw_complex> scratch(d[0] * d[1] * d[2]);
    fftw_plan p = fftw_plan_guru_dft(1, &dim, 2, loops, scratch.data(), scratch.data(),
                                     sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p)
        throw std::runtime_error("fftw planning failed");
    c.plans.emplace(key, p);
    return p;
}
} // namespace

void fft_axis(std::complex<double> *data, const std::array<std::size_t, 3> &dims, std::size_t axis, int sign)
{
    if (axis > 2)
        throw std::invalid_argument("fft_axis: axis out of range");
    fftw_plan p = get_plan(dims, axis, sign);
    auto *x = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(p, x, x);
}

} // namespace tfpsp::detail
