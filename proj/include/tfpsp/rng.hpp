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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace tfpsp
{

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed streams. A trial seed is splitmix64(master ^ splitmix64(trial)); the per-purpose
// seeds of a trial are splitmix64(trial_seed + stream) for a fixed stream id.
enum class Stream : std::uint64_t
{
    scenario = 1,
    noise = 2
};

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial)
{
    return splitmix64(master ^ splitmix64(trial));
}

inline std::uint64_t stream_seed(std::uint64_t trial, Stream s)
{
    return splitmix64(trial + static_cast<std::uint64_t>(s));
}

// Circularly symmetric complex Gaussian with variance var.
inline std::complex<double> cgauss(std::mt19937_64 &rng, double var)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    const double s = std::sqrt(var / 2.0);
    const double re = nd(rng);
    const double im = nd(rng);
    return {s * re, s * im};
}

} // namespace tfpsp
