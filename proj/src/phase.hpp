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
#include <numbers>

namespace tfpsp::detail
{

// exp(j 2 pi num / den), with num reduced modulo den before the float conversion.
inline std::complex<double> unit_phase(long long num, long long den)
{
    long long r = num % den;
    if (r < 0)
        r += den;
    return std::polar(1.0, 2.0 * std::numbers::pi * double(r) / double(den));
}

inline long long pmod(long long a, long long n)
{
    const long long r = a % n;
    return r < 0 ? r + n : r;
}

} // namespace tfpsp::detail
