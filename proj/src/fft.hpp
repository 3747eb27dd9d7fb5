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

#include <array>
#include <complex>
#include <cstddef>

namespace tfpsp::detail
{

// In-place unnormalized DFT along one axis of a first-index-fastest 3-D array.
// sign = -1: sum_n x[n] e^{-j 2 pi k n / N}; sign = +1: the conjugate kernel.
void fft_axis(std::complex<double> *data, const std::array<std::size_t, 3> &dims, std::size_t axis, int sign);

} // namespace tfpsp::detail
