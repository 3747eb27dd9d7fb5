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

#include "tfpsp/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace tfpsp
{

namespace
{
thread_local std::size_t peak_elements = 0;

std::size_t numel_range(const Shape &s, std::size_t first, std::size_t last)
{
    std::size_t n = 1;
    for (std::size_t a = first; a < last; ++a)
        n *= s[a];
    return n;
}
} // namespace

void detail::note_alloc(std::size_t n)
{
    peak_elements = std::max(peak_elements, n);
}

std::size_t peak_tensor_elements() { return peak_elements; }
void reset_peak_tensor_elements() { peak_elements = 0; }

std::string shape_str(const Shape &s)
{
    std::string out = "(";
    for (std::size_t a = 0; a < s.size(); ++a)
    {
        if (a)
            out += ",";
        out += std::to_string(s[a]);
    }
    return out + ")";
}

std::size_t shape_numel(const Shape &s)
{
    std::size_t n = 1;
    for (auto v : s)
    {
        if (v == 0)
            throw ShapeError("zero-sized dimension in shape " + shape_str(s));
        n *= v;
    }
    return n;
}

DenseTensor identity_tensor(const Shape &half)
{
    Shape full = half;
    full.insert(full.end(), half.begin(), half.end());
    DenseTensor out(full);
    const std::size_t P = shape_numel(half);
    for (std::size_t i = 0; i < P; ++i)
        out[i + P * i] = 1.0;
    return out;
}

DenseTensor m_mode_product(const DenseTensor &X, const DenseTensor &M, std::size_t axis)
{
    if (M.rank() != 2)
        throw ShapeError("m_mode_product: operator must be a matrix, got " + shape_str(M.shape()));
    const std::size_t n = X.dim(axis);
    if (M.dim(1) != n)
        throw ShapeError("m_mode_product: matrix " + shape_str(M.shape()) + " does not match axis " +
                         std::to_string(axis) + " of " + shape_str(X.shape()));
    const std::size_t R = M.dim(0);
    const std::size_t inner = numel_range(X.shape(), 0, axis);
    const std::size_t outer = numel_range(X.shape(), axis + 1, X.rank());

    Shape os = X.shape();
    os[axis] = R;
    DenseTensor out(os);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < n; ++i)
        {
            const cplx *x = X.data() + (o * n + i) * inner;
            for (std::size_t r = 0; r < R; ++r)
            {
                const cplx m = M[r + R * i];
                if (m == 0.0)
                    continue;
                cplx *y = out.data() + (o * R + r) * inner;
                for (std::size_t j = 0; j < inner; ++j)
                    y[j] += m * x[j];
            }
        }
    return out;
}

DenseTensor einstein_product(const DenseTensor &A, const DenseTensor &B, std::size_t K)
{
    if (K > A.rank() || K > B.rank())
        throw ShapeError("einstein_product: K exceeds tensor rank");
    const std::size_t pa = A.rank() - K;
    for (std::size_t k = 0; k < K; ++k)
        if (A.shape()[pa + k] != B.shape()[k])
            throw ShapeError("einstein_product: modes " + shape_str(A.shape()) + " and " + shape_str(B.shape()) +
                             " do not match on " + std::to_string(K) + " contracted modes");

    const std::size_t Pa = numel_range(A.shape(), 0, pa);
    const std::size_t Pc = numel_range(B.shape(), 0, K);
    const std::size_t Pb = numel_range(B.shape(), K, B.rank());

    Shape os(A.shape().begin(), A.shape().begin() + static_cast<std::ptrdiff_t>(pa));
    os.insert(os.end(), B.shape().begin() + static_cast<std::ptrdiff_t>(K), B.shape().end());
    DenseTensor out(os);
    for (std::size_t b = 0; b < Pb; ++b)
        for (std::size_t c = 0; c < Pc; ++c)
        {
            const cplx s = B[c + Pc * b];
            if (s == 0.0)
                continue;
            const cplx *a = A.data() + Pa * c;
            cplx *y = out.data() + Pa * b;
            for (std::size_t i = 0; i < Pa; ++i)
                y[i] += a[i] * s;
        }
    return out;
}

static void check_half(const Shape &half, const Shape &s, std::size_t first, const char *what)
{
    if (first + half.size() > s.size() || !std::equal(half.begin(), half.end(), s.begin() + static_cast<std::ptrdiff_t>(first)))
        throw ShapeError(std::string(what) + ": pseudo-diagonal half shape " + shape_str(half) + " does not match " + shape_str(s));
}

DenseTensor einstein_product(const PseudoDiagTensor &A, const DenseTensor &B)
{
    check_half(A.half_shape, B.shape(), 0, "einstein_product");
    const std::size_t P = A.diag.size();
    DenseTensor out(B.shape());
    const std::size_t Q = B.size() / P;
    for (std::size_t j = 0; j < Q; ++j)
        for (std::size_t i = 0; i < P; ++i)
            out[i + P * j] = A.diag[i] * B[i + P * j];
    return out;
}

DenseTensor einstein_product(const DenseTensor &A, const PseudoDiagTensor &B)
{
    const std::size_t hr = B.half_shape.size();
    if (hr > A.rank())
        throw ShapeError("einstein_product: pseudo-diagonal rank exceeds tensor rank");
    check_half(B.half_shape, A.shape(), A.rank() - hr, "einstein_product");
    const std::size_t P = B.diag.size();
    const std::size_t Q = A.size() / P;
    DenseTensor out(A.shape());
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < Q; ++j)
            out[j + Q * i] = A[j + Q * i] * B.diag[i];
    return out;
}

DenseTensor outer_product(const DenseTensor &X, const DenseTensor &Y)
{
    Shape os = X.shape();
    os.insert(os.end(), Y.shape().begin(), Y.shape().end());
    DenseTensor out(os);
    const std::size_t P = X.size();
    for (std::size_t j = 0; j < Y.size(); ++j)
        for (std::size_t i = 0; i < P; ++i)
            out[i + P * j] = X[i] * Y[j];
    return out;
}

DenseTensor m_hermitian(const DenseTensor &A, std::size_t M)
{
    if (M == 0 || M >= A.rank())
        throw ShapeError("m_hermitian: leading mode count " + std::to_string(M) + " out of range for " + shape_str(A.shape()));
    const std::size_t P = numel_range(A.shape(), 0, M);
    const std::size_t Q = A.size() / P;
    Shape os(A.shape().begin() + static_cast<std::ptrdiff_t>(M), A.shape().end());
    os.insert(os.end(), A.shape().begin(), A.shape().begin() + static_cast<std::ptrdiff_t>(M));
    DenseTensor out(os);
    for (std::size_t j = 0; j < Q; ++j)
        for (std::size_t i = 0; i < P; ++i)
            out[j + Q * i] = std::conj(A[i + P * j]);
    return out;
}

PseudoDiagTensor make_pseudo_diag(const DenseTensor &diag)
{
    PseudoDiagTensor out{diag.shape(), diag, {}};
    for (std::size_t i = 0; i < diag.size(); ++i)
        if (diag[i] != 0.0)
            out.support.push_back(i);
    return out;
}

PseudoDiagTensor pseudo_inverse_elementwise(const PseudoDiagTensor &A)
{
    PseudoDiagTensor out{A.half_shape, DenseTensor(A.diag.shape()), {}};
    for (std::size_t i = 0; i < A.diag.size(); ++i)
        if (A.diag[i] != 0.0)
        {
            out.diag[i] = 1.0 / A.diag[i];
            out.support.push_back(i);
        }
    return out;
}

DenseTensor to_dense(const PseudoDiagTensor &A)
{
    Shape full = A.half_shape;
    full.insert(full.end(), A.half_shape.begin(), A.half_shape.end());
    DenseTensor out(full);
    const std::size_t P = A.diag.size();
    for (std::size_t i = 0; i < P; ++i)
        out[i + P * i] = A.diag[i];
    return out;
}

cplx tensor_trace(const DenseTensor &A, std::size_t M)
{
    if (A.rank() != 2 * M || M == 0)
        throw ShapeError("tensor_trace: tensor " + shape_str(A.shape()) + " is not square in " + std::to_string(M) + " modes");
    for (std::size_t a = 0; a < M; ++a)
        if (A.shape()[a] != A.shape()[M + a])
            throw ShapeError("tensor_trace: tensor " + shape_str(A.shape()) + " is not square");
    const std::size_t P = numel_range(A.shape(), 0, M);
    cplx s = 0.0;
    for (std::size_t i = 0; i < P; ++i)
        s += A[i + P * i];
    return s;
}

cplx tensor_trace(const PseudoDiagTensor &A)
{
    cplx s = 0.0;
    for (std::size_t i = 0; i < A.diag.size(); ++i)
        s += A.diag[i];
    return s;
}

DenseTensor conj(const DenseTensor &X)
{
    DenseTensor out(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i)
        out[i] = std::conj(X[i]);
    return out;
}

DenseTensor to_complex(const RealTensor &X)
{
    DenseTensor out(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i)
        out[i] = X[i];
    return out;
}

double max_abs_diff(const DenseTensor &A, const DenseTensor &B)
{
    if (A.shape() != B.shape())
        throw ShapeError("max_abs_diff: shapes " + shape_str(A.shape()) + " and " + shape_str(B.shape()) + " differ");
    double m = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
        m = std::max(m, std::abs(A[i] - B[i]));
    return m;
}

} // namespace tfpsp
