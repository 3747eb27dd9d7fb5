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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tfpsp
{

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;

class ShapeError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

std::string shape_str(const Shape &s);
std::size_t shape_numel(const Shape &s);

namespace detail
{
void note_alloc(std::size_t n);
}

// Largest element count of any tensor constructed on this thread since the last reset.
std::size_t peak_tensor_elements();
void reset_peak_tensor_elements();

// N-mode array. Storage order is first index fastest:
// element (i0, i1, i2, ...) lives at i0 + n0 * (i1 + n1 * (i2 + ...)).
template <typename T>
class Tensor
{
public:
    Tensor() = default;

    explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_numel(shape_), T{})
    {
        detail::note_alloc(data_.size());
    }

    Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data))
    {
        if (data_.size() != shape_numel(shape_))
            throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " + shape_str(shape_));
        detail::note_alloc(data_.size());
    }

    const Shape &shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    std::size_t dim(std::size_t axis) const
    {
        if (axis >= shape_.size())
            throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape_));
        return shape_[axis];
    }

    T *data() { return data_.data(); }
    const T *data() const { return data_.data(); }
    std::vector<T> &values() { return data_; }
    const std::vector<T> &values() const { return data_; }

    T &operator[](std::size_t i) { return data_[i]; }
    const T &operator[](std::size_t i) const { return data_[i]; }

    template <typename... I>
    T &operator()(I... idx) { return data_[offset_of(idx...)]; }
    template <typename... I>
    const T &operator()(I... idx) const { return data_[offset_of(idx...)]; }

    std::size_t offset(const std::vector<std::size_t> &idx) const
    {
        if (idx.size() != shape_.size())
            throw ShapeError("index rank mismatch");
        std::size_t off = 0, stride = 1;
        for (std::size_t a = 0; a < idx.size(); ++a)
        {
            off += idx[a] * stride;
            stride *= shape_[a];
        }
        return off;
    }

    std::vector<std::size_t> index(std::size_t off) const
    {
        std::vector<std::size_t> idx(shape_.size());
        for (std::size_t a = 0; a < shape_.size(); ++a)
        {
            idx[a] = off % shape_[a];
            off /= shape_[a];
        }
        return idx;
    }

    double norm2() const
    {
        double s = 0.0;
        for (const auto &v : data_)
            s += std::norm(v);
        return s;
    }

private:
    template <typename... I>
    std::size_t offset_of(I... idx) const
    {
        const std::size_t ix[] = {static_cast<std::size_t>(idx)...};
        if (sizeof...(I) != shape_.size())
            throw ShapeError("index rank mismatch");
        std::size_t off = 0, stride = 1;
        for (std::size_t a = 0; a < sizeof...(I); ++a)
        {
            off += ix[a] * stride;
            stride *= shape_[a];
        }
        return off;
    }

    Shape shape_;
    std::vector<T> data_;
};

using DenseTensor = Tensor<cplx>;
using RealTensor = Tensor<double>;

// Square 2M-mode tensor that is zero off the pseudo-diagonal.
// Only the pseudo-diagonal (shape half_shape) is stored.
struct PseudoDiagTensor
{
    Shape half_shape;
    DenseTensor diag;
    std::vector<std::size_t> support; // optional; empty means "all non-zero entries of diag"
};

struct CyclicShiftSpec
{
    std::size_t axis = 0;
    long long length = 0;
};

// Square identity tensor with half shape `half` (2M modes).
DenseTensor identity_tensor(const Shape &half);

// (X x_m M): axis `axis` of X contracted with the columns of matrix M.
DenseTensor m_mode_product(const DenseTensor &X, const DenseTensor &M, std::size_t axis);

// A *_K B: the last K modes of A are contracted with the first K modes of B.
DenseTensor einstein_product(const DenseTensor &A, const DenseTensor &B, std::size_t K);

// Pseudo-diagonal products; both reduce to elementwise scaling.
DenseTensor einstein_product(const PseudoDiagTensor &A, const DenseTensor &B);
DenseTensor einstein_product(const DenseTensor &A, const PseudoDiagTensor &B);

DenseTensor outer_product(const DenseTensor &X, const DenseTensor &Y);

// Swap the first M modes with the rest and conjugate.
DenseTensor m_hermitian(const DenseTensor &A, std::size_t M);

// Output index i along spec.axis holds input index <i + length>.
template <typename T>
Tensor<T> cyclic_shift(const Tensor<T> &X, const CyclicShiftSpec &spec)
{
    const std::size_t n = X.dim(spec.axis);
    std::size_t inner = 1, outer = 1;
    for (std::size_t a = 0; a < spec.axis; ++a)
        inner *= X.shape()[a];
    for (std::size_t a = spec.axis + 1; a < X.rank(); ++a)
        outer *= X.shape()[a];
    const long long nn = static_cast<long long>(n);
    const std::size_t m = static_cast<std::size_t>(((spec.length % nn) + nn) % nn);
    Tensor<T> out(X.shape());
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::size_t src = (i + m) % n;
            const T *s = X.data() + (o * n + src) * inner;
            T *d = out.data() + (o * n + i) * inner;
            for (std::size_t j = 0; j < inner; ++j)
                d[j] = s[j];
        }
    return out;
}

PseudoDiagTensor make_pseudo_diag(const DenseTensor &diag);
PseudoDiagTensor pseudo_inverse_elementwise(const PseudoDiagTensor &A);
DenseTensor to_dense(const PseudoDiagTensor &A);

// Trace of a square tensor whose first M modes match the last M.
cplx tensor_trace(const DenseTensor &A, std::size_t M);
cplx tensor_trace(const PseudoDiagTensor &A);

DenseTensor conj(const DenseTensor &X);
DenseTensor to_complex(const RealTensor &X);
double max_abs_diff(const DenseTensor &A, const DenseTensor &B);

} // namespace tfpsp
