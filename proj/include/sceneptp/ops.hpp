#pragma once

#include <cstdint>
#include <vector>

#include "sceneptp/tensor.hpp"

// Differentiable tensor operations. Elementwise binary ops support
// leading-batch broadcasting only: the shorter shape must equal the trailing
// extents of the longer one. Anything else is a DimensionError.
namespace sceneptp {

enum class Padding { kCausal, kSymmetric };

/// Boolean selection over a tensor of the same shape (1 = kept).
struct Mask {
  Shape shape;
  std::vector<std::uint8_t> keep;
};

template <Real T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <Real T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <Real T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <Real T> Tensor<T> scale(const Tensor<T>& a, T factor);

template <Real T> Tensor<T> relu(const Tensor<T>& x);
// slope is a single learned coefficient of shape [1].
template <Real T> Tensor<T> prelu(const Tensor<T>& x, const Tensor<T>& slope);

// [..., m, k] x [..., k, n]; batch extents follow the leading-batch rule.
template <Real T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
// x [..., in] * w [in, out] + b [out]; bias may be undefined.
template <Real T> Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <Real T> Tensor<T> reshape(const Tensor<T>& x, const Shape& shape);
template <Real T> Tensor<T> permute(const Tensor<T>& x, const std::vector<std::size_t>& order);
// Swaps the last two axes.
template <Real T> Tensor<T> transpose(const Tensor<T>& x);
template <Real T> Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis);
// Removes `axis`, keeping slice `index`.
template <Real T> Tensor<T> select(const Tensor<T>& x, int axis, std::size_t index);

template <Real T> Tensor<T> softmax(const Tensor<T>& x, int axis);
// Softmax over the last axis restricted to kept entries; dropped entries are
// exactly zero. Row sums are taken in sorted order, which makes the result
// independent of the order of the kept entries.
template <Real T> Tensor<T> masked_softmax(const Tensor<T>& scores, const Mask& mask);
// weights [B, R, C] (mask alongside) times x [B, C, D] -> [B, R, D], summing
// only kept (r, c) pairs, each output as a sorted sum of its products.
template <Real T> Tensor<T> sparse_aggregate(const Tensor<T>& weights, const Mask& mask, const Tensor<T>& x);

template <Real T> Tensor<T> sum(const Tensor<T>& x);
template <Real T> Tensor<T> mean(const Tensor<T>& x, int axis);
template <Real T> Tensor<T> mean_all(const Tensor<T>& x);
// Euclidean norm along `axis`, which is removed. The gradient at a zero
// vector is taken as zero.
template <Real T> Tensor<T> l2norm(const Tensor<T>& x, int axis);
template <Real T> Tensor<T> cumsum(const Tensor<T>& x, int axis);

// x [N, C_in, T], kernel [C_out, C_in, k], bias [C_out] or undefined.
template <Real T>
Tensor<T> conv1d(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias, std::size_t dilation,
                 Padding padding);
// x [N, C_in, H, W], kernel [C_out, C_in, k, k] with k odd, zero padding k/2;
// output extents are ceil(H / stride) x ceil(W / stride).
template <Real T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias, std::size_t stride);

}  // namespace sceneptp
