#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "adrev/tensor.hpp"

namespace adrev {

// Elementwise binary operations require identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

/// x[..., n] + bias[n], the only broadcast the core supports.
Tensor add_bias(const Tensor& x, const Tensor& bias);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double value);

Tensor matmul(const Tensor& a, const Tensor& b);
/// Batched product over the leading axis: [B,m,k] x [B,k,n] -> [B,m,n].
/// With transpose_b the second operand is read as [B,n,k].
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor elu(const Tensor& x, double alpha = 1.0);
Tensor softplus(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor square(const Tensor& x);

Tensor softmax(const Tensor& x, int axis);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);
/// 2-D transpose.
Tensor transpose(const Tensor& x);
/// Swaps the first two axes of a rank-3 tensor.
Tensor transpose01(const Tensor& x);

Tensor concat(std::span<const Tensor> parts, int axis);
Tensor slice(const Tensor& x, int axis, std::size_t start, std::size_t length);
inline Tensor slice_rows(const Tensor& x, std::size_t start, std::size_t length) {
  return slice(x, 0, start, length);
}

/// Stacks `times` copies of x along axis 0: [r, ...] -> [times*r, ...].
Tensor repeat_tile(const Tensor& x, std::size_t times);
/// Repeats each slice along axis 0 consecutively: row i lands at i*times..i*times+times-1.
Tensor repeat_interleave(const Tensor& x, std::size_t times);

/// Replaces entries of x where mask is false. The mask covers the trailing
/// axes of x and is reused across the leading ones.
Tensor masked_fill(const Tensor& x, const std::vector<bool>& keep, double fill);

/// Row lookup into table [V, d]; indices outside [0, V) raise DataError.
Tensor embedding(const Tensor& table, std::span<const int> indices);

/// Inverted dropout: kept entries are scaled by 1/(1-p). Identity when
/// training is false or p == 0.
Tensor dropout(const Tensor& x, double p, bool training, std::mt19937_64* rng);

}  // namespace adrev
