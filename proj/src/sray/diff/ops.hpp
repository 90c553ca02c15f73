// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sray/diff/tape.hpp"
#include "sray/diff/tensor.hpp"

namespace sray::diff {

// y = x @ w + b, shapes [B,I] x [I,O] + [O] -> [B,O].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
// y = x @ w, shapes [B,I] x [I,O] -> [B,O].
Tensor matmul(const Tensor& x, const Tensor& w);

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// y = k * a + c.
Tensor affine(const Tensor& a, double k, double c);
inline Tensor add_scalar(const Tensor& a, double c) { return affine(a, 1.0, c); }
inline Tensor mul_scalar(const Tensor& a, double k) { return affine(a, k, 0.0); }
inline Tensor neg(const Tensor& a) { return affine(a, -1.0, 0.0); }

// Elementwise nonlinearities. elu's derivative at 0 is 1 (continuous
// extension of the positive branch).
Tensor elu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp_op(const Tensor& a);
Tensor sin_op(const Tensor& a);
Tensor cos_op(const Tensor& a);

// Max-subtracted softmax over the last axis.
Tensor softmax(const Tensor& a);
// Inclusive prefix sums over the last axis.
Tensor cumsum(const Tensor& a);

// Full reductions to a scalar.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Sums out one axis: [d0,...,dk,...,dn] -> [d0,...,dn] without dk.
Tensor sum_axis(const Tensor& a, size_t axis);

// Last-axis slicing / concatenation.
Tensor slice_last(const Tensor& a, int64_t start, int64_t len);
Tensor concat_last(const std::vector<Tensor>& parts);

// Same element count, new shape (copies).
Tensor reshape(const Tensor& a, const Shape& shape);

// out[..., n, c] = a[..., n] * b[..., n, c]; a broadcast over the last axis of b.
Tensor scale_rows(const Tensor& a, const Tensor& b);

// Alpha-compositing partition: for alphas [..., N] returns [..., N+1] where
// entry i < N is the compositing weight (prod_{j<i}(1-a_j)) * a_i and entry N
// is the final transmittance prod(1-a_j). Rows sum to 1 by construction.
Tensor alpha_partition(const Tensor& alphas);

// Constant copy, cut off from the tape.
Tensor detach(const Tensor& a);

// Populates gradients of everything reachable from a scalar loss and clears
// the tape.
inline void backward(const Tensor& loss, Tape& tape) { tape.backward(loss); }

}  // namespace sray::diff
