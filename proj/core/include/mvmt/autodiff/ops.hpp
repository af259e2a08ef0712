// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mvmt/autodiff/tape.hpp"
#include "mvmt/autodiff/tensor.hpp"
#include "mvmt/random.hpp"

// Differentiable operations. Each records its gradient rule on the tape when
// the tape is recording and at least one operand requires gradients;
// otherwise it is a plain forward computation.
namespace mvmt::ad {

// ---- linear algebra (rank-2 operands) ----

/// a[m×k] · b[k×n]
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
/// alpha · a[m×k] · b[n×k]ᵀ
Tensor matmul_bt(Tape& tape, const Tensor& a, const Tensor& b, double alpha = 1.0);
Tensor transpose(Tape& tape, const Tensor& x);

// ---- elementwise ----

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& x, double factor);
/// s · x where s is a one-element tensor (learned scalar weight).
Tensor scale_by(Tape& tape, const Tensor& x, const Tensor& s);
/// x[r×c] + bias[c] added to every row.
Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& bias);
Tensor relu(Tape& tape, const Tensor& x);
Tensor sigmoid(Tape& tape, const Tensor& x);

// ---- normalization ----

/// Row-wise softmax of x[r×c], max-subtracted. Non-finite input is a DomainError.
Tensor softmax_rows(Tape& tape, const Tensor& x);
/// Row-wise layer normalization of x[r×c] (c ≥ 2) with gain[c] and shift[c].
Tensor layer_norm(Tape& tape, const Tensor& x, const Tensor& gain, const Tensor& shift,
                  double eps = 1e-5);

/// Inverted dropout: in training mode each entry is zeroed with probability
/// `rate` and survivors are divided by (1 − rate). Identity when `train` is
/// false or `rate` is zero.
Tensor dropout(Tape& tape, const Tensor& x, double rate, Rng& rng, bool train);

// ---- convolution / pooling (channel-major C×H×W) ----

/// Cross-correlation of input[C×H×W] with kernels[F×C×kh×kw] plus bias[F].
Tensor conv2d(Tape& tape, const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride = 1, std::size_t padding = 0);
/// Non-overlapping max pooling with a size×size window; ties go to the first
/// index in row-major window order. Trailing rows/columns that do not fill a
/// window are dropped.
Tensor max_pool2d(Tape& tape, const Tensor& input, std::size_t size);

// ---- shape manipulation ----

Tensor reshape(Tape& tape, const Tensor& x, Shape shape);
/// Columns [begin, begin + count) of x[r×c].
Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t count);
Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts);
Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts);
/// Repeats a c-element tensor as every row of a rows×c result.
Tensor broadcast_rows(Tape& tape, const Tensor& row, std::size_t rows);

// ---- reductions ----

Tensor sum(Tape& tape, const Tensor& x);
Tensor mean(Tape& tape, const Tensor& x);

}  // namespace mvmt::ad
