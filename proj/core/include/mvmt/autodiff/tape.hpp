// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mvmt/autodiff/tensor.hpp"

namespace mvmt::ad {

/// Ordered record of differentiable operations.
///
/// Operations append a node holding their output and a closure that reads the
/// output gradient and accumulates into the operands. Nodes are appended in
/// execution order, so operands always precede their consumers and a single
/// reverse sweep is a valid topological traversal.
///
/// A tape constructed with `recording = false` records nothing; it is used for
/// evaluation passes, where intermediates can be released as soon as they go
/// out of scope.
///
/// A tape and everything recorded on it belong to one thread.
class Tape {
 public:
  using Backward = std::function<void()>;

  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return recording_; }

  /// True when an op over these operands must be recorded.
  bool wants_grad(std::initializer_list<const Tensor*> operands) const;
  bool wants_grad(const std::vector<Tensor>& operands) const;

  /// Registers `output` as produced by an op whose gradient rule is `fn`.
  /// Marks the output as requiring gradients.
  void record(Tensor& output, Backward fn);

  /// Runs the reverse sweep from a scalar `loss` recorded on this tape.
  ///
  /// Gradients of intermediate results are reset at the start of every call;
  /// gradients of leaves (tensors not produced on this tape) accumulate, so
  /// calling backward twice doubles every leaf gradient.
  void backward(const Tensor& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    std::shared_ptr<detail::TensorImpl> output;
    Backward backward;
  };

  std::vector<Node> nodes_;
  bool recording_;
};

}  // namespace mvmt::ad
