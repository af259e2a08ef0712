// SPDX-License-Identifier: Apache-2.0
#include "mvmt/autodiff/tape.hpp"

#include <algorithm>

#include "mvmt/error.hpp"

namespace mvmt::ad {

bool Tape::wants_grad(std::initializer_list<const Tensor*> operands) const {
  if (!recording_) return false;
  return std::any_of(operands.begin(), operands.end(),
                     [](const Tensor* t) { return t->defined() && t->requires_grad(); });
}

bool Tape::wants_grad(const std::vector<Tensor>& operands) const {
  if (!recording_) return false;
  return std::any_of(operands.begin(), operands.end(), [](const Tensor& t) { return t.requires_grad(); });
}

void Tape::record(Tensor& output, Backward fn) {
  output.impl_->requires_grad = true;
  nodes_.push_back(Node{output.impl_, std::move(fn)});
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward requires a scalar loss, got shape " +
                        (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  }
  auto it = std::find_if(nodes_.rbegin(), nodes_.rend(),
                         [&](const Node& n) { return n.output == loss.impl_; });
  if (it == nodes_.rend()) throw ContractError("backward: loss was not produced on this tape");
  const auto last = static_cast<std::size_t>(std::distance(it, nodes_.rend())) - 1;

  for (std::size_t i = 0; i <= last; ++i) {
    auto& out = *nodes_[i].output;
    out.grad.assign(out.data.size(), 0.0);
  }
  loss.impl_->grad[0] = 1.0;
  for (std::size_t i = last + 1; i-- > 0;) nodes_[i].backward();
}

}  // namespace mvmt::ad
