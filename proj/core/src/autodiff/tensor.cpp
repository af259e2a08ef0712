// SPDX-License-Identifier: Apache-2.0
#include "mvmt/autodiff/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "mvmt/error.hpp"

namespace mvmt::ad {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  }
  if (shape_size(shape) != data.size()) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + shape_str(shape));
  }
  impl_->shape = std::move(shape);
  impl_->data.assign(data.begin(), data.end());
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = shape_size(shape);
  if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  }
  Tensor t;
  t.impl_ = std::make_shared<detail::TensorImpl>();
  t.impl_->shape = std::move(shape);
  t.impl_->data.assign(n, value);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({1}, {value}, requires_grad); }

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str(shape()));
  return impl_->data[0];
}

void Tensor::set_requires_grad(bool value) {
  impl_->requires_grad = value;
  if (!value) impl_->grad.clear();
}

void Tensor::accumulate_grad(std::span<const double> delta) const {
  if (!impl_->requires_grad) return;
  if (delta.size() != impl_->data.size()) {
    throw ShapeError("gradient length " + std::to_string(delta.size()) + " does not match tensor " +
                     shape_str(impl_->shape));
  }
  auto& g = impl_->grad;
  if (g.empty()) {
    g.assign(delta.begin(), delta.end());
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

std::span<double> Tensor::grad_buffer() const {
  if (!impl_->requires_grad) throw ContractError("tensor does not require gradients");
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() const {
  if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::clone(bool requires_grad) const {
  Tensor t;
  t.impl_ = std::make_shared<detail::TensorImpl>();
  t.impl_->shape = impl_->shape;
  t.impl_->data = impl_->data;
  t.impl_->requires_grad = requires_grad;
  return t;
}

}  // namespace mvmt::ad
