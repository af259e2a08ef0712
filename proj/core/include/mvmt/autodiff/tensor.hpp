// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace mvmt::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// Buffers start on a cache-line boundary so vectorised reductions split the
// same way on every run; with plain malloc the peel depends on where the heap
// happened to put the block and results drift in the last bit.
template <class T>
struct CacheAligned {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};
  CacheAligned() = default;
  template <class U>
  CacheAligned(const CacheAligned<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }
  friend bool operator==(const CacheAligned&, const CacheAligned&) { return true; }
};

using Buffer = std::vector<double, CacheAligned<double>>;

struct TensorImpl {
  Shape shape;
  Buffer data;
  // Empty until the first gradient is accumulated.
  Buffer grad;
  bool requires_grad = false;
};

}  // namespace detail

/// Dense row-major array of doubles taking part in reverse-mode
/// differentiation.
///
/// A Tensor is a handle: copies alias the same storage, which is what lets a
/// Tape write gradients back into model parameters. Use clone() for an
/// independent value.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return impl_ != nullptr; }

  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return impl_->shape.at(axis); }
  std::size_t size() const { return impl_->data.size(); }

  std::span<const double> data() const { return impl_->data; }
  std::span<double> mutable_data() const { return impl_->data; }
  double operator[](std::size_t i) const { return impl_->data[i]; }
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool value);

  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const double> grad() const { return impl_->grad; }
  /// Adds `delta` into the gradient buffer, allocating it on first use.
  /// No-op for tensors that do not require gradients.
  void accumulate_grad(std::span<const double> delta) const;
  /// Mutable gradient buffer (allocated, zero-filled, on first use).
  std::span<double> grad_buffer() const;
  void zero_grad() const;

  /// Deep copy of shape and data; the copy has no gradient.
  Tensor clone(bool requires_grad = false) const;

  bool same_storage(const Tensor& other) const noexcept { return impl_ == other.impl_; }

 private:
  friend class Tape;
  std::shared_ptr<detail::TensorImpl> impl_;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

}  // namespace mvmt::ad
