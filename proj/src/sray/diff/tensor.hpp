// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sray/core/check.hpp"

namespace sray::diff {

// Global precision mode: 32-bit for training/rendering, 64-bit for
// gradient-check work. All tensors created under one mode share its dtype;
// mixing dtypes in one expression is a contract violation.
enum class Dtype : uint8_t { F32 = 0, F64 = 1 };

Dtype default_dtype();
void set_default_dtype(Dtype dt);

// RAII switch of the global precision mode.
class DtypeScope {
 public:
  explicit DtypeScope(Dtype dt) : prev_(default_dtype()) { set_default_dtype(dt); }
  ~DtypeScope() { set_default_dtype(prev_); }
  DtypeScope(const DtypeScope&) = delete;
  DtypeScope& operator=(const DtypeScope&) = delete;

 private:
  Dtype prev_;
};

using Shape = std::vector<int64_t>;

int64_t numel(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {
// Allocator that default-initializes (skips zero-fill); used for buffers that
// every kernel overwrites in full.
template <class T>
struct NoInitAlloc : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = NoInitAlloc<U>;
  };
  template <class U>
  void construct(U* p) noexcept {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};
}  // namespace detail

// Dtype-erased contiguous storage.
class Buffer {
 public:
  Buffer() : dtype_(Dtype::F64) {}
  Buffer(Dtype dt, size_t n, bool zeroed = true) : dtype_(dt) {
    if (dt == Dtype::F32) {
      f_.resize(n);
      if (zeroed) std::fill(f_.begin(), f_.end(), 0.0f);
    } else {
      d_.resize(n);
      if (zeroed) std::fill(d_.begin(), d_.end(), 0.0);
    }
  }

  Dtype dtype() const { return dtype_; }
  size_t size() const { return dtype_ == Dtype::F32 ? f_.size() : d_.size(); }

  float* f32() { return f_.data(); }
  const float* f32() const { return f_.data(); }
  double* f64() { return d_.data(); }
  const double* f64() const { return d_.data(); }

  double get(size_t i) const { return dtype_ == Dtype::F32 ? static_cast<double>(f_[i]) : d_[i]; }
  void set(size_t i, double v) {
    if (dtype_ == Dtype::F32)
      f_[i] = static_cast<float>(v);
    else
      d_[i] = v;
  }
  void fill(double v) {
    if (dtype_ == Dtype::F32)
      std::fill(f_.begin(), f_.end(), static_cast<float>(v));
    else
      std::fill(d_.begin(), d_.end(), v);
  }

 private:
  Dtype dtype_;
  std::vector<float, detail::NoInitAlloc<float>> f_;
  std::vector<double, detail::NoInitAlloc<double>> d_;
};

template <class T>
T* buffer_ptr(Buffer& b);
template <>
inline float* buffer_ptr<float>(Buffer& b) {
  return b.f32();
}
template <>
inline double* buffer_ptr<double>(Buffer& b) {
  return b.f64();
}
template <class T>
const T* buffer_ptr(const Buffer& b);
template <>
inline const float* buffer_ptr<float>(const Buffer& b) {
  return b.f32();
}
template <>
inline const double* buffer_ptr<double>(const Buffer& b) {
  return b.f64();
}

struct Node {
  Shape shape;
  Buffer values;
  std::unique_ptr<Buffer> grad;  // allocated lazily, zero-initialized
  bool requires_grad = false;    // true for parameters (leaves)
  bool needs_grad = false;       // true if gradients must flow through here
  std::string name;              // parameters only

  Buffer& ensure_grad() {
    if (!grad) grad = std::make_unique<Buffer>(values.dtype(), values.size());
    return *grad;
  }
};

// Value-semantic handle to a tensor node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(const Shape& shape);
  // Uninitialized storage; callers must overwrite every element.
  static Tensor uninit(const Shape& shape);
  static Tensor full(const Shape& shape, double v);
  static Tensor from(const Shape& shape, const std::vector<double>& values);
  // Leaf with requires_grad set; gradients accumulate here during backward.
  static Tensor param(const std::string& name, const Shape& shape,
                      const std::vector<double>& values);

  bool defined() const { return static_cast<bool>(n_); }
  const Shape& shape() const { return n_->shape; }
  int64_t size() const { return static_cast<int64_t>(n_->values.size()); }
  int64_t dim(size_t i) const { return n_->shape[i]; }
  Dtype dtype() const { return n_->values.dtype(); }
  const std::string& name() const { return n_->name; }
  bool requires_grad() const { return n_->requires_grad; }
  bool needs_grad() const { return n_->needs_grad; }

  double value(int64_t i) const { return n_->values.get(static_cast<size_t>(i)); }
  double item() const {
    SRAY_CHECK(size() == 1, "item() requires a scalar tensor");
    return value(0);
  }
  std::vector<double> to_doubles() const;
  // Overwrites values in place (parameter loading, test hooks).
  void set_values(const std::vector<double>& values);

  bool has_grad() const { return static_cast<bool>(n_->grad); }
  double grad_value(int64_t i) const { return n_->grad->get(static_cast<size_t>(i)); }
  std::vector<double> grad_doubles() const;
  void zero_grad();

  Node* node() const { return n_.get(); }
  std::shared_ptr<Node> node_ptr() const { return n_; }

  explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

 private:
  std::shared_ptr<Node> n_;
};

// Throws NumericError if any value is non-finite.
void check_finite(const Tensor& t, const char* op_name);

}  // namespace sray::diff
