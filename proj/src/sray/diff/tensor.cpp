// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/diff/tensor.hpp"

#include <cmath>
#include <sstream>

namespace sray::diff {

namespace {
Dtype g_default_dtype = Dtype::F32;
}

Dtype default_dtype() { return g_default_dtype; }
void set_default_dtype(Dtype dt) { g_default_dtype = dt; }

int64_t numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t e : s) {
    SRAY_CHECK(e > 0, "shape extents must be positive");
    n *= e;
  }
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

Tensor Tensor::zeros(const Shape& shape) {
  auto n = std::make_shared<Node>();
  n->shape = shape;
  n->values = Buffer(default_dtype(), static_cast<size_t>(numel(shape)));
  return Tensor(std::move(n));
}

Tensor Tensor::uninit(const Shape& shape) {
  auto n = std::make_shared<Node>();
  n->shape = shape;
  n->values = Buffer(default_dtype(), static_cast<size_t>(numel(shape)), /*zeroed=*/false);
  return Tensor(std::move(n));
}

Tensor Tensor::full(const Shape& shape, double v) {
  Tensor t = zeros(shape);
  t.n_->values.fill(v);
  return t;
}

Tensor Tensor::from(const Shape& shape, const std::vector<double>& values) {
  Tensor t = zeros(shape);
  SRAY_CHECK(static_cast<int64_t>(values.size()) == numel(shape),
             "value count must equal product of shape extents");
  for (size_t i = 0; i < values.size(); ++i) t.n_->values.set(i, values[i]);
  return t;
}

Tensor Tensor::param(const std::string& name, const Shape& shape,
                     const std::vector<double>& values) {
  Tensor t = from(shape, values);
  t.n_->requires_grad = true;
  t.n_->needs_grad = true;
  t.n_->name = name;
  return t;
}

std::vector<double> Tensor::to_doubles() const {
  std::vector<double> out(static_cast<size_t>(size()));
  for (size_t i = 0; i < out.size(); ++i) out[i] = n_->values.get(i);
  return out;
}

void Tensor::set_values(const std::vector<double>& values) {
  SRAY_CHECK(static_cast<int64_t>(values.size()) == size(), "size mismatch in set_values");
  for (size_t i = 0; i < values.size(); ++i) n_->values.set(i, values[i]);
}

std::vector<double> Tensor::grad_doubles() const {
  std::vector<double> out(static_cast<size_t>(size()), 0.0);
  if (n_->grad)
    for (size_t i = 0; i < out.size(); ++i) out[i] = n_->grad->get(i);
  return out;
}

void Tensor::zero_grad() {
  if (n_->grad) n_->grad->fill(0.0);
}

void check_finite(const Tensor& t, const char* op_name) {
  const Node* n = t.node();
  if (n->values.dtype() == Dtype::F32) {
    const float* p = n->values.f32();
    for (size_t i = 0; i < n->values.size(); ++i)
      if (!std::isfinite(p[i])) throw NumericError(std::string("non-finite value in ") + op_name);
  } else {
    const double* p = n->values.f64();
    for (size_t i = 0; i < n->values.size(); ++i)
      if (!std::isfinite(p[i])) throw NumericError(std::string("non-finite value in ") + op_name);
  }
}

}  // namespace sray::diff
