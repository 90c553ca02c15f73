// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "sray/core/rng.hpp"
#include "sray/diff/tensor.hpp"

namespace sray::diff {

// Insertion-ordered map of named parameter tensors.
class ParamStore {
 public:
  Tensor create(const std::string& name, const Shape& shape, const std::vector<double>& values);
  // Glorot-uniform init in +-sqrt(6/(fan_in+fan_out)).
  Tensor create_glorot(const std::string& name, int64_t fan_in, int64_t fan_out, Rng& rng);
  // Zero-initialized bias vector.
  Tensor create_zeros(const std::string& name, const Shape& shape);

  bool has(const std::string& name) const;
  Tensor get(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::vector<Tensor> all() const { return tensors_; }
  // Parameters whose name starts with the given prefix, in insertion order.
  std::vector<Tensor> with_prefix(const std::string& prefix) const;

  int64_t total_size() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

}  // namespace sray::diff
