// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/diff/paramstore.hpp"

#include <cmath>

namespace sray::diff {

Tensor ParamStore::create(const std::string& name, const Shape& shape,
                          const std::vector<double>& values) {
  SRAY_CHECK(!has(name), "duplicate parameter name: " + name);
  Tensor t = Tensor::param(name, shape, values);
  names_.push_back(name);
  tensors_.push_back(t);
  return t;
}

Tensor ParamStore::create_glorot(const std::string& name, int64_t fan_in, int64_t fan_out,
                                 Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(static_cast<size_t>(fan_in * fan_out));
  for (double& x : v) x = rng.uniform(-bound, bound);
  return create(name, {fan_in, fan_out}, v);
}

Tensor ParamStore::create_zeros(const std::string& name, const Shape& shape) {
  return create(name, shape, std::vector<double>(static_cast<size_t>(numel(shape)), 0.0));
}

bool ParamStore::has(const std::string& name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

Tensor ParamStore::get(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return tensors_[i];
  throw ContractViolation("unknown parameter: " + name);
}

std::vector<Tensor> ParamStore::with_prefix(const std::string& prefix) const {
  std::vector<Tensor> out;
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i].rfind(prefix, 0) == 0) out.push_back(tensors_[i]);
  return out;
}

int64_t ParamStore::total_size() const {
  int64_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

}  // namespace sray::diff
