// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sray/diff/tensor.hpp"

namespace sray::diff {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter set. Moments are kept in 64-bit
// regardless of the tensor dtype; the step counter is shared across all
// parameters of this instance. step() zeroes the gradients it consumed.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig cfg = {});

  void step(double lr);
  int64_t step_count() const { return t_; }

  const std::vector<Tensor>& params() const { return params_; }

  // Checkpoint access: moments per parameter, in parameter order.
  const std::vector<std::vector<double>>& m() const { return m_; }
  const std::vector<std::vector<double>>& v() const { return v_; }
  void restore(int64_t step_count, const std::vector<std::vector<double>>& m,
               const std::vector<std::vector<double>>& v);

 private:
  std::vector<Tensor> params_;
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace sray::diff
