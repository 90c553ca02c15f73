// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/diff/adam.hpp"

#include <cmath>

namespace sray::diff {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  for (const Tensor& p : params_) {
    SRAY_CHECK(p.requires_grad(), "Adam parameters must require gradients");
    m_.emplace_back(static_cast<size_t>(p.size()), 0.0);
    v_.emplace_back(static_cast<size_t>(p.size()), 0.0);
  }
}

void Adam::step(double lr) {
  for (const Tensor& p : params_)
    SRAY_CHECK(p.has_grad(), "missing gradient for parameter " + p.name());
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = params_[pi];
    Node* n = p.node();
    std::vector<double>& m = m_[pi];
    std::vector<double>& v = v_[pi];
    for (size_t i = 0; i < m.size(); ++i) {
      const double g = n->grad->get(i);
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      n->values.set(i, n->values.get(i) - lr * mhat / (std::sqrt(vhat) + cfg_.eps));
    }
    n->grad->fill(0.0);
  }
}

void Adam::restore(int64_t step_count, const std::vector<std::vector<double>>& m,
                   const std::vector<std::vector<double>>& v) {
  SRAY_CHECK(m.size() == m_.size() && v.size() == v_.size(), "optimizer state size mismatch");
  for (size_t i = 0; i < m.size(); ++i) {
    SRAY_CHECK(m[i].size() == m_[i].size() && v[i].size() == v_[i].size(),
               "optimizer moment shape mismatch");
  }
  t_ = step_count;
  m_ = m;
  v_ = v;
}

}  // namespace sray::diff
