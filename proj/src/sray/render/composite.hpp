// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "sray/diff/ops.hpp"

namespace sray::render {

// delta_i = t_{i+1} - t_i; the last sample uses t_f - t_N, assuming empty
// space beyond t_f.
diff::Tensor deltas(const diff::Tensor& distances, double t_f);

// alpha_i = 1 - exp(-sigma_i * delta_i); distances must be sorted ascending
// per ray and densities non-negative.
diff::Tensor alphas(const diff::Tensor& densities, const diff::Tensor& distances, double t_f);

struct Composited {
  diff::Tensor color;      // [B, 3]
  diff::Tensor partition;  // [B, N+1]: N compositing weights, then the final
                           // transmittance; rows sum to 1
};

// Plain alpha compositing of per-sample colors [B, N, 3] with alphas [B, N].
// Background is black, so residual transmittance contributes nothing.
Composited compose(const diff::Tensor& colors, const diff::Tensor& alpha);

// Sampler-guided variant: alpha_i = a_i * (1 - exp(-max(sigma_i + b_i, 0) *
// delta_i)). The clamp keeps effective densities non-negative so the
// partition stays valid; with a=1, b=0 this reduces bit-exactly to compose.
Composited compose_pas(const diff::Tensor& colors, const diff::Tensor& densities,
                       const diff::Tensor& distances, const diff::Tensor& a_t,
                       const diff::Tensor& b_t, double t_f);

// Per-ray plain-value view for tests and diagnostics.
struct CompositeResult {
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  std::vector<double> weights;
  double transmittance = 1.0;
};

CompositeResult compose1(const std::vector<Eigen::Vector3d>& colors,
                         const std::vector<double>& alpha);

}  // namespace sray::render
