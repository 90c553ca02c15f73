// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>

#include "sray/nn/mlp.hpp"

namespace sray::shader {

struct ShaderConfig {
  int layers = 8;
  int width = 256;
  int l_pos = 10;  // positional frequencies for points
  int l_dir = 4;   // positional frequencies for view directions
  int skip_at = 4; // input re-concatenation layer

  void validate() const {
    SRAY_CHECK(layers >= 1 && width >= 1, "shader: bad layer/width");
    SRAY_CHECK(l_pos >= 0 && l_dir >= 0, "shader: frequencies must be >= 0");
  }
  int pos_dim() const { return 3 + 6 * l_pos; }
  int dir_dim() const { return 3 + 6 * l_dir; }
};

// Radiance-field MLP: positional encoding, backbone with a skip connection,
// density head before direction injection (so densities cannot depend on the
// view direction), color head after it.
class ShaderNet {
 public:
  ShaderNet(const ShaderConfig& cfg, diff::ParamStore& store, Rng& rng,
            const std::string& prefix = "shader");

  struct Out {
    diff::Tensor colors;     // [P, 3] in (0, 1)
    diff::Tensor densities;  // [P] >= 0 (softplus)
  };
  // points, dirs: [P, 3]; dirs must be unit-norm.
  Out query(const diff::Tensor& points, const diff::Tensor& dirs) const;

  // [v, sin(2^0 pi v), cos(2^0 pi v), ..., sin(2^{L-1} pi v), cos(...)].
  static diff::Tensor posenc(const diff::Tensor& v, int l);

  const ShaderConfig& config() const { return cfg_; }

  // Global forward-pass counter, one tick per queried point. The sparse /
  // dense query ratio reported by the renderer comes from here.
  static int64_t query_count();
  static void reset_query_count();

 private:
  ShaderConfig cfg_;
  nn::Mlp backbone_;
  nn::Linear sigma_head_;
  nn::Linear bottleneck_;
  nn::Linear dir_layer_;
  nn::Linear rgb_head_;
};

}  // namespace sray::shader
