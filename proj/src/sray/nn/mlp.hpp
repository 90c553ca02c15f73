// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "sray/diff/ops.hpp"
#include "sray/diff/paramstore.hpp"

namespace sray::nn {

struct Linear {
  diff::Tensor w, b;

  static Linear create(diff::ParamStore& store, const std::string& prefix, int64_t in,
                       int64_t out, Rng& rng) {
    Linear l;
    l.w = store.create_glorot(prefix + ".w", in, out, rng);
    l.b = store.create_zeros(prefix + ".b", {out});
    return l;
  }

  diff::Tensor operator()(const diff::Tensor& x) const { return diff::linear(x, w, b); }
};

// Stack of fully-connected layers with ELU after each. skip_at re-concatenates
// the network input in front of that layer (NeRF-style skip). Returns the last
// hidden activation; output projections belong to the caller.
class Mlp {
 public:
  Mlp() = default;
  Mlp(diff::ParamStore& store, const std::string& prefix, int input_dim, int width,
      int n_layers, int skip_at, Rng& rng) : skip_at_(skip_at) {
    SRAY_CHECK(n_layers >= 1, "mlp needs at least one layer");
    int in = input_dim;
    for (int i = 0; i < n_layers; ++i) {
      if (i == skip_at_ && i > 0) in += input_dim;
      layers_.push_back(Linear::create(store, prefix + ".l" + std::to_string(i), in, width, rng));
      in = width;
    }
  }

  diff::Tensor forward(const diff::Tensor& x) const {
    diff::Tensor h = x;
    for (size_t i = 0; i < layers_.size(); ++i) {
      diff::Tensor in = (static_cast<int>(i) == skip_at_ && i > 0) ? diff::concat_last({h, x}) : h;
      h = diff::elu(layers_[i](in));
    }
    return h;
  }

  int n_layers() const { return static_cast<int>(layers_.size()); }
  const Linear& layer(size_t i) const { return layers_[i]; }

 private:
  std::vector<Linear> layers_;
  int skip_at_ = -1;
};

}  // namespace sray::nn
