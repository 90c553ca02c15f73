// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/shader/shader.hpp"

#include <cmath>

namespace sray::shader {

namespace {
std::atomic<int64_t> g_query_count{0};
constexpr double kPi = 3.14159265358979323846;
}  // namespace

int64_t ShaderNet::query_count() { return g_query_count.load(); }
void ShaderNet::reset_query_count() { g_query_count.store(0); }

ShaderNet::ShaderNet(const ShaderConfig& cfg, diff::ParamStore& store, Rng& rng,
                     const std::string& prefix)
    : cfg_(cfg) {
  cfg_.validate();
  backbone_ = nn::Mlp(store, prefix + ".backbone", cfg_.pos_dim(), cfg_.width, cfg_.layers,
                      cfg_.skip_at, rng);
  sigma_head_ = nn::Linear::create(store, prefix + ".sigma", cfg_.width, 1, rng);
  bottleneck_ = nn::Linear::create(store, prefix + ".bottleneck", cfg_.width, cfg_.width, rng);
  dir_layer_ = nn::Linear::create(store, prefix + ".dir", cfg_.width + cfg_.dir_dim(),
                                  std::max(1, cfg_.width / 2), rng);
  rgb_head_ = nn::Linear::create(store, prefix + ".rgb", std::max(1, cfg_.width / 2), 3, rng);
}

diff::Tensor ShaderNet::posenc(const diff::Tensor& v, int l) {
  std::vector<diff::Tensor> parts{v};
  double freq = kPi;
  for (int i = 0; i < l; ++i) {
    diff::Tensor scaled = diff::mul_scalar(v, freq);
    parts.push_back(diff::sin_op(scaled));
    parts.push_back(diff::cos_op(scaled));
    freq *= 2.0;
  }
  return parts.size() == 1 ? v : diff::concat_last(parts);
}

ShaderNet::Out ShaderNet::query(const diff::Tensor& points, const diff::Tensor& dirs) const {
  SRAY_CHECK(points.shape().size() == 2 && points.dim(1) == 3, "points must be [P,3]");
  SRAY_CHECK(dirs.shape() == points.shape(), "dirs must match points");
  const int64_t p_count = points.dim(0);
  for (int64_t r = 0; r < p_count; ++r) {
    const double n2 = dirs.value(r * 3) * dirs.value(r * 3) +
                      dirs.value(r * 3 + 1) * dirs.value(r * 3 + 1) +
                      dirs.value(r * 3 + 2) * dirs.value(r * 3 + 2);
    SRAY_CHECK(std::abs(n2 - 1.0) < 1e-3, "dirs must be unit-norm");
  }
  g_query_count.fetch_add(p_count);

  diff::Tensor x = posenc(points, cfg_.l_pos);
  diff::Tensor h = backbone_.forward(x);
  // Density leaves the network before any direction information enters.
  diff::Tensor density = diff::softplus(diff::reshape(sigma_head_(h), {p_count}));
  diff::Tensor bottleneck = bottleneck_(h);
  diff::Tensor d_enc = posenc(dirs, cfg_.l_dir);
  diff::Tensor hd = diff::elu(dir_layer_(diff::concat_last({bottleneck, d_enc})));
  diff::Tensor colors = diff::sigmoid(rgb_head_(hd));
  return {colors, density};
}

}  // namespace sray::shader
