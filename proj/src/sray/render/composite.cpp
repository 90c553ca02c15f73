// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/render/composite.hpp"

namespace sray::render {

using diff::Tensor;

namespace {
void check_sorted(const Tensor& distances) {
  const int64_t rows = distances.size() / distances.shape().back();
  const int64_t n = distances.shape().back();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t i = 1; i < n; ++i)
      SRAY_CHECK(distances.value(r * n + i) >= distances.value(r * n + i - 1),
                 "distances must be sorted ascending");
}
}  // namespace

Tensor deltas(const Tensor& distances, double t_f) {
  SRAY_CHECK(distances.shape().size() == 2, "distances must be [B, N]");
  check_sorted(distances);
  const int64_t n = distances.dim(1);
  Tensor last = diff::affine(diff::slice_last(distances, n - 1, 1), -1.0, t_f);
  if (n == 1) return last;
  Tensor gaps =
      diff::sub(diff::slice_last(distances, 1, n - 1), diff::slice_last(distances, 0, n - 1));
  return diff::concat_last({gaps, last});
}

Tensor alphas(const Tensor& densities, const Tensor& distances, double t_f) {
  SRAY_CHECK(densities.shape() == distances.shape(), "densities must match distances");
  for (int64_t i = 0; i < densities.size(); ++i)
    SRAY_CHECK(densities.value(i) >= 0.0, "densities must be non-negative");
  Tensor d = deltas(distances, t_f);
  return diff::affine(diff::exp_op(diff::neg(diff::mul(densities, d))), -1.0, 1.0);
}

Composited compose(const Tensor& colors, const Tensor& alpha) {
  SRAY_CHECK(colors.shape().size() == 3 && colors.shape().back() == 3, "colors must be [B,N,3]");
  SRAY_CHECK(alpha.shape().size() == 2 && alpha.dim(0) == colors.dim(0) &&
                 alpha.dim(1) == colors.dim(1),
             "alphas must be [B,N]");
  for (int64_t i = 0; i < alpha.size(); ++i)
    SRAY_CHECK(alpha.value(i) >= 0.0 && alpha.value(i) <= 1.0, "alphas must lie in [0,1]");
  Composited out;
  out.partition = diff::alpha_partition(alpha);
  Tensor weights = diff::slice_last(out.partition, 0, alpha.dim(1));
  out.color = diff::sum_axis(diff::scale_rows(weights, colors), 1);
  return out;
}

Composited compose_pas(const Tensor& colors, const Tensor& densities, const Tensor& distances,
                       const Tensor& a_t, const Tensor& b_t, double t_f) {
  SRAY_CHECK(a_t.shape() == densities.shape() && b_t.shape() == densities.shape(),
             "opacity adjustments must match densities");
  for (int64_t i = 0; i < a_t.size(); ++i)
    SRAY_CHECK(a_t.value(i) > 0.0 && a_t.value(i) <= 1.0, "a_t must lie in (0,1]");
  Tensor d = deltas(distances, t_f);
  Tensor sigma_eff = diff::relu(diff::add(densities, b_t));
  Tensor alpha_hat =
      diff::mul(a_t, diff::affine(diff::exp_op(diff::neg(diff::mul(sigma_eff, d))), -1.0, 1.0));
  return compose(colors, alpha_hat);
}

CompositeResult compose1(const std::vector<Eigen::Vector3d>& colors,
                         const std::vector<double>& alpha) {
  SRAY_CHECK(colors.size() == alpha.size(), "colors and alphas must have equal length");
  CompositeResult out;
  double trans = 1.0;
  out.weights.resize(alpha.size());
  for (size_t i = 0; i < alpha.size(); ++i) {
    SRAY_CHECK(alpha[i] >= 0.0 && alpha[i] <= 1.0, "alphas must lie in [0,1]");
    out.weights[i] = alpha[i] * trans;
    out.color += out.weights[i] * colors[i];
    trans *= 1.0 - alpha[i];
  }
  out.transmittance = trans;
  return out;
}

}  // namespace sray::render
