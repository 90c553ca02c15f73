// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/scene/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sray::scene {

double psnr(const geom::Image& a, const geom::Image& b) {
  const double m = geom::mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

namespace {

constexpr int kWin = 11;

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kWin);
  const double sigma = 1.5;
  double s = 0;
  for (int i = 0; i < kWin; ++i) {
    const double x = i - (kWin - 1) / 2.0;
    k[static_cast<size_t>(i)] = std::exp(-x * x / (2 * sigma * sigma));
    s += k[static_cast<size_t>(i)];
  }
  for (double& v : k) v /= s;
  return k;
}

// Separable valid-mode Gaussian filter of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h, int& ow,
                                 int& oh) {
  static const std::vector<double> k = gaussian_kernel();
  const int wv = w - kWin + 1;
  std::vector<double> tmp(static_cast<size_t>(wv) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < wv; ++x) {
      double acc = 0;
      for (int i = 0; i < kWin; ++i)
        acc += k[static_cast<size_t>(i)] * plane[static_cast<size_t>(y) * w + x + i];
      tmp[static_cast<size_t>(y) * wv + x] = acc;
    }
  const int hv = h - kWin + 1;
  std::vector<double> out(static_cast<size_t>(wv) * hv);
  for (int y = 0; y < hv; ++y)
    for (int x = 0; x < wv; ++x) {
      double acc = 0;
      for (int i = 0; i < kWin; ++i)
        acc += k[static_cast<size_t>(i)] * tmp[static_cast<size_t>(y + i) * wv + x];
      out[static_cast<size_t>(y) * wv + x] = acc;
    }
  ow = wv;
  oh = hv;
  return out;
}

}  // namespace

double ssim(const geom::Image& a, const geom::Image& b) {
  SRAY_CHECK(a.width == b.width && a.height == b.height, "image shape mismatch");
  SRAY_CHECK(a.width >= kWin && a.height >= kWin, "images too small for an 11x11 window");
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  const int w = a.width, h = a.height;
  const size_t n = static_cast<size_t>(w) * h;

  double total = 0;
  for (int ch = 0; ch < 3; ++ch) {
    std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
    for (size_t i = 0; i < n; ++i) {
      const double va = a.rgb[i * 3 + static_cast<size_t>(ch)];
      const double vb = b.rgb[i * 3 + static_cast<size_t>(ch)];
      pa[i] = va;
      pb[i] = vb;
      paa[i] = va * va;
      pbb[i] = vb * vb;
      pab[i] = va * vb;
    }
    int ow = 0, oh = 0;
    const auto mu_a = filter_valid(pa, w, h, ow, oh);
    const auto mu_b = filter_valid(pb, w, h, ow, oh);
    const auto raw_aa = filter_valid(paa, w, h, ow, oh);
    const auto raw_bb = filter_valid(pbb, w, h, ow, oh);
    const auto raw_ab = filter_valid(pab, w, h, ow, oh);
    double acc = 0;
    for (size_t i = 0; i < mu_a.size(); ++i) {
      const double va = raw_aa[i] - mu_a[i] * mu_a[i];
      const double vb = raw_bb[i] - mu_b[i] * mu_b[i];
      const double vab = raw_ab[i] - mu_a[i] * mu_b[i];
      acc += ((2 * mu_a[i] * mu_b[i] + c1) * (2 * vab + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    total += acc / static_cast<double>(mu_a.size());
  }
  return total / 3.0;
}

}  // namespace sray::scene
