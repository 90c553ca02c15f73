// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/geom/image.hpp"

#include <algorithm>
#include <cmath>

namespace sray::geom {

Eigen::Vector3d sample_color(const Image& image, double px, double py) {
  if (px < 0 || px > image.width || py < 0 || py > image.height) return {0, 0, 0};
  // Shift into texel-center space, then clamp to the edge texels.
  const double x = std::clamp(px - 0.5, 0.0, static_cast<double>(image.width - 1));
  const double y = std::clamp(py - 0.5, 0.0, static_cast<double>(image.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, image.width - 1);
  const int y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const Eigen::Vector3d c00 = image.at(x0, y0);
  const Eigen::Vector3d c10 = image.at(x1, y0);
  const Eigen::Vector3d c01 = image.at(x0, y1);
  const Eigen::Vector3d c11 = image.at(x1, y1);
  return (1 - fy) * ((1 - fx) * c00 + fx * c10) + fy * ((1 - fx) * c01 + fx * c11);
}

double mse(const Image& a, const Image& b) {
  SRAY_CHECK(a.width == b.width && a.height == b.height, "image shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = static_cast<double>(a.rgb[i]) - static_cast<double>(b.rgb[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.rgb.size());
}

}  // namespace sray::geom
