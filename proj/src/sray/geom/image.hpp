// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sray/core/check.hpp"

namespace sray::geom {

// Row-major RGB image with values in [0, 1].
struct Image {
  int width = 0, height = 0;
  std::vector<float> rgb;  // height * width * 3

  static Image filled(int w, int h, float r, float g, float b) {
    Image im;
    im.width = w;
    im.height = h;
    im.rgb.resize(static_cast<size_t>(w) * h * 3);
    for (size_t i = 0; i < im.rgb.size(); i += 3) {
      im.rgb[i] = r;
      im.rgb[i + 1] = g;
      im.rgb[i + 2] = b;
    }
    return im;
  }

  float* texel(int x, int y) { return &rgb[(static_cast<size_t>(y) * width + x) * 3]; }
  const float* texel(int x, int y) const {
    return &rgb[(static_cast<size_t>(y) * width + x) * 3];
  }
  Eigen::Vector3d at(int x, int y) const {
    const float* t = texel(x, y);
    return {t[0], t[1], t[2]};
  }
  void set(int x, int y, const Eigen::Vector3d& c) {
    float* t = texel(x, y);
    t[0] = static_cast<float>(c.x());
    t[1] = static_cast<float>(c.y());
    t[2] = static_cast<float>(c.z());
  }
};

// Bilinear fetch between texel centers (texel (i,j) sits at (i+0.5, j+0.5)),
// clamp-to-edge inside the image rectangle, (0,0,0) when fully outside.
Eigen::Vector3d sample_color(const Image& image, double px, double py);

double mse(const Image& a, const Image& b);

}  // namespace sray::geom
