// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sray/geom/camera.hpp"
#include "sray/geom/image.hpp"

namespace sray::geom {

struct NeighborView {
  const Camera* camera = nullptr;
  const Image* image = nullptr;
};

// Per-sample, per-neighbor color-to-ray projections. Invalid projections
// (behind the camera or outside the frame) carry color (0,0,0) and a false
// validity flag; the sampler is fed the flag as an input feature.
struct ProjectionBundle {
  int n_samples = 0;
  int n_neighbors = 0;
  std::vector<float> colors;     // n_samples * n_neighbors * 3
  std::vector<uint8_t> validity; // n_samples * n_neighbors

  const float* color(int sample, int neighbor) const {
    return &colors[(static_cast<size_t>(sample) * n_neighbors + neighbor) * 3];
  }
  bool valid(int sample, int neighbor) const {
    return validity[static_cast<size_t>(sample) * n_neighbors + neighbor] != 0;
  }
};

// Projects r(t_i) into each neighbor view and bilinearly fetches the color.
// distances must be sorted ascending; an empty neighbor list is a contract
// violation.
ProjectionBundle color_to_ray(const Ray& ray, const std::vector<double>& distances,
                              const std::vector<NeighborView>& neighbors);

}  // namespace sray::geom
