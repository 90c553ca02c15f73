// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/geom/projection.hpp"

namespace sray::geom {

ProjectionBundle color_to_ray(const Ray& ray, const std::vector<double>& distances,
                              const std::vector<NeighborView>& neighbors) {
  SRAY_CHECK(!neighbors.empty(), "color_to_ray needs at least one neighbor view");
  for (size_t i = 1; i < distances.size(); ++i)
    SRAY_CHECK(distances[i] >= distances[i - 1], "distances must be sorted ascending");

  ProjectionBundle bundle;
  bundle.n_samples = static_cast<int>(distances.size());
  bundle.n_neighbors = static_cast<int>(neighbors.size());
  bundle.colors.assign(static_cast<size_t>(bundle.n_samples) * bundle.n_neighbors * 3, 0.0f);
  bundle.validity.assign(static_cast<size_t>(bundle.n_samples) * bundle.n_neighbors, 0);

  for (int i = 0; i < bundle.n_samples; ++i) {
    const Eigen::Vector3d p = ray.origin + distances[static_cast<size_t>(i)] * ray.dir;
    for (int k = 0; k < bundle.n_neighbors; ++k) {
      const PixelProjection proj = project_point(*neighbors[static_cast<size_t>(k)].camera, p);
      if (!proj.valid) continue;
      const Eigen::Vector3d c =
          sample_color(*neighbors[static_cast<size_t>(k)].image, proj.px, proj.py);
      float* dst = &bundle.colors[(static_cast<size_t>(i) * bundle.n_neighbors + k) * 3];
      dst[0] = static_cast<float>(c.x());
      dst[1] = static_cast<float>(c.y());
      dst[2] = static_cast<float>(c.z());
      bundle.validity[static_cast<size_t>(i) * bundle.n_neighbors + k] = 1;
    }
  }
  return bundle;
}

}  // namespace sray::geom
