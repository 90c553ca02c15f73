// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/scene/refpool.hpp"

#include <algorithm>
#include <limits>

namespace sray::scene {

namespace {
double center_dist(const Scene& scene, int a, int b) {
  return (scene.views[static_cast<size_t>(a)].camera.center() -
          scene.views[static_cast<size_t>(b)].camera.center())
      .norm();
}
}  // namespace

ReferencePool select_reference_pool(const Scene& scene, int n_t) {
  const std::vector<int> train = scene.train_indices();
  SRAY_CHECK(n_t >= 1 && n_t <= static_cast<int>(train.size()),
             "reference pool size must fit the training split");

  // Anchor: the view nearest the camera centroid. Selection then repeatedly
  // takes the candidate farthest from everything chosen so far (anchor
  // included), so n_t = 2 on a rail yields the two endpoint-most cameras.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (int i : train) centroid += scene.views[static_cast<size_t>(i)].camera.center();
  centroid /= static_cast<double>(train.size());
  int anchor = train[0];
  double best = std::numeric_limits<double>::infinity();
  for (int i : train) {
    const double d = (scene.views[static_cast<size_t>(i)].camera.center() - centroid).norm();
    if (d < best) {
      best = d;
      anchor = i;
    }
  }

  std::vector<int> picked;
  while (static_cast<int>(picked.size()) < n_t) {
    int arg = -1;
    double far = -1.0;
    for (int i : train) {
      if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
      double near = center_dist(scene, i, anchor);
      for (int j : picked) near = std::min(near, center_dist(scene, i, j));
      if (near > far) {
        far = near;
        arg = i;
      }
    }
    picked.push_back(arg);
  }
  std::sort(picked.begin(), picked.end());
  return ReferencePool{picked};
}

std::vector<int> nearest_pool_views(const Scene& scene, const ReferencePool& pool,
                                    const Eigen::Vector3d& target_center, int n) {
  SRAY_CHECK(n >= 1 && n <= static_cast<int>(pool.indices.size()),
             "need at least n views in the reference pool");
  std::vector<std::pair<double, int>> by_dist;
  for (int i : pool.indices)
    by_dist.emplace_back(
        (scene.views[static_cast<size_t>(i)].camera.center() - target_center).norm(), i);
  std::stable_sort(by_dist.begin(), by_dist.end());
  std::vector<int> out;
  for (int k = 0; k < n; ++k) out.push_back(by_dist[static_cast<size_t>(k)].second);
  return out;
}

}  // namespace sray::scene
