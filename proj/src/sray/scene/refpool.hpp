// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sray/scene/scene.hpp"

namespace sray::scene {

// Fixed subset of training views used for projections at inference time.
struct ReferencePool {
  std::vector<int> indices;  // into scene.views, ascending
};

// Farthest-point selection on camera centers over the training split,
// starting from the view nearest the centroid. Deterministic; independent of
// manifest ordering up to index relabeling.
ReferencePool select_reference_pool(const Scene& scene, int n_t);

// The n nearest pool views to a target camera center, sorted near to far.
std::vector<int> nearest_pool_views(const Scene& scene, const ReferencePool& pool,
                                    const Eigen::Vector3d& target_center, int n);

}  // namespace sray::scene
