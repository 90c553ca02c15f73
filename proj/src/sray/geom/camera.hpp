// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "sray/core/check.hpp"

namespace sray::geom {

// Conventions, used everywhere:
//   * +z is the camera-forward axis.
//   * Continuous pixel coordinates place the center of integer texel (i, j)
//     at (i + 0.5, j + 0.5); rendering integer pixel (i, j) casts through
//     (i + 0.5, j + 0.5). project_point is the exact inverse of pixel_ray.
struct Camera {
  double fx = 0, fy = 0, cx = 0, cy = 0;  // pixels
  int width = 0, height = 0;              // pixels
  Eigen::Matrix4d cam2world = Eigen::Matrix4d::Identity();
  double t_near = 0, t_far = 0;  // scene units

  // Throws ValidationError on a non-orthonormal rotation, flipped handedness,
  // bad bounds, or out-of-frame principal point.
  void validate() const;

  Eigen::Vector3d center() const { return cam2world.block<3, 1>(0, 3); }
  Eigen::Matrix3d rotation() const { return cam2world.block<3, 3>(0, 0); }
};

struct Ray {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d dir = Eigen::Vector3d::UnitZ();  // unit norm
};

// Ray through continuous pixel coordinates (px, py); direction normalized,
// origin at the camera center in world coordinates.
Ray pixel_ray(const Camera& cam, double px, double py);

struct PixelProjection {
  double px = 0, py = 0;
  bool valid = false;  // depth > 0 and inside the image rectangle
};

PixelProjection project_point(const Camera& cam, const Eigen::Vector3d& p);

// Right-handed cam2world with +z looking from `center` toward `target`.
Eigen::Matrix4d look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up = Eigen::Vector3d(0, 1, 0));

}  // namespace sray::geom
