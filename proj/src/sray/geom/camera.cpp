// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/geom/camera.hpp"

namespace sray::geom {

void Camera::validate() const {
  if (width <= 0 || height <= 0) throw ValidationError("camera: non-positive image size");
  if (!(fx > 0) || !(fy > 0)) throw ValidationError("camera: focal lengths must be positive");
  if (!(cx >= 0 && cx < width && cy >= 0 && cy < height))
    throw ValidationError("camera: principal point outside the image");
  if (!(t_near > 0 && t_near < t_far)) throw ValidationError("camera: need 0 < near < far");
  const Eigen::Matrix3d r = rotation();
  const Eigen::Matrix3d err = r * r.transpose() - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-6)
    throw ValidationError("camera: rotation not orthonormal");
  if (r.determinant() < 0) throw ValidationError("camera: rotation is reflected (det < 0)");
  const Eigen::RowVector4d bottom = cam2world.row(3);
  if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("camera: bottom row of cam2world must be (0,0,0,1)");
}

Ray pixel_ray(const Camera& cam, double px, double py) {
  const Eigen::Vector3d dir_cam((px - cam.cx) / cam.fx, (py - cam.cy) / cam.fy, 1.0);
  Ray ray;
  ray.origin = cam.center();
  ray.dir = (cam.rotation() * dir_cam).normalized();
  return ray;
}

PixelProjection project_point(const Camera& cam, const Eigen::Vector3d& p) {
  const Eigen::Vector3d pc = cam.rotation().transpose() * (p - cam.center());
  PixelProjection out;
  if (pc.z() <= 0) return out;  // behind the camera
  out.px = cam.fx * pc.x() / pc.z() + cam.cx;
  out.py = cam.fy * pc.y() / pc.z() + cam.cy;
  out.valid = out.px >= 0 && out.px <= cam.width && out.py >= 0 && out.py <= cam.height;
  return out;
}

Eigen::Matrix4d look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up) {
  const Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d x = z.cross(-up);
  if (x.norm() < 1e-9) x = z.cross(Eigen::Vector3d(0, 0, 1));  // looking along up
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 1>(0, 0) = x;
  m.block<3, 1>(0, 1) = y;
  m.block<3, 1>(0, 2) = z;
  m.block<3, 1>(0, 3) = center;
  return m;
}

}  // namespace sray::geom
