// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/geom/plucker.hpp"

namespace sray::geom {

std::vector<double> plucker_anchor_distances(double t_n, double t_f, int n_pr) {
  SRAY_CHECK(t_n < t_f, "need t_n < t_f");
  SRAY_CHECK(n_pr >= 1, "need at least one encoding point");
  std::vector<double> t(static_cast<size_t>(n_pr));
  if (n_pr == 1) {
    t[0] = 0.5 * (t_n + t_f);
    return t;
  }
  const double step = (t_f - t_n) / static_cast<double>(n_pr - 1);
  for (int i = 0; i < n_pr; ++i) t[static_cast<size_t>(i)] = t_n + step * i;
  t.back() = t_f;
  return t;
}

std::vector<double> encode_plucker(const Ray& ray, const std::vector<double>& distances) {
  const size_t n = distances.size();
  SRAY_CHECK(n >= 1, "need at least one encoding point");
  std::vector<double> out;
  out.reserve(3 + 6 * n);
  const Eigen::Vector3d& d = ray.dir;
  out.insert(out.end(), {d.x(), d.y(), d.z()});
  for (double t : distances) {
    const Eigen::Vector3d p = ray.origin + t * d;
    out.insert(out.end(), {p.x(), p.y(), p.z()});
  }
  for (double t : distances) {
    const Eigen::Vector3d c = (ray.origin + t * d).cross(d);
    out.insert(out.end(), {c.x(), c.y(), c.z()});
  }
  return out;
}

std::vector<double> encode_plucker(const Ray& ray, double t_n, double t_f, int n_pr) {
  return encode_plucker(ray, plucker_anchor_distances(t_n, t_f, n_pr));
}

}  // namespace sray::geom
