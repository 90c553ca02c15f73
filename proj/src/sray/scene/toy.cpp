// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/scene/toy.hpp"

#include <cmath>
#include <filesystem>

#include "sray/scene/depth_io.hpp"
#include "sray/scene/png_io.hpp"

namespace sray::scene {

namespace fs = std::filesystem;

namespace {
double checker(double u, double v, double scale) {
  const int a = static_cast<int>(std::floor(u * scale));
  const int b = static_cast<int>(std::floor(v * scale));
  return ((a + b) & 1) ? 1.0 : 0.0;
}
}  // namespace

Eigen::Vector3d ToyModel::quad_texture(int texture, double u, double v) const {
  const double p = tex_phase;
  switch (texture) {
    case 0: {  // coarse checker, warm colors
      const double c = checker(u + p, v, 2.5);
      return c * Eigen::Vector3d(0.95, 0.35, 0.15) + (1 - c) * Eigen::Vector3d(0.95, 0.85, 0.25);
    }
    case 1: {  // stripes over a vertical gradient
      const double s = 0.5 + 0.5 * std::sin(2.0 * M_PI * (u * 1.8 + p));
      const double g = std::clamp(0.25 + 0.7 * v, 0.0, 1.0);
      return {0.15 + 0.6 * s, 0.75 * g, 0.85 - 0.5 * s};
    }
    default: {  // fine checker over rings, cool colors
      const double r = std::sqrt(u * u + v * v);
      const double ring = 0.5 + 0.5 * std::cos(2.0 * M_PI * (r * 1.2 + p));
      const double c = checker(u, v + p, 4.0);
      return {0.2 * c + 0.1, 0.35 + 0.45 * ring, 0.45 + 0.45 * c * ring};
    }
  }
}

ToyModel::Hit ToyModel::trace(const geom::Ray& ray) const {
  Hit best;
  if (kind == ToyKind::quads) {
    for (const Quad& q : quads) {
      if (std::abs(ray.dir.z()) < 1e-12) continue;
      const double t = (q.z - ray.origin.z()) / ray.dir.z();
      if (t <= 0 || (best.hit && t >= best.t)) continue;
      const Eigen::Vector3d p = ray.origin + t * ray.dir;
      if (p.x() < q.x0 || p.x() > q.x1 || p.y() < q.y0 || p.y() > q.y1) continue;
      // Texture coordinates normalized to the quad extent.
      const double u = (p.x() - q.x0) / (q.x1 - q.x0);
      const double v = (p.y() - q.y0) / (q.y1 - q.y0);
      best.hit = true;
      best.t = t;
      best.color = quad_texture(q.texture, u, v);
    }
    return best;
  }
  // Sphere: nearest positive root of |o + t d - c|^2 = r^2.
  const Eigen::Vector3d oc = ray.origin - sphere_center;
  const double b = 2.0 * oc.dot(ray.dir);
  const double c = oc.squaredNorm() - sphere_radius * sphere_radius;
  const double disc = b * b - 4.0 * c;
  if (disc < 0) return best;
  const double t = (-b - std::sqrt(disc)) * 0.5;
  if (t <= 0) return best;
  best.hit = true;
  best.t = t;
  const Eigen::Vector3d n = (ray.origin + t * ray.dir - sphere_center).normalized();
  const double lat = std::asin(std::clamp(n.y(), -1.0, 1.0));
  const double lon = std::atan2(n.x(), n.z());
  const double bands = 0.5 + 0.5 * std::sin(6.0 * lat + tex_phase);
  const double cells = checker(lon / M_PI * 3.0 + tex_phase, lat / M_PI * 4.0, 2.0);
  best.color = Eigen::Vector3d(0.25 + 0.65 * bands, 0.3 + 0.4 * cells, 0.85 - 0.55 * bands);
  return best;
}

ToyModel make_toy_model(ToyKind kind, uint64_t seed) {
  Rng rng(seed, /*stream=*/17);
  ToyModel m;
  m.kind = kind;
  m.tex_phase = rng.uniform(0.0, 1.0);
  if (kind == ToyKind::quads) {
    // Three quads at well-separated depths with empty space between: a small
    // front card, a mid card, and a backdrop that covers the whole view.
    m.quads.push_back({2.6 + rng.uniform(-0.05, 0.05), -1.45, -0.15, -0.95, 0.75, 0});
    m.quads.push_back({3.8 + rng.uniform(-0.05, 0.05), 0.10, 1.75, -1.25, 1.20, 1});
    m.quads.push_back({5.2 + rng.uniform(-0.05, 0.05), -3.0, 3.0, -3.0, 3.0, 2});
  } else {
    m.sphere_center = Eigen::Vector3d(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 3.8);
    m.sphere_radius = 1.2;
  }
  return m;
}

std::vector<geom::Camera> make_toy_cameras(int n_views, int resolution, uint64_t seed,
                                           double t_near, double t_far) {
  SRAY_CHECK(n_views >= 5, "toy scenes need at least 5 views");
  Rng rng(seed, /*stream=*/23);
  std::vector<geom::Camera> cams;
  const Eigen::Vector3d target(0.0, 0.0, 4.0);
  for (int i = 0; i < n_views; ++i) {
    const double s = n_views == 1 ? 0.5 : static_cast<double>(i) / (n_views - 1);
    const double phi = (s - 0.5) * 1.05 + rng.uniform(-0.02, 0.02);
    const Eigen::Vector3d center(1.05 * std::sin(phi), 0.45 * std::sin(2.1 * phi + 0.4),
                                 0.25 * (1.0 - std::cos(phi)) + rng.uniform(-0.02, 0.02));
    geom::Camera cam;
    cam.width = cam.height = resolution;
    cam.fx = cam.fy = resolution;  // ~53 degree field of view
    cam.cx = cam.cy = resolution / 2.0;
    cam.t_near = t_near;
    cam.t_far = t_far;
    cam.cam2world = geom::look_at(center, target);
    cam.validate();
    cams.push_back(cam);
  }
  return cams;
}

Scene make_toy_scene(const ToyOptions& opts, const std::string& out_dir) {
  SRAY_CHECK(opts.n_views >= 5, "toy scenes need at least 5 views");
  SRAY_CHECK(opts.resolution >= 8, "toy scenes need at least 8x8 images");
  fs::create_directories(out_dir);

  const ToyModel model = make_toy_model(opts.kind, opts.seed);
  const auto cams = make_toy_cameras(opts.n_views, opts.resolution, opts.seed, kToyNear, kToyFar);

  Scene scene;
  scene.dir = out_dir;
  scene.t_near = kToyNear;
  scene.t_far = kToyFar;
  for (int vi = 0; vi < opts.n_views; ++vi) {
    View v;
    v.camera = cams[static_cast<size_t>(vi)];
    char name[32];
    std::snprintf(name, sizeof(name), "view_%03d.png", vi);
    v.image_file = name;
    v.image.width = v.image.height = opts.resolution;
    v.image.rgb.resize(static_cast<size_t>(opts.resolution) * opts.resolution * 3);
    DepthMap depth;
    depth.width = depth.height = opts.resolution;
    depth.depth.assign(static_cast<size_t>(opts.resolution) * opts.resolution, 0.0f);
    for (int y = 0; y < opts.resolution; ++y)
      for (int x = 0; x < opts.resolution; ++x) {
        const geom::Ray ray = geom::pixel_ray(v.camera, x + 0.5, y + 0.5);
        const ToyModel::Hit hit = model.trace(ray);
        v.image.set(x, y, hit.hit ? hit.color : Eigen::Vector3d::Zero());
        depth.depth[static_cast<size_t>(y) * opts.resolution + x] =
            hit.hit ? static_cast<float>(hit.t) : 0.0f;
      }
    write_png((fs::path(out_dir) / v.image_file).string(), v.image);
    std::snprintf(name, sizeof(name), "view_%03d.depth", vi);
    write_depth((fs::path(out_dir) / name).string(), depth);
    scene.views.push_back(std::move(v));
  }
  save_manifest(scene, (fs::path(out_dir) / "scene.json").string());
  // Reload so pixel values round-trip through the 8-bit files exactly like a
  // consumer would see them.
  return load_scene((fs::path(out_dir) / "scene.json").string());
}

}  // namespace sray::scene
