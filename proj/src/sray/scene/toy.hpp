// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "sray/core/rng.hpp"
#include "sray/scene/scene.hpp"

namespace sray::scene {

enum class ToyKind { quads, sphere };

struct ToyOptions {
  ToyKind kind = ToyKind::quads;
  int n_views = 12;
  int resolution = 64;
  uint64_t seed = 0;
};

// Analytic scene model behind the generated ground truth; exposed so tests
// can verify pixels against ray-object intersections directly.
struct ToyModel {
  struct Quad {
    double z;                  // plane z = const, facing the cameras
    double x0, x1, y0, y1;     // extent in the plane
    int texture = 0;
  };

  ToyKind kind = ToyKind::quads;
  std::vector<Quad> quads;              // front to back
  Eigen::Vector3d sphere_center{0, 0, 0};
  double sphere_radius = 0;
  double tex_phase = 0;                 // seed-dependent texture offset

  struct Hit {
    bool hit = false;
    double t = 0;
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
  };
  // Nearest intersection; quads are opaque, background is black.
  Hit trace(const geom::Ray& ray) const;

  Eigen::Vector3d quad_texture(int texture, double u, double v) const;
};

ToyModel make_toy_model(ToyKind kind, uint64_t seed);

std::vector<geom::Camera> make_toy_cameras(int n_views, int resolution, uint64_t seed,
                                           double t_near, double t_far);

// Renders the analytic model into PNGs + depth maps + manifest under out_dir
// and returns the loaded scene. Identical options reproduce identical files.
Scene make_toy_scene(const ToyOptions& opts, const std::string& out_dir);

// Scene bounds used by the toy generator.
constexpr double kToyNear = 2.0;
constexpr double kToyFar = 6.0;

}  // namespace sray::scene
