// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "sray/geom/camera.hpp"
#include "sray/geom/image.hpp"

namespace sray::scene {

struct View {
  geom::Camera camera;
  std::string image_file;  // relative to the manifest directory
  geom::Image image;
};

// A calibrated multi-view capture. Every 8th view (starting at index 0) is
// held out for evaluation; the rest are the training pool.
struct Scene {
  std::vector<View> views;
  double t_near = 0, t_far = 0;
  std::string dir;  // manifest directory

  std::vector<int> train_indices() const;
  std::vector<int> heldout_indices() const;
  int width() const { return views.empty() ? 0 : views[0].camera.width; }
  int height() const { return views.empty() ? 0 : views[0].camera.height; }
};

// Reads a JSON manifest, decodes all images, validates cameras and image
// resolutions. Missing files, bad matrices and resolution mismatches raise
// distinct ValidationError messages.
Scene load_scene(const std::string& manifest_path);

// Writes the manifest next to the (already existing) image files.
void save_manifest(const Scene& scene, const std::string& manifest_path);

}  // namespace sray::scene
