// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/scene/scene.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sray/scene/png_io.hpp"

namespace sray::scene {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> Scene::train_indices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(views.size()); ++i)
    if (i % 8 != 0) out.push_back(i);
  return out;
}

std::vector<int> Scene::heldout_indices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(views.size()); ++i)
    if (i % 8 == 0) out.push_back(i);
  return out;
}

Scene load_scene(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw ValidationError("missing manifest: " + manifest_path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed manifest JSON: ") + e.what());
  }

  if (doc.value("format", "") != "sparseray-scene-v1")
    throw ValidationError("unknown manifest format in " + manifest_path);

  Scene scene;
  scene.dir = fs::path(manifest_path).parent_path().string();
  scene.t_near = doc.at("near").get<double>();
  scene.t_far = doc.at("far").get<double>();
  if (!(scene.t_near > 0 && scene.t_near < scene.t_far))
    throw ValidationError("manifest: need 0 < near < far");

  for (const json& jv : doc.at("views")) {
    View v;
    v.image_file = jv.at("image").get<std::string>();
    geom::Camera& cam = v.camera;
    cam.fx = jv.at("fx").get<double>();
    cam.fy = jv.at("fy").get<double>();
    cam.cx = jv.at("cx").get<double>();
    cam.cy = jv.at("cy").get<double>();
    cam.width = jv.at("width").get<int>();
    cam.height = jv.at("height").get<int>();
    cam.t_near = scene.t_near;
    cam.t_far = scene.t_far;
    const auto m = jv.at("cam2world").get<std::vector<double>>();
    if (m.size() != 16) throw ValidationError("manifest: cam2world must have 16 entries");
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) cam.cam2world(r, c) = m[static_cast<size_t>(r) * 4 + c];
    cam.validate();

    const fs::path img_path = fs::path(scene.dir) / v.image_file;
    v.image = read_png(img_path.string());
    if (v.image.width != cam.width || v.image.height != cam.height)
      throw ValidationError("resolution mismatch between manifest and image: " + v.image_file);
    scene.views.push_back(std::move(v));
  }
  if (scene.views.empty()) throw ValidationError("manifest lists no views");

  const int w = scene.views[0].camera.width;
  const int h = scene.views[0].camera.height;
  for (const View& v : scene.views)
    if (v.camera.width != w || v.camera.height != h)
      throw ValidationError("resolution mismatch across views: " + v.image_file);
  return scene;
}

void save_manifest(const Scene& scene, const std::string& manifest_path) {
  json doc;
  doc["format"] = "sparseray-scene-v1";
  doc["near"] = scene.t_near;
  doc["far"] = scene.t_far;
  doc["views"] = json::array();
  for (const View& v : scene.views) {
    json jv;
    jv["image"] = v.image_file;
    jv["fx"] = v.camera.fx;
    jv["fy"] = v.camera.fy;
    jv["cx"] = v.camera.cx;
    jv["cy"] = v.camera.cy;
    jv["width"] = v.camera.width;
    jv["height"] = v.camera.height;
    std::vector<double> m(16);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m[static_cast<size_t>(r) * 4 + c] = v.camera.cam2world(r, c);
    jv["cam2world"] = m;
    doc["views"].push_back(std::move(jv));
  }
  std::ofstream f(manifest_path, std::ios::trunc);
  if (!f) throw ValidationError("cannot write manifest: " + manifest_path);
  f << doc.dump(2) << "\n";
}

}  // namespace sray::scene
