// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "sray/core/check.hpp"

namespace sray::scene {

// Raw 32-bit float depth map, little-endian, 16-byte header:
// magic 'SRDP' (u32) | width (u32) | height (u32) | reserved (u32).
struct DepthMap {
  int width = 0, height = 0;
  std::vector<float> depth;  // row-major; 0 where the ray hit nothing
};

void write_depth(const std::string& path, const DepthMap& map);
DepthMap read_depth(const std::string& path);

}  // namespace sray::scene
