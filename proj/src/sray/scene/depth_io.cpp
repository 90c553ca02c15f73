// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/scene/depth_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace sray::scene {

namespace {
constexpr uint32_t kMagic = 0x50445253;  // 'SRDP' little-endian
}

void write_depth(const std::string& path, const DepthMap& map) {
  SRAY_CHECK(map.depth.size() == static_cast<size_t>(map.width) * map.height,
             "depth buffer size mismatch");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot open depth map for writing: " + path);
  const uint32_t header[4] = {kMagic, static_cast<uint32_t>(map.width),
                              static_cast<uint32_t>(map.height), 0};
  f.write(reinterpret_cast<const char*>(header), 16);
  f.write(reinterpret_cast<const char*>(map.depth.data()),
          static_cast<std::streamsize>(map.depth.size() * 4));
  if (!f) throw ValidationError("depth map write failed: " + path);
}

DepthMap read_depth(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("missing depth map: " + path);
  uint32_t header[4];
  f.read(reinterpret_cast<char*>(header), 16);
  if (!f || header[0] != kMagic) throw ValidationError("bad depth map header: " + path);
  DepthMap map;
  map.width = static_cast<int>(header[1]);
  map.height = static_cast<int>(header[2]);
  map.depth.resize(static_cast<size_t>(map.width) * map.height);
  f.read(reinterpret_cast<char*>(map.depth.data()),
         static_cast<std::streamsize>(map.depth.size() * 4));
  if (!f) throw ValidationError("truncated depth map: " + path);
  return map;
}

}  // namespace sray::scene
