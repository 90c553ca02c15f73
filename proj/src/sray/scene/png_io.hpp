// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "sray/geom/image.hpp"

namespace sray::scene {

// 8-bit RGB PNG, values mapped linearly to [0,1] floats; no gamma handling
// (toy textures are authored in linear space). Grayscale/alpha inputs are
// expanded/stripped to RGB on read.
geom::Image read_png(const std::string& path);
void write_png(const std::string& path, const geom::Image& image);

}  // namespace sray::scene
