// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sray/geom/image.hpp"

namespace sray::scene {

// 10*log10(1/MSE) over [0,1] images; identical images report +infinity.
double psnr(const geom::Image& a, const geom::Image& b);

// Single-scale SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1. Window means are taken over the valid region (5-pixel
// border cropped) and channels are averaged.
double ssim(const geom::Image& a, const geom::Image& b);

}  // namespace sray::scene
