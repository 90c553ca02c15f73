// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sray/geom/camera.hpp"

namespace sray::geom {

// Anchor distances for the ray-point encoding: evenly spaced on [t_n, t_f]
// including both endpoints; a single point degenerates to the midpoint.
std::vector<double> plucker_anchor_distances(double t_n, double t_f, int n_pr);

// Plucker ray-point embedding: [r_d, p_1..p_N, p_1 x r_d, ..., p_N x r_d]
// with p_i = r_o + r_d * t_i, length 3 + 6*N. Each cross product pairs a
// point with the shared (normalized) ray direction.
std::vector<double> encode_plucker(const Ray& ray, const std::vector<double>& distances);
std::vector<double> encode_plucker(const Ray& ray, double t_n, double t_f, int n_pr);

}  // namespace sray::geom
