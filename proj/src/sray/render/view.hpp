// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sray/render/composite.hpp"
#include "sray/sampler/sampler.hpp"
#include "sray/scene/refpool.hpp"
#include "sray/shader/shader.hpp"

namespace sray::render {

struct RenderStats {
  int64_t shader_queries = 0;
  double seconds = 0;
};

// Sparse render through the sampler-guided pipeline. Projections come from
// the n nearest reference-pool views (sorted near to far). With avr set, the
// light-field output c_f is written instead of querying the shader at all.
geom::Image render_pas(const geom::Camera& pose, const scene::Scene& scene,
                       const scene::ReferencePool& pool, const sampler::SamplerNet& sampler_net,
                       const shader::ShaderNet& shader_net, bool avr = false,
                       RenderStats* stats = nullptr, int chunk = 1024);

// Dense baseline: evenly spaced bin midpoints on [t_n, t_f], plain alpha
// compositing, no sampler.
geom::Image render_dense(const geom::Camera& pose, const shader::ShaderNet& shader_net,
                         double t_n, double t_f, int n_samples, RenderStats* stats = nullptr,
                         int chunk = 1024);

}  // namespace sray::render
