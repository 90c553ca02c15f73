// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/render/view.hpp"

#include <chrono>

#include "sray/diff/tape.hpp"

namespace sray::render {

namespace {

using Clock = std::chrono::steady_clock;

double clamp01(double v) { return v < 0 ? 0 : (v > 1 ? 1 : v); }

std::vector<geom::Ray> chunk_rays(const geom::Camera& pose, int start, int count) {
  std::vector<geom::Ray> rays;
  rays.reserve(static_cast<size_t>(count));
  for (int p = start; p < start + count; ++p) {
    const int x = p % pose.width;
    const int y = p / pose.width;
    rays.push_back(geom::pixel_ray(pose, x + 0.5, y + 0.5));
  }
  return rays;
}

diff::Tensor dirs_per_sample(const std::vector<geom::Ray>& rays, int n_samples) {
  std::vector<double> d(rays.size() * static_cast<size_t>(n_samples) * 3);
  size_t o = 0;
  for (const geom::Ray& r : rays)
    for (int i = 0; i < n_samples; ++i)
      for (int c = 0; c < 3; ++c) d[o++] = r.dir[c];
  return diff::Tensor::from({static_cast<int64_t>(rays.size()) * n_samples, 3}, d);
}

}  // namespace

geom::Image render_pas(const geom::Camera& pose, const scene::Scene& scene,
                       const scene::ReferencePool& pool, const sampler::SamplerNet& sampler_net,
                       const shader::ShaderNet& shader_net, bool avr, RenderStats* stats,
                       int chunk) {
  const auto t0 = Clock::now();
  const int64_t q0 = shader::ShaderNet::query_count();
  diff::NoGradScope no_grad;

  const sampler::SamplerConfig& cfg = sampler_net.config();
  const std::vector<int> nearest =
      scene::nearest_pool_views(scene, pool, pose.center(), cfg.n_neighbors);
  std::vector<geom::NeighborView> neighbors;
  for (int i : nearest)
    neighbors.push_back({&scene.views[static_cast<size_t>(i)].camera,
                         &scene.views[static_cast<size_t>(i)].image});

  geom::Image out;
  out.width = pose.width;
  out.height = pose.height;
  out.rgb.assign(static_cast<size_t>(pose.width) * pose.height * 3, 0.0f);

  const int total = pose.width * pose.height;
  const int ns = cfg.n_samples;
  for (int start = 0; start < total; start += chunk) {
    const int count = std::min(chunk, total - start);
    const std::vector<geom::Ray> rays = chunk_rays(pose, start, count);
    const sampler::SamplerNet::RayBatch batch =
        sampler_net.make_batch(rays, scene.t_near, scene.t_far);
    const sampler::SamplerNet::Forward fwd = sampler_net.forward(batch, neighbors);

    diff::Tensor color;
    if (avr) {
      color = fwd.c_f;
    } else {
      diff::Tensor points = (cfg.offsets_enabled && fwd.fine.o_t.defined())
                                ? sampler_net.apply_offsets(batch, fwd.t_refined, fwd.fine.o_t)
                                : sampler_net.ray_points(batch, fwd.t_refined);
      const shader::ShaderNet::Out so = shader_net.query(points, dirs_per_sample(rays, ns));
      const Composited comp = compose_pas(
          diff::reshape(so.colors, {count, ns, 3}), diff::reshape(so.densities, {count, ns}),
          fwd.t_refined, fwd.coarse.a_t, fwd.coarse.b_t, scene.t_far);
      color = comp.color;
    }
    for (int r = 0; r < count; ++r)
      for (int c = 0; c < 3; ++c)
        out.rgb[static_cast<size_t>(start + r) * 3 + c] =
            static_cast<float>(clamp01(color.value(r * 3 + c)));
  }

  if (stats) {
    stats->shader_queries = shader::ShaderNet::query_count() - q0;
    stats->seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  return out;
}

geom::Image render_dense(const geom::Camera& pose, const shader::ShaderNet& shader_net,
                         double t_n, double t_f, int n_samples, RenderStats* stats, int chunk) {
  SRAY_CHECK(n_samples >= 1, "render_dense needs at least one sample");
  const auto t0 = Clock::now();
  const int64_t q0 = shader::ShaderNet::query_count();
  diff::NoGradScope no_grad;

  std::vector<double> mids(static_cast<size_t>(n_samples));
  const double step = (t_f - t_n) / n_samples;
  for (int i = 0; i < n_samples; ++i) mids[static_cast<size_t>(i)] = t_n + (i + 0.5) * step;

  geom::Image out;
  out.width = pose.width;
  out.height = pose.height;
  out.rgb.assign(static_cast<size_t>(pose.width) * pose.height * 3, 0.0f);

  const int total = pose.width * pose.height;
  for (int start = 0; start < total; start += chunk) {
    const int count = std::min(chunk, total - start);
    const std::vector<geom::Ray> rays = chunk_rays(pose, start, count);
    std::vector<double> pts(static_cast<size_t>(count) * n_samples * 3);
    std::vector<double> dist(static_cast<size_t>(count) * n_samples);
    size_t o = 0;
    for (int r = 0; r < count; ++r)
      for (int i = 0; i < n_samples; ++i) {
        const Eigen::Vector3d p =
            rays[static_cast<size_t>(r)].origin + mids[static_cast<size_t>(i)] * rays[static_cast<size_t>(r)].dir;
        pts[o * 3] = p.x();
        pts[o * 3 + 1] = p.y();
        pts[o * 3 + 2] = p.z();
        dist[o] = mids[static_cast<size_t>(i)];
        ++o;
      }
    const diff::Tensor points =
        diff::Tensor::from({static_cast<int64_t>(count) * n_samples, 3}, pts);
    const diff::Tensor distances =
        diff::Tensor::from({count, n_samples}, dist);
    const shader::ShaderNet::Out so = shader_net.query(points, dirs_per_sample(rays, n_samples));
    const diff::Tensor alpha =
        alphas(diff::reshape(so.densities, {count, n_samples}), distances, t_f);
    const Composited comp = compose(diff::reshape(so.colors, {count, n_samples, 3}), alpha);
    for (int r = 0; r < count; ++r)
      for (int c = 0; c < 3; ++c)
        out.rgb[static_cast<size_t>(start + r) * 3 + c] =
            static_cast<float>(clamp01(comp.color.value(r * 3 + c)));
  }

  if (stats) {
    stats->shader_queries = shader::ShaderNet::query_count() - q0;
    stats->seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  return out;
}

}  // namespace sray::render
