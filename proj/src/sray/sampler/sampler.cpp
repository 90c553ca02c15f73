// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#include "sray/sampler/sampler.hpp"

namespace sray::sampler {

using diff::Tensor;

namespace {
// Mixture floor on the softmax fractions: keeps the cumulative sums strictly
// increasing even when extreme logits underflow to zero in 32-bit mode.
constexpr double kFractionFloor = 1e-6;
}  // namespace

SamplerNet::SamplerNet(const SamplerConfig& cfg, diff::ParamStore& store, Rng& rng,
                       const std::string& prefix)
    : cfg_(cfg) {
  cfg_.validate();
  coarse_mlp_ = nn::Mlp(store, prefix + ".coarse", cfg_.coarse_input_dim(), cfg_.hidden_width,
                        cfg_.layers_per_head, /*skip_at=*/-1, rng);
  coarse_out_ =
      nn::Linear::create(store, prefix + ".coarse.out", cfg_.hidden_width,
                         cfg_.coarse_output_dim(), rng);
  fine_mlp_ = nn::Mlp(store, prefix + ".fine", cfg_.fine_input_dim(), cfg_.hidden_width,
                      cfg_.layers_per_head, /*skip_at=*/-1, rng);
  fine_out_ = nn::Linear::create(store, prefix + ".fine.out", cfg_.hidden_width,
                                 cfg_.fine_output_dim(), rng);
}

SamplerNet::RayBatch SamplerNet::make_batch(const std::vector<geom::Ray>& rays, double t_n,
                                            double t_f) const {
  SRAY_CHECK(!rays.empty(), "empty ray batch");
  SRAY_CHECK(t_n < t_f, "need t_n < t_f");
  RayBatch b;
  b.rays = rays;
  b.t_near = t_n;
  b.t_far = t_f;
  const int64_t n = static_cast<int64_t>(rays.size());
  const int64_t ns = cfg_.n_samples;

  std::vector<double> rpr;
  rpr.reserve(static_cast<size_t>(n) * cfg_.coarse_input_dim());
  std::vector<double> dirs(static_cast<size_t>(n) * 3);
  std::vector<double> dirs_rep(static_cast<size_t>(n) * ns * 3);
  std::vector<double> orig_rep(static_cast<size_t>(n) * ns * 3);
  for (int64_t r = 0; r < n; ++r) {
    const geom::Ray& ray = rays[static_cast<size_t>(r)];
    const std::vector<double> enc = geom::encode_plucker(ray, t_n, t_f, cfg_.n_plucker);
    rpr.insert(rpr.end(), enc.begin(), enc.end());
    for (int c = 0; c < 3; ++c) dirs[static_cast<size_t>(r) * 3 + c] = ray.dir[c];
    for (int64_t i = 0; i < ns; ++i)
      for (int c = 0; c < 3; ++c) {
        dirs_rep[(static_cast<size_t>(r) * ns + i) * 3 + c] = ray.dir[c];
        orig_rep[(static_cast<size_t>(r) * ns + i) * 3 + c] = ray.origin[c];
      }
  }
  b.r_pr = Tensor::from({n, cfg_.coarse_input_dim()}, rpr);
  b.dirs = Tensor::from({n, 3}, dirs);
  b.dirs_rep = Tensor::from({n, ns, 3}, dirs_rep);
  b.origins_rep = Tensor::from({n, ns, 3}, orig_rep);
  return b;
}

Tensor SamplerNet::coarse_head_raw(const Tensor& r_pr) const {
  SRAY_CHECK(r_pr.shape().size() == 2 && r_pr.dim(1) == cfg_.coarse_input_dim(),
             "encoding length must match the sampler config");
  return coarse_out_(coarse_mlp_.forward(r_pr));
}

Tensor SamplerNet::fine_head_raw(const Tensor& fine_input) const {
  SRAY_CHECK(fine_input.shape().size() == 2 && fine_input.dim(1) == cfg_.fine_input_dim(),
             "fine input length must match the sampler config");
  return fine_out_(fine_mlp_.forward(fine_input));
}

SamplerNet::CoarseOut SamplerNet::coarse_forward(const RayBatch& batch) const {
  const int64_t ns = cfg_.n_samples;
  Tensor raw = coarse_head_raw(batch.r_pr);

  // Distance construction: softmax over N_s+1 bins, cumulative partial sums,
  // then an affine map onto (t_n, t_f). Ordering holds by construction.
  Tensor fractions = diff::softmax(diff::slice_last(raw, 0, ns + 1));
  const double k = static_cast<double>(ns + 1);
  fractions = diff::affine(fractions, 1.0 / (1.0 + k * kFractionFloor),
                           kFractionFloor / (1.0 + k * kFractionFloor));
  Tensor csum = diff::cumsum(fractions);
  Tensor partial = diff::slice_last(csum, 0, ns);
  CoarseOut out;
  out.t_coarse = diff::affine(partial, batch.t_far - batch.t_near, batch.t_near);
  out.a_t = diff::sigmoid(diff::slice_last(raw, ns + 1, ns));
  out.b_t = diff::slice_last(raw, 2 * ns + 1, ns);
  out.c_c = diff::sigmoid(diff::slice_last(raw, 3 * ns + 1, 3));
  return out;
}

SamplerNet::FineOut SamplerNet::fine_forward(const Tensor& fine_input) const {
  const int64_t ns = cfg_.n_samples;
  const int64_t nn = cfg_.n_neighbors;
  Tensor raw = fine_head_raw(fine_input);
  FineOut out;
  out.delta_t = diff::sigmoid(diff::slice_last(raw, 0, ns));
  out.w = diff::softmax(diff::slice_last(raw, ns, ns));
  out.m = diff::sigmoid(diff::slice_last(raw, 2 * ns, nn));
  if (cfg_.offsets_enabled)
    out.o_t = diff::mul_scalar(diff::tanh_op(diff::slice_last(raw, 2 * ns + nn, 3 * ns)),
                               cfg_.offset_bound);
  return out;
}

Tensor SamplerNet::build_fine_input(const RayBatch& batch, const Tensor& t_coarse,
                                    const Tensor& colors_flat, const Tensor& validity) const {
  const int64_t n = batch.count();
  const int64_t ns = cfg_.n_samples;
  SRAY_CHECK(t_coarse.shape() == diff::Shape({n, ns}), "t_coarse shape mismatch");
  SRAY_CHECK(colors_flat.shape() == diff::Shape({n, ns * cfg_.n_neighbors * 3}),
             "projection colors shape mismatch");
  SRAY_CHECK(validity.shape() == diff::Shape({n, ns * cfg_.n_neighbors}),
             "validity mask shape mismatch");

  Tensor points = diff::add(diff::scale_rows(t_coarse, batch.dirs_rep), batch.origins_rep);
  Tensor px = diff::slice_last(points, 0, 1);
  Tensor py = diff::slice_last(points, 1, 1);
  Tensor pz = diff::slice_last(points, 2, 1);
  Tensor dx = diff::slice_last(batch.dirs_rep, 0, 1);
  Tensor dy = diff::slice_last(batch.dirs_rep, 1, 1);
  Tensor dz = diff::slice_last(batch.dirs_rep, 2, 1);
  // p x d with the shared ray direction.
  Tensor cx = diff::sub(diff::mul(py, dz), diff::mul(pz, dy));
  Tensor cy = diff::sub(diff::mul(pz, dx), diff::mul(px, dz));
  Tensor cz = diff::sub(diff::mul(px, dy), diff::mul(py, dx));
  Tensor cross = diff::concat_last({cx, cy, cz});

  Tensor rpr = diff::concat_last(
      {batch.dirs, diff::reshape(points, {n, 3 * ns}), diff::reshape(cross, {n, 3 * ns})});
  return diff::concat_last({rpr, colors_flat, validity});
}

Tensor SamplerNet::ray_points(const RayBatch& batch, const Tensor& t) const {
  const int64_t n = batch.count();
  const int64_t ns = cfg_.n_samples;
  Tensor points = diff::add(diff::scale_rows(t, batch.dirs_rep), batch.origins_rep);
  return diff::reshape(points, {n * ns, 3});
}

Tensor SamplerNet::apply_offsets(const RayBatch& batch, const Tensor& t,
                                 const Tensor& o_t) const {
  SRAY_CHECK(cfg_.offsets_enabled, "apply_offsets requires offsets_enabled");
  const int64_t n = batch.count();
  const int64_t ns = cfg_.n_samples;
  Tensor points = diff::add(diff::scale_rows(t, batch.dirs_rep), batch.origins_rep);
  Tensor offs = diff::reshape(o_t, {n, ns, 3});
  return diff::reshape(diff::add(offs, points), {n * ns, 3});
}

Tensor SamplerNet::refine_distances(const Tensor& t_coarse, const Tensor& delta_t, double t_n,
                                    double t_f) {
  SRAY_CHECK(t_coarse.shape().size() == 2, "t_coarse must be [B, N_s]");
  SRAY_CHECK(t_coarse.shape() == delta_t.shape(), "delta_t must match t_coarse");
  const int64_t n = t_coarse.dim(0);
  const int64_t ns = t_coarse.dim(1);
  for (int64_t r = 0; r < n; ++r) {
    double prev = t_n;
    for (int64_t i = 0; i < ns; ++i) {
      const double v = t_coarse.value(r * ns + i);
      SRAY_CHECK(v > prev, "coarse distances must be strictly increasing above t_n");
      prev = v;
    }
    SRAY_CHECK(prev < t_f, "coarse distances must stay below t_f");
  }

  Tensor expanded = diff::concat_last(
      {Tensor::full({n, 1}, t_n), t_coarse, Tensor::full({n, 1}, t_f)});
  Tensor d0 = diff::slice_last(expanded, 0, ns);
  Tensor d1 = diff::slice_last(expanded, 1, ns);
  Tensor d2 = diff::slice_last(expanded, 2, ns);
  Tensor inner = diff::add(diff::add(d0, d1), diff::mul(delta_t, diff::sub(d2, d0)));
  return diff::mul_scalar(inner, 0.5);
}

SamplerNet::AvrOut SamplerNet::avr(const Tensor& w, const Tensor& m, const Tensor& colors_flat,
                                   int n_neighbors) {
  const int64_t n = w.dim(0);
  const int64_t ns = w.dim(1);
  Tensor bundle = diff::reshape(colors_flat, {n, ns, n_neighbors * 3});
  Tensor weighted = diff::scale_rows(w, bundle);
  Tensor c_avr = diff::reshape(diff::sum_axis(weighted, 1), {n, n_neighbors, 3});
  Tensor c_f = diff::sum_axis(diff::scale_rows(m, c_avr), 1);
  return {c_avr, c_f};
}

SamplerNet::Forward SamplerNet::forward(const RayBatch& batch,
                                        const std::vector<geom::NeighborView>& neighbors) const {
  SRAY_CHECK(static_cast<int>(neighbors.size()) == cfg_.n_neighbors,
             "neighbor count must equal the configured N_n");
  Forward fwd;
  fwd.coarse = coarse_forward(batch);

  const int64_t n = batch.count();
  const int64_t ns = cfg_.n_samples;
  const int64_t nn = cfg_.n_neighbors;

  // Color-to-ray projections at the coarse points; constants for the tape.
  std::vector<double> colors(static_cast<size_t>(n) * ns * nn * 3);
  std::vector<double> valid(static_cast<size_t>(n) * ns * nn);
  fwd.bundles.reserve(static_cast<size_t>(n));
  std::vector<double> distances(static_cast<size_t>(ns));
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t i = 0; i < ns; ++i)
      distances[static_cast<size_t>(i)] = fwd.coarse.t_coarse.value(r * ns + i);
    geom::ProjectionBundle bundle =
        geom::color_to_ray(batch.rays[static_cast<size_t>(r)], distances, neighbors);
    const size_t base_c = static_cast<size_t>(r) * ns * nn * 3;
    const size_t base_v = static_cast<size_t>(r) * ns * nn;
    for (size_t i = 0; i < bundle.colors.size(); ++i) colors[base_c + i] = bundle.colors[i];
    for (size_t i = 0; i < bundle.validity.size(); ++i)
      valid[base_v + i] = static_cast<double>(bundle.validity[i]);
    fwd.bundles.push_back(std::move(bundle));
  }
  fwd.colors_flat = Tensor::from({n, ns * nn * 3}, colors);
  fwd.validity = Tensor::from({n, ns * nn}, valid);

  Tensor fine_input = build_fine_input(batch, fwd.coarse.t_coarse, fwd.colors_flat, fwd.validity);
  fwd.fine = fine_forward(fine_input);
  fwd.t_refined =
      refine_distances(fwd.coarse.t_coarse, fwd.fine.delta_t, batch.t_near, batch.t_far);
  fwd.c_f = avr(fwd.fine.w, fwd.fine.m, fwd.colors_flat, cfg_.n_neighbors).c_f;
  return fwd;
}

SampleSet extract_sample_set(const SamplerNet::Forward& fwd, int ray_index) {
  SampleSet s;
  const int64_t ns = fwd.coarse.t_coarse.dim(1);
  const int64_t nn = fwd.fine.m.dim(1);
  const int64_t r = ray_index;
  for (int64_t i = 0; i < ns; ++i) {
    s.t_coarse.push_back(fwd.coarse.t_coarse.value(r * ns + i));
    s.t_refined.push_back(fwd.t_refined.value(r * ns + i));
    s.a_t.push_back(fwd.coarse.a_t.value(r * ns + i));
    s.b_t.push_back(fwd.coarse.b_t.value(r * ns + i));
    s.delta_t.push_back(fwd.fine.delta_t.value(r * ns + i));
    s.w.push_back(fwd.fine.w.value(r * ns + i));
  }
  for (int64_t k = 0; k < nn; ++k) s.m.push_back(fwd.fine.m.value(r * nn + k));
  for (int c = 0; c < 3; ++c) {
    s.c_c[c] = fwd.coarse.c_c.value(r * 3 + c);
    s.c_f[c] = fwd.c_f.value(r * 3 + c);
  }
  if (fwd.fine.o_t.defined())
    for (int64_t i = 0; i < 3 * ns; ++i) s.o_t.push_back(fwd.fine.o_t.value(r * 3 * ns + i));
  return s;
}

}  // namespace sray::sampler
