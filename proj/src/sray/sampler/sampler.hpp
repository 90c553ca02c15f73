// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "sray/geom/plucker.hpp"
#include "sray/geom/projection.hpp"
#include "sray/nn/mlp.hpp"

namespace sray::sampler {

struct SamplerConfig {
  int n_samples = 8;        // samples per ray (N_s)
  int n_neighbors = 4;      // neighbor views per ray (N_n)
  int n_plucker = 48;       // ray-point encoding points (N_pr)
  int hidden_width = 256;
  int layers_per_head = 6;
  bool offsets_enabled = false;
  double offset_bound = 0.01;  // scene units

  void validate() const {
    SRAY_CHECK(n_samples >= 1, "sampler: n_samples >= 1");
    SRAY_CHECK(n_neighbors >= 1, "sampler: n_neighbors >= 1");
    SRAY_CHECK(n_plucker >= 1, "sampler: n_plucker >= 1");
    SRAY_CHECK(hidden_width >= 1 && layers_per_head >= 1, "sampler: bad layer/width");
    SRAY_CHECK(offset_bound > 0, "sampler: offset_bound > 0");
  }

  int coarse_input_dim() const { return 3 + 6 * n_plucker; }
  // distance logits (N_s + 1) | opacity scale logits | opacity shifts | color
  int coarse_output_dim() const { return (n_samples + 1) + n_samples + n_samples + 3; }
  // r'_pr of the coarse points | projected colors | validity mask
  int fine_input_dim() const {
    return 3 + 6 * n_samples + n_samples * n_neighbors * 3 + n_samples * n_neighbors;
  }
  // refinement logits | blend weight logits | view weight logits | offsets
  int fine_output_dim() const {
    return n_samples + n_samples + n_neighbors + (offsets_enabled ? 3 * n_samples : 0);
  }
};

// Per-ray view of one sampler forward, plain values (used by tests and
// diagnostics; training works on the batched tensors directly).
struct SampleSet {
  std::vector<double> t_coarse;   // strictly increasing in (t_n, t_f)
  std::vector<double> t_refined;  // non-decreasing, one tiling window each
  std::vector<double> a_t;        // (0, 1)
  std::vector<double> b_t;        // unconstrained
  std::vector<double> delta_t;    // (0, 1)
  std::vector<double> w;          // simplex over samples
  std::vector<double> m;          // (0, 1) per neighbor
  Eigen::Vector3d c_c;            // coarse light-field color
  Eigen::Vector3d c_f;            // fine light-field color (raw, may leave [0,1])
  std::vector<double> o_t;        // 3*N_s offsets, empty when disabled
};

// Two-head projection-guided sampling network. The coarse head maps the
// ray-point embedding to sorted sample distances plus opacity adjustments;
// the fine head refines the distances from multi-view color projections and
// emits the light-field blending weights.
class SamplerNet {
 public:
  SamplerNet(const SamplerConfig& cfg, diff::ParamStore& store, Rng& rng,
             const std::string& prefix = "sampler");

  // Constant per-batch ray tensors; all rays share [t_n, t_f].
  struct RayBatch {
    std::vector<geom::Ray> rays;
    double t_near = 0, t_far = 0;
    diff::Tensor r_pr;         // [B, 3+6*N_pr]
    diff::Tensor dirs;         // [B, 3]
    diff::Tensor dirs_rep;     // [B, N_s, 3]
    diff::Tensor origins_rep;  // [B, N_s, 3]
    int count() const { return static_cast<int>(rays.size()); }
  };
  RayBatch make_batch(const std::vector<geom::Ray>& rays, double t_n, double t_f) const;

  struct CoarseOut {
    diff::Tensor t_coarse;  // [B, N_s] strictly increasing inside (t_n, t_f)
    diff::Tensor a_t;       // [B, N_s] sigmoid
    diff::Tensor b_t;       // [B, N_s] unconstrained
    diff::Tensor c_c;       // [B, 3] sigmoid
  };
  CoarseOut coarse_forward(const RayBatch& batch) const;

  struct FineOut {
    diff::Tensor delta_t;  // [B, N_s] sigmoid
    diff::Tensor w;        // [B, N_s] softmax
    diff::Tensor m;        // [B, N_n] sigmoid
    diff::Tensor o_t;      // [B, 3*N_s] in (-bound, bound); undefined when disabled
  };
  FineOut fine_forward(const diff::Tensor& fine_input) const;

  // r'_pr of the coarse points concatenated with projected colors and the
  // validity mask. colors_flat [B, N_s*N_n*3] and validity [B, N_s*N_n] are
  // constants; gradients flow into t_coarse through the re-encoding.
  diff::Tensor build_fine_input(const RayBatch& batch, const diff::Tensor& t_coarse,
                                const diff::Tensor& colors_flat,
                                const diff::Tensor& validity) const;

  // p_i = r_o + r_d * t_i as [B*N_s, 3]; with offsets, p_i += o_i.
  diff::Tensor ray_points(const RayBatch& batch, const diff::Tensor& t) const;
  diff::Tensor apply_offsets(const RayBatch& batch, const diff::Tensor& t,
                             const diff::Tensor& o_t) const;

  // Interpolation between consecutive midpoints of {t_n, T', t_f}:
  // T_i = 0.5*((D_i + D_{i+1}) + delta_i*(D_{i+2} - D_i)).
  static diff::Tensor refine_distances(const diff::Tensor& t_coarse, const diff::Tensor& delta_t,
                                       double t_n, double t_f);

  struct AvrOut {
    diff::Tensor c_avr;  // [B, N_n, 3] per-view light-field colors
    diff::Tensor c_f;    // [B, 3] raw aggregate (clamped only for image output)
  };
  static AvrOut avr(const diff::Tensor& w, const diff::Tensor& m,
                    const diff::Tensor& colors_flat, int n_neighbors);

  struct Forward {
    CoarseOut coarse;
    FineOut fine;
    diff::Tensor t_refined;     // [B, N_s]
    diff::Tensor c_f;           // [B, 3]
    diff::Tensor colors_flat;   // const [B, N_s*N_n*3]
    diff::Tensor validity;      // const [B, N_s*N_n]
    std::vector<geom::ProjectionBundle> bundles;
  };
  Forward forward(const RayBatch& batch, const std::vector<geom::NeighborView>& neighbors) const;

  // Raw head outputs before the per-slice squashers (test hooks).
  diff::Tensor coarse_head_raw(const diff::Tensor& r_pr) const;
  diff::Tensor fine_head_raw(const diff::Tensor& fine_input) const;

  const SamplerConfig& config() const { return cfg_; }

 private:
  SamplerConfig cfg_;
  nn::Mlp coarse_mlp_, fine_mlp_;
  nn::Linear coarse_out_, fine_out_;
};

SampleSet extract_sample_set(const SamplerNet::Forward& fwd, int ray_index);

}  // namespace sray::sampler
