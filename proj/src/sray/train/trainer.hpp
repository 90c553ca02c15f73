// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "sray/diff/adam.hpp"
#include "sray/render/view.hpp"
#include "sray/scene/metrics.hpp"
#include "sray/train/model.hpp"

namespace sray::train {

struct StepStats {
  double loss = 0;
  double aux_loss = 0;
  int64_t shader_queries = 0;
};

// Mean over rays of the squared L2 color error (pred, gt: [B, 3]).
diff::Tensor squared_l2_mean(const diff::Tensor& pred, const diff::Tensor& gt);

// Alternating exploration/exploitation training. Exploration steps treat the
// sampler outputs as constants and update only the shader (Opt_s);
// exploitation steps run the sampler-guided compositing end to end and
// update every head (Opt_cfs).
class Trainer {
 public:
  Trainer(const scene::Scene& scene, const config::RunConfig& cfg, std::string out_dir);

  // Runs from the current iteration to total_iters, appending metrics rows
  // and writing periodic + final checkpoints.
  void run();

  bool is_explore_iter(int64_t it) const;
  double lr_at(int64_t it) const;
  double aux_lambda(int64_t it) const;
  int64_t explore_cutoff_iters() const { return explore_cutoff_it_; }

  // Right-anchored piecewise-even subdivision of the intervals
  // (t_n, T_1], (T_1, T_2], ...; the original distances are retained.
  static std::vector<double> subsample_explore(const std::vector<double>& t, int n_plus,
                                               double t_n);
  // Per-sample Gaussian perturbation with std = scale_frac * local bin width,
  // clamped to [t_n, t_f] and re-sorted.
  static std::vector<double> add_explore_noise(std::vector<double> t_plus, double t_n, double t_f,
                                               double scale_frac, Rng& rng);

  StepStats explore_step(int64_t it);
  StepStats exploit_step(int64_t it);
  StepStats uniform_step(int64_t it);
  StepStats step(int64_t it);

  double eval_heldout_psnr(bool avr = false) const;

  void save_checkpoint(const std::string& path, int64_t next_it) const;
  // Returns the iteration to continue from.
  int64_t restore_checkpoint(const std::string& path);

  Model& model() { return *model_; }
  const scene::ReferencePool& pool() const { return pool_; }
  diff::Adam& opt_shader() { return opt_s_; }
  diff::Adam& opt_all() { return opt_cfs_; }
  Rng& rng() { return rng_; }
  const std::string& out_dir() const { return out_dir_; }

 private:
  struct Batch {
    sampler::SamplerNet::RayBatch rays;
    diff::Tensor gt;  // [B, 3]
    std::vector<geom::NeighborView> neighbors;
  };
  Batch sample_batch();

  const scene::Scene* scene_;
  std::unique_ptr<Model> model_;
  diff::Adam opt_s_;
  diff::Adam opt_cfs_;
  scene::ReferencePool pool_;
  Rng rng_;
  std::string out_dir_;
  int64_t start_it_ = 0;
  int64_t explore_cutoff_it_ = 0;
  int64_t aux_cutoff_it_ = 0;
};

}  // namespace sray::train
