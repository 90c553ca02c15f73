// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "sray/core/check.hpp"

namespace sray::train {

struct TrainConfig {
  int64_t total_iters = 20000;
  double explore_cutoff_frac = 4.0 / 7.0;  // exploration allowed below this fraction
  double aux_loss_frac = 0.6;              // light-field losses active below this fraction
  int batch_rays = 1024;                   // N_r
  int max_explore_samples = 64;            // N, upper bound of the per-step draw
  double lr0 = 5e-4;
  double lr_decay_ratio = 0.1;             // end-to-start learning rate ratio
  double noise_scale_frac = 0.5;           // noise std as a fraction of the local bin width
  uint64_t seed = 0;
  int64_t checkpoint_interval = 5000;
  int64_t eval_interval = 1000;
  int n_reference_views = 4;               // N_t, fixed pool used at inference
  // none | no-exploration | no-exploitation | uniform-baseline
  std::string ablation = "none";

  void validate(int n_samples) const {
    SRAY_CHECK(total_iters >= 1, "train: total_iters >= 1");
    SRAY_CHECK(explore_cutoff_frac > 0 && explore_cutoff_frac <= 1,
               "train: explore_cutoff_frac in (0,1]");
    SRAY_CHECK(aux_loss_frac >= 0 && aux_loss_frac <= 1, "train: aux_loss_frac in [0,1]");
    SRAY_CHECK(batch_rays >= 1, "train: batch_rays >= 1");
    SRAY_CHECK(max_explore_samples >= n_samples, "train: need N >= N_s");
    SRAY_CHECK(lr0 > 0 && lr_decay_ratio > 0, "train: positive learning rate and decay");
    SRAY_CHECK(noise_scale_frac >= 0, "train: noise_scale_frac >= 0");
    SRAY_CHECK(checkpoint_interval >= 1 && eval_interval >= 1, "train: positive intervals");
    SRAY_CHECK(n_reference_views >= 1, "train: n_reference_views >= 1");
    SRAY_CHECK(ablation == "none" || ablation == "no-exploration" ||
                   ablation == "no-exploitation" || ablation == "uniform-baseline",
               "train: unknown ablation tag");
  }
};

}  // namespace sray::train
